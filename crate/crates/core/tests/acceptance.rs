//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible under `--nocapture`). Expected values come from independent
//! oracles implemented in [`oracle`] — brute-force binding enumeration,
//! breadth-first search, a raw-set plan simulator — never from the code
//! paths they check.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use nsplan_core::causal::{delta_minus, delta_plus, CausalStore, PatternArg, Relation, StatePattern, TripleKey, TripleQuery};
use nsplan_core::clients::ScriptedClient;
use nsplan_core::confidence;
use nsplan_core::decomposition::decompose_and_solve;
use nsplan_core::embedding::{EmbeddingProvider, HashEmbedder};
use nsplan_core::fixtures;
use nsplan_core::gnn::{
    classify_edge, gat_forward, gat_forward_with_attention, gat_layer_forward, node_init,
    GnnWeights, TaskGraph, HIDDEN_DIM,
};
use nsplan_core::memory::{Experience, MemoryStore, Outcome};
use nsplan_core::orchestrator::{
    replay, task_text, Engine, EngineConfig, RunStatus, TaskRequest,
};
use nsplan_core::pddl::{
    ground, parse_domain, parse_problem, Atom, DomainModel, GroundAction, GroundTask,
    GroundingOptions, ProblemModel, SchemaLiteral, Term,
};
use nsplan_core::planner::{solve_grounded, SearchConfig, SolveStatus};
use nsplan_core::state::{validate_plan, Plan, PlanSource, State, TraceOutcome};
use nsplan_core::validation::consensus;

/// Independent reference implementations. These re-derive everything
/// from the model data with plain set operations.
mod oracle {
    use super::*;

    fn subtype_of(dom: &DomainModel, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == "object" {
            return true;
        }
        let mut cur = sub.to_string();
        while let Some(parent) = dom.types.parent(&cur) {
            if parent == sup {
                return true;
            }
            cur = parent.to_string();
        }
        false
    }

    /// Every type-consistent binding of every schema, with equality
    /// preconditions statically resolved.
    pub fn enumerate_bindings(
        dom: &DomainModel,
        prob: &ProblemModel,
    ) -> BTreeSet<(String, Vec<String>)> {
        let mut out = BTreeSet::new();
        let pool: Vec<_> = dom.constants.iter().chain(&prob.objects).collect();
        for schema in &dom.actions {
            let choices: Vec<Vec<&str>> = schema
                .params
                .iter()
                .map(|p| {
                    pool.iter()
                        .filter(|o| subtype_of(dom, &o.ty, &p.ty))
                        .map(|o| o.name.as_str())
                        .collect()
                })
                .collect();
            let mut stack: Vec<Vec<&str>> = vec![Vec::new()];
            for options in &choices {
                let mut next = Vec::new();
                for partial in &stack {
                    for option in options {
                        let mut extended = partial.clone();
                        extended.push(option);
                        next.push(extended);
                    }
                }
                stack = next;
            }
            'candidate: for binding in stack {
                for literal in &schema.preconditions {
                    if let SchemaLiteral::Equality { left, right, negated } = literal {
                        let resolve = |term: &Term| -> String {
                            match term {
                                Term::Const(c) => c.clone(),
                                Term::Var(v) => {
                                    let idx = schema
                                        .params
                                        .iter()
                                        .position(|p| &p.name == v)
                                        .expect("bound var");
                                    binding[idx].to_string()
                                }
                            }
                        };
                        if (resolve(left) == resolve(right)) == *negated {
                            continue 'candidate;
                        }
                    }
                }
                out.insert((
                    schema.name.clone(),
                    binding.iter().map(|s| s.to_string()).collect(),
                ));
            }
        }
        out
    }

    fn applicable(state: &BTreeSet<Atom>, action: &GroundAction) -> bool {
        action.pre_pos.iter().all(|a| state.contains(a))
            && action.pre_neg.iter().all(|a| !state.contains(a))
    }

    fn apply(state: &BTreeSet<Atom>, action: &GroundAction) -> BTreeSet<Atom> {
        let mut next: BTreeSet<Atom> =
            state.iter().filter(|a| !action.del.contains(a)).cloned().collect();
        next.extend(action.add.iter().cloned());
        next
    }

    fn goal_holds(prob: &ProblemModel, state: &BTreeSet<Atom>) -> bool {
        prob.goal.iter().all(|l| state.contains(&l.atom) != l.negated)
    }

    /// Breadth-first shortest plan length, bounded at 10^5 states.
    pub fn bfs_optimal_length(prob: &ProblemModel, task: &GroundTask) -> Option<usize> {
        let init: BTreeSet<Atom> = prob.init.clone();
        if goal_holds(prob, &init) {
            return Some(0);
        }
        let mut visited: std::collections::HashSet<BTreeSet<Atom>> = [init.clone()].into();
        let mut frontier = vec![init];
        let mut depth = 0usize;
        while !frontier.is_empty() {
            depth += 1;
            let mut next_frontier = Vec::new();
            for state in frontier {
                for action in &task.actions {
                    if !applicable(&state, action) {
                        continue;
                    }
                    let next = apply(&state, action);
                    if goal_holds(prob, &next) {
                        return Some(depth);
                    }
                    if visited.insert(next.clone()) {
                        assert!(visited.len() <= 100_000, "state space beyond oracle bound");
                        next_frontier.push(next);
                    }
                }
            }
            frontier = next_frontier;
        }
        None
    }

    #[derive(Debug, PartialEq, Eq)]
    pub struct SimResult {
        pub goal_satisfied: bool,
        pub failed_step: Option<usize>,
        pub terminal: BTreeSet<Atom>,
    }

    /// Step-by-step simulation with raw set operations.
    pub fn simulate(prob: &ProblemModel, actions: &[GroundAction]) -> SimResult {
        let mut state: BTreeSet<Atom> = prob.init.clone();
        for (i, action) in actions.iter().enumerate() {
            if !applicable(&state, action) {
                return SimResult {
                    goal_satisfied: false,
                    failed_step: Some(i + 1),
                    terminal: state,
                };
            }
            state = apply(&state, action);
        }
        if goal_holds(prob, &state) {
            SimResult { goal_satisfied: true, failed_step: None, terminal: state }
        } else {
            SimResult {
                goal_satisfied: false,
                failed_step: Some(actions.len() + 1),
                terminal: state,
            }
        }
    }
}

fn load(
    fixture: &fixtures::Fixture,
) -> (DomainModel, ProblemModel, GroundTask) {
    let dom = parse_domain(fixture.domain).unwrap();
    let prob = parse_problem(fixture.problem, &dom).unwrap();
    let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
    (dom, prob, task)
}

// ---------------------------------------------------------------------------
// Criterion 1: grounding matches brute-force binding enumeration.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_grounding_oracle() {
    let started = Instant::now();
    for fixture in fixtures::ALL {
        let (dom, prob, task) = load(fixture);
        let expected = oracle::enumerate_bindings(&dom, &prob);
        let actual: BTreeSet<(String, Vec<String>)> = task
            .actions
            .iter()
            .map(|a| (a.schema.clone(), a.args.clone()))
            .collect();
        assert_eq!(expected, actual, "grounding mismatch on {}", fixture.name);
        assert_eq!(task.actions.len(), expected.len());
    }
    let (_, _, blocks) = load(fixtures::by_name("blocksworld").unwrap());
    assert_eq!(blocks.actions.len(), 18);
    let (_, _, gripper) = load(fixtures::by_name("gripper").unwrap());
    assert_eq!(gripper.actions.len(), 20);
    assert!(started.elapsed() < Duration::from_secs(1), "grounding oracle over 1 s");
    println!("ACCEPTANCE grounding-oracle: PASS ({} fixtures)", fixtures::ALL.len());
}

// ---------------------------------------------------------------------------
// Criterion 2: optimal mode matches BFS-oracle plan lengths.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_planner_optimality() {
    let started = Instant::now();
    for fixture in fixtures::ALL {
        let (_, prob, task) = load(fixture);
        let reference = oracle::bfs_optimal_length(&prob, &task)
            .expect("fixture is solvable");
        assert_eq!(reference, fixture.optimal_length, "stale fixture data: {}", fixture.name);
        let result = solve_grounded(&prob, &task, &SearchConfig::optimal()).unwrap();
        assert_eq!(result.status, SolveStatus::Solved, "{}", fixture.name);
        assert_eq!(
            result.plan.unwrap().len(),
            reference,
            "suboptimal plan on {}",
            fixture.name
        );
    }
    // The two named anchors.
    assert_eq!(fixtures::by_name("blocksworld").unwrap().optimal_length, 6);
    assert_eq!(fixtures::by_name("gripper").unwrap().optimal_length, 5);
    assert!(started.elapsed() < Duration::from_secs(10), "optimality suite over 10 s");
    println!("ACCEPTANCE planner-optimality: PASS (BFS oracle, {} fixtures)", fixtures::ALL.len());
}

// ---------------------------------------------------------------------------
// Criterion 3: validate_plan agrees with the independent simulator on
// 1,000 randomized plans per fixture.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_validation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    for fixture in fixtures::ALL {
        let (_, prob, task) = load(fixture);
        for case in 0..1000 {
            let actions = random_plan(&mut rng, &prob, &task, case % 2 == 0);
            let plan = Plan::new(actions.clone(), PlanSource::Generated);
            let trace = validate_plan(&prob, &plan);
            let simulated = oracle::simulate(&prob, &actions);

            assert_eq!(
                trace.outcome.is_goal_satisfied(),
                simulated.goal_satisfied,
                "verdict disagreement on {} case {case}",
                fixture.name
            );
            let engine_failed_step = match &trace.outcome {
                TraceOutcome::GoalSatisfied => None,
                TraceOutcome::Failed { step, .. } => Some(*step),
            };
            assert_eq!(
                engine_failed_step, simulated.failed_step,
                "failure-step disagreement on {} case {case}",
                fixture.name
            );
            let terminal: BTreeSet<Atom> = trace.terminal.atoms().cloned().collect();
            assert_eq!(terminal, simulated.terminal, "{} case {case}", fixture.name);
        }
    }
    println!(
        "ACCEPTANCE validation-oracle: PASS ({} x 1000 randomized plans, 0 disagreements)",
        fixtures::ALL.len()
    );
}

/// Random plan generator: either a legal random walk (possibly with a
/// corrupted tail) or a fully random action sequence.
fn random_plan(
    rng: &mut ChaCha8Rng,
    prob: &ProblemModel,
    task: &GroundTask,
    walk: bool,
) -> Vec<GroundAction> {
    let mut actions = Vec::new();
    if walk {
        let mut state: BTreeSet<Atom> = prob.init.clone();
        for _ in 0..rng.gen_range(0..10) {
            let applicable: Vec<&GroundAction> = task
                .actions
                .iter()
                .filter(|a| {
                    a.pre_pos.iter().all(|p| state.contains(p))
                        && a.pre_neg.iter().all(|p| !state.contains(p))
                })
                .collect();
            if applicable.is_empty() {
                break;
            }
            let action = applicable[rng.gen_range(0..applicable.len())];
            state = state
                .iter()
                .filter(|a| !action.del.contains(a))
                .cloned()
                .chain(action.add.iter().cloned())
                .collect();
            actions.push(action.clone());
        }
        // Half of the walks get a corrupted tail.
        if rng.gen_bool(0.5) {
            for _ in 0..rng.gen_range(1..3) {
                actions.push(task.actions[rng.gen_range(0..task.actions.len())].clone());
            }
        }
    } else {
        for _ in 0..rng.gen_range(1..12) {
            actions.push(task.actions[rng.gen_range(0..task.actions.len())].clone());
        }
    }
    actions
}

// ---------------------------------------------------------------------------
// Criterion 4: causal learning on the worked transport step, and Δ±
// against a set-difference oracle on 10,000 random state pairs.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_causal_learning() {
    // The worked step: a mover changes rooms while holding a ball.
    let dom = parse_domain(
        "(define (domain minitransport)
           (:requirements :strips :typing)
           (:types mover room ball - object)
           (:predicates (at ?m - mover ?r - room) (holding ?m - mover ?b - ball))
           (:action move
             :parameters (?m - mover ?from - room ?to - room)
             :precondition (at ?m ?from)
             :effect (and (at ?m ?to) (not (at ?m ?from)))))",
    )
    .unwrap();
    let prob = parse_problem(
        "(define (problem step) (:domain minitransport)
           (:objects gripper1 - mover rooma roomb - room ball1 - ball)
           (:init (at gripper1 rooma) (holding gripper1 ball1))
           (:goal (at gripper1 roomb)))",
        &dom,
    )
    .unwrap();
    let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
    let plan = nsplan_core::state::parse_plan(
        "(move gripper1 rooma roomb)\n",
        &task,
        PlanSource::Builtin,
    )
    .unwrap();
    let trace = validate_plan(&prob, &plan);
    assert!(trace.outcome.is_goal_satisfied());

    // The Δ sets of the worked transition.
    let step = &trace.steps[0];
    let plus = delta_plus(&step.pre, &step.post);
    let minus = delta_minus(&step.pre, &step.post);
    assert_eq!(plus, [Atom::new("at", vec!["gripper1".into(), "roomb".into()])].into());
    assert_eq!(minus, [Atom::new("at", vec!["gripper1".into(), "rooma".into()])].into());

    // The lifted triple: at(mover, destination-role).
    let mut store = CausalStore::new();
    store.learn_from_trace(&trace).unwrap();
    let key = TripleKey {
        action: "move".into(),
        relation: Relation::Produces,
        pattern: StatePattern {
            predicate: "at".into(),
            roles: vec![PatternArg::Param(0), PatternArg::Param(2)],
        },
    };
    let triple = store.get(&key).expect("at-destination triple learned");
    assert_eq!(triple.support, 1);
    let hits = store.query(&TripleQuery {
        action: Some("move".into()),
        relation: Some(Relation::Produces),
        min_confidence: 0.5,
        ..Default::default()
    });
    assert_eq!(hits.len(), 1, "exactly the destination triple");

    // Δ± equals the set-difference oracle on random state pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE17A);
    let pool: Vec<Atom> = (0..40)
        .map(|i| Atom::new(format!("p{}", i % 7), vec![format!("o{i}")]))
        .collect();
    for _ in 0..10_000 {
        let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<Atom> {
            pool.iter().filter(|_| rng.gen_bool(0.35)).cloned().collect()
        };
        let pre_atoms = pick(&mut rng);
        let post_atoms = pick(&mut rng);
        let pre = State::new(pre_atoms.clone());
        let post = State::new(post_atoms.clone());
        let expected_plus: BTreeSet<Atom> =
            post_atoms.difference(&pre_atoms).cloned().collect();
        let expected_minus: BTreeSet<Atom> =
            pre_atoms.difference(&post_atoms).cloned().collect();
        assert_eq!(delta_plus(&pre, &post), expected_plus);
        assert_eq!(delta_minus(&pre, &post), expected_minus);
    }
    println!("ACCEPTANCE causal-learning: PASS (worked step + 10000 random pairs)");
}

// ---------------------------------------------------------------------------
// Criterion 5: confidence arithmetic on a grid, plus monotonicity.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_confidence_arithmetic() {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for &e in &grid {
        for &x in &grid {
            for &c in &grid {
                for &d in &grid {
                    let expected = 0.4 * e + 0.3 * (1.0 - x) + 0.2 * c + 0.1 * d;
                    let got = confidence::total(e, x, c, d);
                    assert!(
                        (got - expected).abs() < 1e-12,
                        "total({e},{x},{c},{d}) = {got}, expected {expected}"
                    );
                }
            }
        }
    }
    // The worked case: 0.2 + 0.18 + 0.04 + 0.08.
    assert!((confidence::total(0.5, 0.4, 0.2, 0.8) - 0.50).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(0xC0F1D);
    for _ in 0..1000 {
        let e: f64 = rng.gen();
        let x: f64 = rng.gen();
        let c: f64 = rng.gen();
        let d: f64 = rng.gen();
        let eps: f64 = rng.gen_range(1e-6..0.3);
        let base = confidence::total(e, x, c, d);
        assert!((0.0..=1.0 + 1e-12).contains(&base));
        if e + eps <= 1.0 {
            assert!(confidence::total(e + eps, x, c, d) > base);
        }
        if x + eps <= 1.0 {
            assert!(confidence::total(e, x + eps, c, d) < base);
        }
        if c + eps <= 1.0 {
            assert!(confidence::total(e, x, c + eps, d) > base);
        }
        if d + eps <= 1.0 {
            assert!(confidence::total(e, x, c, d + eps) > base);
        }
    }
    println!("ACCEPTANCE confidence-arithmetic: PASS (14641-point grid + 1000 perturbations)");
}

// ---------------------------------------------------------------------------
// Criterion 6: consensus arithmetic and scale invariance.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_consensus() {
    let mut scores = vec![(1.0, 1.0); 9];
    scores.extend(vec![(1.0, 0.0); 3]);
    let (value, approved) = consensus(&scores, 0.7).unwrap();
    assert!((value - 0.75).abs() < 1e-12);
    assert!(approved, "0.75 >= 0.7");

    let mut rng = ChaCha8Rng::seed_from_u64(0xC0C5);
    for _ in 0..500 {
        let n = rng.gen_range(1..20);
        let base: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.01..1.0), rng.gen::<f64>()))
            .collect();
        let (v0, a0) = consensus(&base, 0.7).unwrap();
        for scale in [1e-6, 0.25, 3.0, 1e6] {
            let scaled: Vec<(f64, f64)> =
                base.iter().map(|(r, s)| (r * scale, *s)).collect();
            let (v1, a1) = consensus(&scaled, 0.7).unwrap();
            assert!((v0 - v1).abs() < 1e-12, "scale {scale}: {v0} vs {v1}");
            assert_eq!(a0, a1);
        }
        // Consensus stays within the score envelope.
        let min = base.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
        let max = base.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
        assert!(v0 >= min - 1e-12 && v0 <= max + 1e-12);
    }
    println!("ACCEPTANCE consensus: PASS (9-of-12 = 0.75 + scale invariance)");
}

// ---------------------------------------------------------------------------
// Criterion 7: memory ring semantics and retrieval ranking.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_memory() {
    let embedder = HashEmbedder::default();
    let mut store = MemoryStore::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3E3);

    let mut entries = Vec::new();
    for i in 0..1001u64 {
        let embedding = embedder.embed(&format!("task number {i}")).unwrap();
        let outcome = if rng.gen_bool(0.7) { Outcome::Success } else { Outcome::Failure };
        let e = Experience {
            embedding,
            domain: "accept".into(),
            problem_digest: format!("entry-{i}"),
            plan: vec!["(noop)".into()],
            outcome,
            plan_length: 1,
            wall_seconds: 0.0,
            timestamp_ms: i,
        };
        entries.push(e.clone());
        store.insert(e);
    }
    assert_eq!(store.len(), 1000);
    let digests: Vec<&str> = store.iter().map(|e| e.problem_digest.as_str()).collect();
    assert!(!digests.contains(&"entry-0"), "first insert evicted");
    assert_eq!(digests[0], "entry-1");

    // Retrieval equals a brute-force sort oracle, never yields failures.
    for probe in 0..50 {
        let query = embedder.embed(&format!("probe text {probe}")).unwrap();
        let hits = store.retrieve_similar(&query, 3);
        assert!(hits
            .iter()
            .all(|h| h.experience.outcome == Outcome::Success));

        // Oracle over the live ring (entries 1..=1000).
        let mut scored: Vec<(f64, usize, &Experience)> = entries[1..]
            .iter()
            .enumerate()
            .filter(|(_, e)| e.outcome == Outcome::Success)
            .map(|(i, e)| {
                let dot: f64 = e
                    .embedding
                    .components()
                    .iter()
                    .zip(query.components())
                    .map(|(a, b)| a * b)
                    .sum();
                (dot, i, e)
            })
            .collect();
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0).unwrap().then(b.1.cmp(&a.1))
        });
        let expected: Vec<&str> =
            scored.iter().take(3).map(|(_, _, e)| e.problem_digest.as_str()).collect();
        let got: Vec<&str> =
            hits.iter().map(|h| h.experience.problem_digest.as_str()).collect();
        assert_eq!(expected, got, "probe {probe}");
    }
    println!("ACCEPTANCE memory: PASS (1001 inserts, ring + sort-oracle retrieval)");
}

// ---------------------------------------------------------------------------
// Criterion 8: GAT attention rows, isolated nodes, relabeling
// equivariance.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_gat_properties() {
    let embedder = HashEmbedder::default();
    let embed = |text: &str| embedder.embed(text).unwrap();

    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..7);
        let mut graph = TaskGraph::new();
        for i in 0..n {
            graph
                .add_node(format!("n{i}"), format!("task {i} of seed {seed}"), embed(&format!("task {i} of seed {seed}")))
                .unwrap();
        }
        for src in 0..n {
            for dst in 0..n {
                if src != dst && rng.gen_bool(0.4) {
                    graph.add_edge(&format!("n{src}"), &format!("n{dst}")).unwrap();
                }
            }
        }
        let weights = GnnWeights::seeded(seed);
        let h0 = node_init(&graph, &weights).unwrap();
        let (features, records) = gat_forward_with_attention(&graph, &h0, &weights).unwrap();
        assert!(!records.is_empty());
        for record in &records {
            let total: f32 = record.weights.iter().map(|(_, a)| a).sum();
            assert!((total - 1.0).abs() < 1e-6, "seed {seed}: attention row sums to {total}");
            assert!(record.weights.iter().all(|(_, a)| *a >= 0.0));
        }

        // Edge classification is a proper distribution.
        let pred = classify_edge(&features[0], &features[n - 1], &weights).unwrap();
        let mass: f32 = pred.distribution.iter().sum();
        assert!((mass - 1.0).abs() < 1e-6);
    }

    // Isolated node: attention collapses to the self-loop and the first
    // layer's output is ELU(W h) per head, against a scratch matvec.
    for seed in [1u64, 17, 99] {
        let weights = GnnWeights::seeded(seed);
        let mut graph = TaskGraph::new();
        graph.add_node("solo", "isolated node", embed("isolated node")).unwrap();
        let h0 = node_init(&graph, &weights).unwrap();
        let out = gat_layer_forward(&graph, &h0, &weights, 0).unwrap();
        for (head_idx, head) in weights.layers[0].heads.iter().enumerate() {
            for row in 0..HIDDEN_DIM {
                let mut dot = 0.0f32;
                for (col, v) in h0[0].iter().enumerate() {
                    dot += head.w.data[row * head.w.cols + col] * v;
                }
                let expected = if dot > 0.0 { dot } else { dot.exp() - 1.0 };
                let got = out[0][head_idx * HIDDEN_DIM + row];
                assert!(
                    (expected - got).abs() < 1e-6,
                    "seed {seed} head {head_idx} row {row}: {expected} vs {got}"
                );
            }
        }
    }

    // Relabeling equivariance is exact.
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xEEE);
        let n = rng.gen_range(3..7);
        let texts: Vec<String> = (0..n).map(|i| format!("payload {i} seed {seed}")).collect();
        let mut edges = Vec::new();
        for s in 0..n {
            for d in 0..n {
                if s != d && rng.gen_bool(0.35) {
                    edges.push((s, d));
                }
            }
        }
        let mut permutation: Vec<usize> = (0..n).collect();
        permutation.shuffle(&mut rng);

        let weights = GnnWeights::seeded(seed);
        let mut original = TaskGraph::new();
        for (i, t) in texts.iter().enumerate() {
            original.add_node(format!("n{i}"), t.clone(), embed(t)).unwrap();
        }
        for (s, d) in &edges {
            original.add_edge(&format!("n{s}"), &format!("n{d}")).unwrap();
        }
        let mut permuted = TaskGraph::new();
        for &i in &permutation {
            permuted.add_node(format!("n{i}"), texts[i].clone(), embed(&texts[i])).unwrap();
        }
        for (s, d) in &edges {
            permuted.add_edge(&format!("n{s}"), &format!("n{d}")).unwrap();
        }

        let out_original =
            gat_forward(&original, &node_init(&original, &weights).unwrap(), &weights).unwrap();
        let out_permuted =
            gat_forward(&permuted, &node_init(&permuted, &weights).unwrap(), &weights).unwrap();
        for (pos, &node) in permutation.iter().enumerate() {
            assert_eq!(
                out_original[node], out_permuted[pos],
                "seed {seed}: node n{node} output must be bit-identical"
            );
        }
    }
    println!("ACCEPTANCE gat-properties: PASS (100 seeds + isolated node + equivariance)");
}

// ---------------------------------------------------------------------------
// Criterion 9: every merge-accepted plan passes full-problem validation
// on 50 randomized decomposable fixtures.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_decomposition_merges() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xDEC0);
    let mut accepted = 0usize;
    for case in 0..50 {
        let (domain_text, problem_text) = if case % 2 == 0 {
            random_gripper_instance(&mut rng)
        } else {
            random_blocksworld_instance(&mut rng)
        };
        let dom = parse_domain(&domain_text).unwrap();
        let prob = parse_problem(&problem_text, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();

        let (graph, plan, _) = decompose_and_solve(
            &dom,
            &prob,
            &task,
            &CausalStore::new(),
            Duration::from_secs(60),
            None,
        )
        .unwrap_or_else(|e| panic!("case {case} failed: {e}\n{problem_text}"));
        assert!(graph.is_acyclic());

        // Verify with the independent simulator, not validate_plan.
        let simulated = oracle::simulate(&prob, &plan.actions);
        assert!(
            simulated.goal_satisfied,
            "case {case}: accepted merge fails the oracle\n{problem_text}"
        );
        accepted += 1;
    }
    assert_eq!(accepted, 50);
    println!("ACCEPTANCE decomposition: PASS (50 randomized fixtures, 0 invalid merges)");
}

fn random_gripper_instance(rng: &mut ChaCha8Rng) -> (String, String) {
    let rooms = rng.gen_range(2..4usize);
    let balls = rng.gen_range(2..5usize);
    let room_names: Vec<String> = (0..rooms).map(|i| format!("room{i}")).collect();
    let mut objects = String::new();
    objects.push_str(&format!("{} - room robot1 - robot left right - gripper", room_names.join(" ")));
    let mut init = String::new();
    init.push_str(&format!("(at-robby robot1 {})", room_names[rng.gen_range(0..rooms)]));
    init.push_str(" (free robot1 left) (free robot1 right)");
    let mut goal = String::new();
    for b in 0..balls {
        objects.push_str(&format!(" ball{b} - ball"));
        init.push_str(&format!(" (at ball{b} {})", room_names[rng.gen_range(0..rooms)]));
        goal.push_str(&format!(" (at ball{b} {})", room_names[rng.gen_range(0..rooms)]));
    }
    (
        fixtures::GRIPPER_DOMAIN.to_string(),
        format!(
            "(define (problem random-gripper) (:domain gripper)\n  (:objects {objects})\n  (:init {init})\n  (:goal (and{goal})))"
        ),
    )
}

fn random_blocksworld_instance(rng: &mut ChaCha8Rng) -> (String, String) {
    let blocks = rng.gen_range(3..6usize);
    let names: Vec<String> = (0..blocks).map(|i| format!("b{i}")).collect();
    let objects = format!("{} - block", names.join(" "));
    let mut init = String::new();
    for name in &names {
        init.push_str(&format!(" (ontable {name}) (clear {name})"));
    }
    init.push_str(" (handempty)");
    // A random tower over a shuffled prefix: solvable from a flat start.
    let mut shuffled = names.clone();
    shuffled.shuffle(rng);
    let height = rng.gen_range(2..=blocks);
    let mut goal = String::new();
    for pair in shuffled[..height].windows(2) {
        goal.push_str(&format!(" (on {} {})", pair[0], pair[1]));
    }
    (
        fixtures::BLOCKSWORLD_DOMAIN.to_string(),
        format!(
            "(define (problem random-tower) (:domain blocksworld)\n  (:objects {objects})\n  (:init{init})\n  (:goal (and{goal})))"
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 10: end-to-end over the six bundled tasks with a scripted
// client and seeded memories; run directories replay identically.
// ---------------------------------------------------------------------------
#[test]
fn acceptance_end_to_end() {
    let started = Instant::now();
    let scripted = Arc::new(ScriptedClient::new(vec![]));
    let mut engine = Engine::new(EngineConfig::default()).with_client(scripted);

    // Seed the memories: three similar successes per task plus causal
    // triples mined from one optimal plan each.
    let embedder = HashEmbedder::default();
    for fixture in fixtures::ALL {
        let (_, prob, task) = load(fixture);
        let embedding = embedder.embed(&task_text(&prob)).unwrap();
        for _ in 0..3 {
            engine.memory.insert(Experience {
                embedding: embedding.clone(),
                domain: prob.domain_name.clone(),
                problem_digest: format!("seed-{}", fixture.name),
                plan: vec!["(seeded)".into()],
                outcome: Outcome::Success,
                plan_length: 1,
                wall_seconds: 0.0,
                timestamp_ms: 0,
            });
        }
        let result = solve_grounded(&prob, &task, &SearchConfig::optimal()).unwrap();
        let trace = validate_plan(&prob, &result.plan.unwrap());
        engine.causal.learn_from_trace(&trace).unwrap();
    }

    let base = tempfile::tempdir().unwrap();
    let mut run_dirs = Vec::new();
    let mut successes = 0;
    for fixture in fixtures::ALL {
        let run_dir = base.path().join(fixture.name);
        let request = TaskRequest::inline(fixture.domain, fixture.problem)
            .with_budget(300)
            .with_run_dir(&run_dir);
        let record = engine.run(&request).unwrap();
        assert_eq!(record.status, RunStatus::Success, "{} failed", fixture.name);
        assert!(record.verdict.as_ref().unwrap().approved);
        let plan_lines = record.plan.as_ref().unwrap();
        assert!(!plan_lines.is_empty() || fixture.optimal_length == 0);
        successes += 1;
        run_dirs.push((fixture.name, run_dir, record));
    }
    assert_eq!(successes, 6, "6/6 required");

    // Replay every run directory: digests must match exactly.
    for (name, run_dir, record) in &run_dirs {
        let (stored, replayed) = replay(run_dir).unwrap();
        assert_eq!(&stored.digest(), &record.digest(), "{name}: stored record differs");
        assert_eq!(
            stored.digest(),
            replayed.digest(),
            "{name}: replay produced a different record"
        );
    }
    assert!(
        started.elapsed() < Duration::from_secs(60),
        "end-to-end suite exceeded 60 s: {:?}",
        started.elapsed()
    );
    println!("ACCEPTANCE end-to-end: PASS (6/6 tasks, replayed run dirs identical)");
}
