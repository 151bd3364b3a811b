//! Hierarchical decomposition: split a goal into a dependency DAG of
//! subtasks, plan them wave-parallel, and merge into one validated plan.
//!
//! Clustering keys goal literals on their first argument (the literal's
//! subject). Ordering edges come from a landmark-interference rule:
//! compute each node's requirement landmarks by intersecting the
//! preconditions of every producer while backchaining from its goals;
//! if establishing v's goal atom deletes one of u's landmarks, u must
//! be planned before v (edge u→v). Cycles are collapsed into a single
//! subtask — correctness over parallelism.
//!
//! The hard postcondition lives in [`merge`]: a merge-accepted plan has
//! passed full-problem validation, with one re-planning repair attempt
//! per offending node before giving up.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causal::CausalStore;
use crate::pddl::{
    serialize_domain, serialize_problem, Atom, DomainModel, GroundTask, ProblemModel,
    GroundLiteral,
};
use crate::planner::{solve_grounded, PlannerError, PlannerResult, SearchConfig, SolveStatus};
use crate::state::{validate_plan, Plan, PlanSource, State};

pub const MIN_NODE_BUDGET: Duration = Duration::from_secs(5);

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("problem has no goal literals to decompose")]
    EmptyGoal,
    #[error("subtask {node} is unsolvable: {status:?}")]
    NodeFailed { node: usize, status: SolveStatus },
    #[error("merged plan fails validation at step {step} (node {node})")]
    MergeInvalid { step: usize, node: usize },
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One subtask: its own goal slice plus constraints carried from its
/// ancestors so later planning does not undo earlier achievements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtaskNode {
    pub id: usize,
    pub goals: BTreeSet<GroundLiteral>,
    pub carried: BTreeSet<GroundLiteral>,
}

/// Acyclic dependency graph; an edge `u → v` orders u before v.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    pub nodes: Vec<SubtaskNode>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |(_, d)| *d == v).map(|(s, _)| *s)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().len() == self.nodes.len()
    }

    /// Kahn's algorithm, smallest node id first: a deterministic total
    /// order compatible with the edges.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indegree = vec![0usize; self.nodes.len()];
        for (_, d) in &self.edges {
            indegree[*d] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..self.nodes.len())
            .filter(|v| indegree[*v] == 0)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for (s, d) in &self.edges {
                if *s == v {
                    indegree[*d] -= 1;
                    if indegree[*d] == 0 {
                        ready.insert(*d);
                    }
                }
            }
        }
        order
    }

    /// Parallel schedule: wave k holds the nodes whose predecessors all
    /// lie in earlier waves.
    pub fn waves(&self) -> Vec<Vec<usize>> {
        let mut level = vec![0usize; self.nodes.len()];
        for v in self.topological_order() {
            level[v] = self
                .predecessors(v)
                .map(|p| level[p] + 1)
                .max()
                .unwrap_or(0);
        }
        let depth = level.iter().max().map_or(0, |m| m + 1);
        let mut waves = vec![Vec::new(); depth];
        for (v, l) in level.iter().enumerate() {
            waves[*l].push(v);
        }
        waves
    }

    /// Transitive ancestor set of `v`.
    pub fn ancestors(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = self.predecessors(v).collect();
        while let Some(p) = stack.pop() {
            if out.insert(p) {
                stack.extend(self.predecessors(p));
            }
        }
        out
    }
}

/// Clusters goal literals by their first argument; 0-ary literals each
/// form their own cluster.
fn cluster_goals(goal: &BTreeSet<GroundLiteral>) -> Vec<BTreeSet<GroundLiteral>> {
    let mut by_subject: BTreeMap<String, BTreeSet<GroundLiteral>> = BTreeMap::new();
    let mut singletons = Vec::new();
    for literal in goal {
        match literal.atom.args.first() {
            Some(subject) => {
                by_subject.entry(subject.clone()).or_default().insert(literal.clone());
            }
            None => singletons.push([literal.clone()].into()),
        }
    }
    let mut clusters: Vec<BTreeSet<GroundLiteral>> = by_subject.into_values().collect();
    clusters.extend(singletons);
    clusters
}

/// Requirement landmarks of a goal-atom set, computed by intersecting
/// the positive preconditions of all producers while backchaining.
fn landmarks(goals: &BTreeSet<Atom>, producers: &HashMap<&Atom, Vec<usize>>, task: &GroundTask) -> BTreeSet<Atom> {
    let mut found: BTreeSet<Atom> = goals.clone();
    let mut queue: Vec<Atom> = goals.iter().cloned().collect();
    while let Some(atom) = queue.pop() {
        let Some(achievers) = producers.get(&atom) else { continue };
        if achievers.is_empty() {
            continue;
        }
        let mut shared: Option<BTreeSet<&Atom>> = None;
        for &a in achievers {
            let pre: BTreeSet<&Atom> = task.actions[a].pre_pos.iter().collect();
            shared = Some(match shared {
                None => pre,
                Some(acc) => acc.intersection(&pre).cloned().collect(),
            });
        }
        for atom in shared.unwrap_or_default() {
            if found.insert(atom.clone()) {
                queue.push(atom.clone());
            }
        }
    }
    found
}

/// Builds the subtask DAG. The interference rule reads exact
/// requires/produces structure off the ground actions; confident
/// PREVENTS knowledge from the causal store adds ordering edges the
/// static chain may have missed (see `prevents_interference`).
pub fn decompose(
    prob: &ProblemModel,
    task: &GroundTask,
    causal: &CausalStore,
) -> Result<DependencyGraph, DecompositionError> {
    if prob.goal.is_empty() {
        return Err(DecompositionError::EmptyGoal);
    }
    let clusters = cluster_goals(&prob.goal);
    let nodes: Vec<SubtaskNode> = clusters
        .into_iter()
        .enumerate()
        .map(|(id, goals)| SubtaskNode { id, goals, carried: BTreeSet::new() })
        .collect();

    // Producers of every ground atom.
    let mut producers: HashMap<&Atom, Vec<usize>> = HashMap::new();
    for (i, action) in task.actions.iter().enumerate() {
        for atom in &action.add {
            producers.entry(atom).or_default().push(i);
        }
    }

    let positive = |node: &SubtaskNode| -> BTreeSet<Atom> {
        node.goals.iter().filter(|l| !l.negated).map(|l| l.atom.clone()).collect()
    };
    let node_landmarks: Vec<BTreeSet<Atom>> =
        nodes.iter().map(|n| landmarks(&positive(n), &producers, task)).collect();

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for u in 0..nodes.len() {
        for v in 0..nodes.len() {
            if u == v {
                continue;
            }
            // u → v when establishing some goal atom of v deletes a
            // landmark u still needs.
            let interferes = positive(&nodes[v]).iter().any(|g_v| {
                producers.get(g_v).map_or(false, |achievers| {
                    achievers.iter().any(|&a| {
                        task.actions[a]
                            .del
                            .iter()
                            .any(|deleted| node_landmarks[u].contains(deleted))
                    })
                })
            });
            if interferes || prevents_interference(causal, &nodes[v], &node_landmarks[u], task) {
                edges.insert((u, v));
            }
        }
    }

    let graph = DependencyGraph { nodes, edges };
    let graph = collapse_cycles(graph);
    Ok(with_carried(graph))
}

/// Learned backstop for the static rule: when a high-confidence
/// PREVENTS triple says that producing one of v's goal atoms removes a
/// landmark predicate of u, order u first even if the ground chain
/// missed it.
fn prevents_interference(
    causal: &CausalStore,
    v: &SubtaskNode,
    u_landmarks: &BTreeSet<Atom>,
    task: &GroundTask,
) -> bool {
    use crate::causal::{Relation, TripleQuery};
    let landmark_predicates: BTreeSet<&str> =
        u_landmarks.iter().map(|a| a.predicate.as_str()).collect();
    for literal in v.goals.iter().filter(|l| !l.negated) {
        for action in &task.actions {
            if !action.add.contains(&literal.atom) {
                continue;
            }
            let prevents = causal.query(&TripleQuery {
                action: Some(action.schema.clone()),
                relation: Some(Relation::Prevents),
                min_confidence: 0.8,
                ..Default::default()
            });
            for triple in prevents {
                if let Some(atom) = triple.pattern.instantiate(&action.args) {
                    if landmark_predicates.contains(atom.predicate.as_str())
                        && u_landmarks.contains(&atom)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Collapses strongly connected components into single subtasks and
/// renumbers nodes. The result is acyclic by construction.
fn collapse_cycles(graph: DependencyGraph) -> DependencyGraph {
    let components = tarjan_scc(graph.nodes.len(), &graph.edges);
    if components.len() == graph.nodes.len() {
        return graph; // already acyclic
    }
    let mut component_of = vec![0usize; graph.nodes.len()];
    for (idx, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = idx;
        }
    }
    let mut nodes: Vec<SubtaskNode> = components
        .iter()
        .enumerate()
        .map(|(id, comp)| {
            let mut goals = BTreeSet::new();
            for &v in comp {
                goals.extend(graph.nodes[v].goals.iter().cloned());
            }
            SubtaskNode { id, goals, carried: BTreeSet::new() }
        })
        .collect();
    nodes.sort_by_key(|n| n.id);
    let mut edges = BTreeSet::new();
    for (s, d) in &graph.edges {
        let (cs, cd) = (component_of[*s], component_of[*d]);
        if cs != cd {
            edges.insert((cs, cd));
        }
    }
    DependencyGraph { nodes, edges }
}

/// Iterative Tarjan. Components come out in a deterministic order and
/// are renumbered by their smallest member to keep ids stable.
fn tarjan_scc(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, d) in edges {
        succ[*s].push(*d);
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS stack: (node, next child position).
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut dfs: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut child)) = dfs.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < succ[v].len() {
                let w = succ[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    dfs.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
                dfs.pop();
                if let Some(&mut (parent, _)) = dfs.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    components.sort_by_key(|c| c[0]);
    components
}

/// Fills each node's carried constraints with its ancestors' goals.
fn with_carried(mut graph: DependencyGraph) -> DependencyGraph {
    let ancestor_sets: Vec<BTreeSet<usize>> =
        (0..graph.nodes.len()).map(|v| graph.ancestors(v)).collect();
    for (v, ancestors) in ancestor_sets.into_iter().enumerate() {
        let mut carried = BTreeSet::new();
        for a in ancestors {
            carried.extend(graph.nodes[a].goals.iter().cloned());
        }
        graph.nodes[v].carried = carried;
    }
    graph
}

/// Per-node planning outcome.
#[derive(Debug, Clone)]
pub struct SubtaskResult {
    pub node: usize,
    pub result: PlannerResult,
}

/// Plans every node wave by wave. Nodes inside a wave run in parallel;
/// each node's initial state is the projection of the global init
/// through its ancestors' plans, and its goal carries the ancestors'
/// goals forward. Per-node budget is the global budget divided by node
/// count, floored at 5 seconds.
pub fn plan_subtasks(
    graph: &DependencyGraph,
    dom: &DomainModel,
    prob: &ProblemModel,
    task: &GroundTask,
    budget: Duration,
    run_dir: Option<&Path>,
) -> Result<Vec<SubtaskResult>, DecompositionError> {
    let node_budget = budget
        .checked_div(graph.nodes.len().max(1) as u32)
        .unwrap_or(MIN_NODE_BUDGET)
        .max(MIN_NODE_BUDGET);
    let mut plans: BTreeMap<usize, Plan> = BTreeMap::new();
    let mut results = Vec::with_capacity(graph.nodes.len());

    for wave in graph.waves() {
        let prepared: Vec<(usize, ProblemModel)> = wave
            .iter()
            .map(|&v| {
                let sub = subtask_problem(graph, v, prob, &plans);
                (v, sub)
            })
            .collect();

        if let Some(dir) = run_dir {
            std::fs::create_dir_all(dir)?;
            for (v, sub) in &prepared {
                std::fs::write(dir.join(format!("node-{v}.domain.pddl")), serialize_domain(dom))?;
                std::fs::write(
                    dir.join(format!("node-{v}.problem.pddl")),
                    serialize_problem(sub),
                )?;
            }
        }

        let wave_results: Vec<(usize, Result<PlannerResult, PlannerError>)> = prepared
            .par_iter()
            .map(|(v, sub)| {
                let cfg = SearchConfig::optimal().with_budget(node_budget);
                (*v, solve_grounded(sub, task, &cfg))
            })
            .collect();

        for (v, result) in wave_results {
            let result = result?;
            match (&result.status, &result.plan) {
                (SolveStatus::Solved, Some(plan)) => {
                    plans.insert(v, plan.clone());
                }
                (status, _) => {
                    return Err(DecompositionError::NodeFailed { node: v, status: *status })
                }
            }
            results.push(SubtaskResult { node: v, result });
        }
    }
    results.sort_by_key(|r| r.node);
    Ok(results)
}

/// Sub-problem for one node: projected init plus own ∪ carried goals.
fn subtask_problem(
    graph: &DependencyGraph,
    v: usize,
    prob: &ProblemModel,
    plans: &BTreeMap<usize, Plan>,
) -> ProblemModel {
    let mut state = State::from_problem(prob);
    // Ancestors in topological order so projection follows merge order.
    for u in graph.topological_order() {
        if u != v && graph.ancestors(v).contains(&u) {
            if let Some(plan) = plans.get(&u) {
                for action in &plan.actions {
                    state = crate::state::apply_unchecked(&state, action);
                }
            }
        }
    }
    let node = &graph.nodes[v];
    let mut goal = node.goals.clone();
    goal.extend(node.carried.iter().cloned());
    ProblemModel {
        name: format!("{}-node-{v}", prob.name),
        domain_name: prob.domain_name.clone(),
        objects: prob.objects.clone(),
        init: state.into_atoms(),
        goal,
    }
}

/// Topological concatenation of sub-plans. The merged plan must pass
/// full-problem validation or the offending node is reported.
pub fn merge(
    graph: &DependencyGraph,
    sub_plans: &BTreeMap<usize, Plan>,
    prob: &ProblemModel,
) -> Result<Plan, DecompositionError> {
    let order = graph.topological_order();
    let mut actions = Vec::new();
    let mut owner = Vec::new(); // merged step index -> node
    for v in &order {
        let plan = &sub_plans[v];
        for action in &plan.actions {
            actions.push(action.clone());
            owner.push(*v);
        }
    }
    let merged = Plan::new(actions, PlanSource::Builtin);
    let trace = validate_plan(prob, &merged);
    if trace.outcome.is_goal_satisfied() {
        return Ok(merged);
    }
    let step = match &trace.outcome {
        crate::state::TraceOutcome::Failed { step, .. } => *step,
        _ => unreachable!(),
    };
    let node = owner.get(step - 1).copied().unwrap_or_else(|| {
        // Goal miss after all steps executed: blame the last node.
        order.last().copied().unwrap_or(0)
    });
    Err(DecompositionError::MergeInvalid { step, node })
}

/// Full decomposition pipeline with one re-planning repair per node:
/// decompose, plan waves, merge; on merge failure re-plan the offending
/// node from its true intermediate state.
pub fn decompose_and_solve(
    dom: &DomainModel,
    prob: &ProblemModel,
    task: &GroundTask,
    causal: &CausalStore,
    budget: Duration,
    run_dir: Option<&Path>,
) -> Result<(DependencyGraph, Plan, Vec<SubtaskResult>), DecompositionError> {
    let graph = decompose(prob, task, causal)?;
    let results = plan_subtasks(&graph, dom, prob, task, budget, run_dir)?;
    let mut plans: BTreeMap<usize, Plan> = results
        .iter()
        .map(|r| (r.node, r.result.plan.clone().expect("solved nodes carry plans")))
        .collect();

    let mut repaired: HashSet<usize> = HashSet::new();
    loop {
        match merge(&graph, &plans, prob) {
            Ok(plan) => return Ok((graph, plan, results)),
            Err(DecompositionError::MergeInvalid { step, node }) => {
                if !repaired.insert(node) {
                    return Err(DecompositionError::MergeInvalid { step, node });
                }
                // Re-plan from the true state: everything before this
                // node's segment in merge order, replayed exactly.
                let order = graph.topological_order();
                let mut state = State::from_problem(prob);
                for v in &order {
                    if *v == node {
                        break;
                    }
                    for action in &plans[v].actions {
                        state = crate::state::apply_unchecked(&state, action);
                    }
                }
                let node_ref = &graph.nodes[node];
                let mut goal = node_ref.goals.clone();
                goal.extend(node_ref.carried.iter().cloned());
                let sub = ProblemModel {
                    name: format!("{}-repair-{node}", prob.name),
                    domain_name: prob.domain_name.clone(),
                    objects: prob.objects.clone(),
                    init: state.into_atoms(),
                    goal,
                };
                let cfg = SearchConfig::optimal().with_budget(
                    budget
                        .checked_div(graph.nodes.len().max(1) as u32)
                        .unwrap_or(MIN_NODE_BUDGET)
                        .max(MIN_NODE_BUDGET),
                );
                let result = solve_grounded(&sub, task, &cfg)?;
                match (result.status, result.plan) {
                    (SolveStatus::Solved, Some(plan)) => {
                        plans.insert(node, plan);
                    }
                    (status, _) => {
                        return Err(DecompositionError::NodeFailed { node, status })
                    }
                }
            }
            Err(other) => return Err(other),
        }
    }
}
