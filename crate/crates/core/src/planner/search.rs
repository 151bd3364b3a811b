//! Forward search over a packed task encoding.
//!
//! Atoms are interned to `u32` ids; states are sorted id slices keyed
//! directly in the closed set. Cost model is unit per action.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::pddl::{GroundTask, ProblemModel};
use crate::state::{Plan, PlanSource};

use super::heuristic::RelaxedTable;
use super::{Heuristic, PlannerResult, SearchConfig, SearchMode, SolveStatus};

/// Ground task compiled to atom ids.
pub(crate) struct PackedTask {
    pub pre_pos: Vec<Vec<u32>>,
    pub pre_neg: Vec<Vec<u32>>,
    pub add: Vec<Vec<u32>>,
    pub del: Vec<Vec<u32>>,
    pub init: Vec<u32>,
    pub goal_pos: Vec<u32>,
    pub goal_neg: Vec<u32>,
    pub atom_count: usize,
}

impl PackedTask {
    pub fn compile(prob: &ProblemModel, task: &GroundTask) -> Self {
        fn id(task: &GroundTask, atom: &crate::pddl::Atom) -> u32 {
            task.atom_id(atom).expect("atom in universe") as u32
        }
        // BTreeSet iteration keeps ids sorted, matching canonical atom order.
        let pack = |set: &std::collections::BTreeSet<crate::pddl::Atom>| -> Vec<u32> {
            set.iter().map(|a| id(task, a)).collect()
        };
        let mut packed = PackedTask {
            pre_pos: Vec::with_capacity(task.actions.len()),
            pre_neg: Vec::with_capacity(task.actions.len()),
            add: Vec::with_capacity(task.actions.len()),
            del: Vec::with_capacity(task.actions.len()),
            init: prob.init.iter().map(|a| id(task, a)).collect(),
            goal_pos: prob
                .goal
                .iter()
                .filter(|l| !l.negated)
                .map(|l| id(task, &l.atom))
                .collect(),
            goal_neg: prob
                .goal
                .iter()
                .filter(|l| l.negated)
                .map(|l| id(task, &l.atom))
                .collect(),
            atom_count: task.atoms.len(),
        };
        for action in &task.actions {
            packed.pre_pos.push(pack(&action.pre_pos));
            packed.pre_neg.push(pack(&action.pre_neg));
            packed.add.push(pack(&action.add));
            packed.del.push(pack(&action.del));
        }
        packed.init.sort_unstable();
        packed
    }

    pub fn applicable(&self, state: &[u32], action: usize) -> bool {
        self.pre_pos[action].iter().all(|a| state.binary_search(a).is_ok())
            && self.pre_neg[action].iter().all(|a| state.binary_search(a).is_err())
    }

    pub fn apply(&self, state: &[u32], action: usize) -> Box<[u32]> {
        let mut next: Vec<u32> = state
            .iter()
            .copied()
            .filter(|a| self.del[action].binary_search(a).is_err())
            .collect();
        for &a in &self.add[action] {
            if let Err(pos) = next.binary_search(&a) {
                next.insert(pos, a);
            }
        }
        next.into_boxed_slice()
    }

    pub fn goal_satisfied(&self, state: &[u32]) -> bool {
        self.goal_pos.iter().all(|a| state.binary_search(a).is_ok())
            && self.goal_neg.iter().all(|a| state.binary_search(a).is_err())
    }
}

struct Node {
    state: Box<[u32]>,
    parent: usize,
    via_action: usize,
    depth: u32,
}

/// Runs the configured search. Callers validate the config first.
pub fn solve_task(prob: &ProblemModel, task: &GroundTask, cfg: &SearchConfig) -> PlannerResult {
    let started = Instant::now();
    let packed = PackedTask::compile(prob, task);
    let relaxed = RelaxedTable::new(&packed);

    let estimate = |state: &[u32]| -> f64 {
        match cfg.heuristic {
            Heuristic::Blind => 0.0,
            Heuristic::HAdd => relaxed.h_add(state),
            Heuristic::HMax => relaxed.h_max(state),
        }
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut closed: HashMap<Box<[u32]>, u32> = HashMap::new();
    // Min-heap on (f, insertion sequence): ties expand in insertion order.
    let mut open: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut expanded = 0usize;

    let f_value = |g: u32, h: f64, mode: SearchMode| -> Option<u64> {
        if h.is_infinite() {
            return None; // relaxed-unreachable: prune
        }
        Some(match mode {
            SearchMode::Optimal => g as u64 + h as u64,
            SearchMode::Satisficing => h as u64,
        })
    };

    let init: Box<[u32]> = packed.init.clone().into_boxed_slice();
    let h0 = estimate(&init);
    nodes.push(Node { state: init.clone(), parent: usize::MAX, via_action: usize::MAX, depth: 0 });
    match f_value(0, h0, cfg.mode) {
        Some(f) => open.push(Reverse((f, 0))),
        None => {
            return PlannerResult {
                status: SolveStatus::Unsolvable,
                plan: None,
                expanded: 0,
                wall: started.elapsed(),
            }
        }
    }

    while let Some(Reverse((_, idx))) = open.pop() {
        let (state, depth) = {
            let node = &nodes[idx];
            (node.state.clone(), node.depth)
        };
        match closed.get(&state) {
            Some(&g) if g <= depth => continue,
            _ => {}
        }
        closed.insert(state.clone(), depth);

        if packed.goal_satisfied(&state) {
            return PlannerResult {
                status: SolveStatus::Solved,
                plan: Some(extract_plan(&nodes, idx, task)),
                expanded,
                wall: started.elapsed(),
            };
        }

        expanded += 1;
        if expanded > cfg.node_cap {
            return PlannerResult {
                status: SolveStatus::CapExceeded,
                plan: None,
                expanded,
                wall: started.elapsed(),
            };
        }
        if expanded % 256 == 0 && started.elapsed() > cfg.time_budget {
            return PlannerResult {
                status: SolveStatus::Timeout,
                plan: None,
                expanded,
                wall: started.elapsed(),
            };
        }

        for action in 0..task.actions.len() {
            if !packed.applicable(&state, action) {
                continue;
            }
            let succ = packed.apply(&state, action);
            if let Some(&g) = closed.get(&succ) {
                if g <= depth + 1 {
                    continue;
                }
            }
            let h = estimate(&succ);
            let Some(f) = f_value(depth + 1, h, cfg.mode) else { continue };
            nodes.push(Node { state: succ, parent: idx, via_action: action, depth: depth + 1 });
            open.push(Reverse((f, nodes.len() - 1)));
        }
    }

    PlannerResult {
        status: SolveStatus::Unsolvable,
        plan: None,
        expanded,
        wall: started.elapsed(),
    }
}

fn extract_plan(nodes: &[Node], mut idx: usize, task: &GroundTask) -> Plan {
    let mut actions = Vec::new();
    while nodes[idx].parent != usize::MAX {
        actions.push(task.actions[nodes[idx].via_action].clone());
        idx = nodes[idx].parent;
    }
    actions.reverse();
    Plan::new(actions, PlanSource::Builtin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::{ground, parse_domain, parse_problem, GroundingOptions};
    use crate::planner::SearchConfig;

    fn solve_fixture(domain: &str, problem: &str, cfg: &SearchConfig) -> PlannerResult {
        let dom = parse_domain(domain).unwrap();
        let prob = parse_problem(problem, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        solve_task(&prob, &task, cfg)
    }

    #[test]
    fn sussman_optimal_is_six() {
        let result = solve_fixture(
            fixtures::BLOCKSWORLD_DOMAIN,
            fixtures::BLOCKSWORLD_SUSSMAN,
            &SearchConfig::optimal(),
        );
        assert_eq!(result.status, SolveStatus::Solved);
        assert_eq!(result.plan.unwrap().len(), 6);
    }

    #[test]
    fn gripper_two_balls_optimal_is_five() {
        let result = solve_fixture(
            fixtures::GRIPPER_DOMAIN,
            fixtures::GRIPPER_PROBLEM,
            &SearchConfig::optimal(),
        );
        assert_eq!(result.status, SolveStatus::Solved);
        assert_eq!(result.plan.unwrap().len(), 5);
    }

    #[test]
    fn satisfied_goal_solves_with_empty_plan() {
        let dom = parse_domain(fixtures::BLOCKSWORLD_DOMAIN).unwrap();
        let text = "(define (problem trivial) (:domain blocksworld)
          (:objects a - block) (:init (ontable a) (clear a) (handempty))
          (:goal (ontable a)))";
        let prob = parse_problem(text, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        let result = solve_task(&prob, &task, &SearchConfig::optimal());
        assert_eq!(result.status, SolveStatus::Solved);
        assert!(result.plan.unwrap().is_empty());
        assert!(result.expanded <= 1);
    }

    #[test]
    fn unreachable_goal_is_unsolvable() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let text = "(define (problem stuck) (:domain gripper)
          (:objects rooma roomb - room ball1 - ball robot1 - robot left - gripper)
          (:init (at ball1 rooma))           ; robot is nowhere: nothing can move
          (:goal (at ball1 roomb)))";
        let prob = parse_problem(text, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        let result = solve_task(&prob, &task, &SearchConfig::optimal());
        assert_eq!(result.status, SolveStatus::Unsolvable);
    }

    #[test]
    fn determinism_same_plan_twice() {
        let a = solve_fixture(
            fixtures::BLOCKSWORLD_DOMAIN,
            fixtures::BLOCKSWORLD_SUSSMAN,
            &SearchConfig::optimal(),
        );
        let b = solve_fixture(
            fixtures::BLOCKSWORLD_DOMAIN,
            fixtures::BLOCKSWORLD_SUSSMAN,
            &SearchConfig::optimal(),
        );
        assert_eq!(a.plan, b.plan);
        assert_eq!(a.expanded, b.expanded);
    }

    #[test]
    fn satisficing_finds_valid_plans_on_all_fixtures() {
        for fixture in fixtures::ALL {
            let dom = parse_domain(fixture.domain).unwrap();
            let prob = parse_problem(fixture.problem, &dom).unwrap();
            let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
            let result = solve_task(&prob, &task, &SearchConfig::satisficing());
            assert_eq!(result.status, SolveStatus::Solved, "{}", fixture.name);
            let plan = result.plan.unwrap();
            assert!(plan.len() >= fixture.optimal_length, "{}", fixture.name);
            let trace = crate::state::validate_plan(&prob, &plan);
            assert!(trace.outcome.is_goal_satisfied(), "{}", fixture.name);
        }
    }

    #[test]
    fn node_cap_is_reported() {
        let cfg = SearchConfig { node_cap: 2, ..SearchConfig::optimal() };
        let result =
            solve_fixture(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKSWORLD_SUSSMAN, &cfg);
        assert_eq!(result.status, SolveStatus::CapExceeded);
    }
}
