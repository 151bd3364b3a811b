//! Delete-relaxation heuristics.
//!
//! `h_add` sums the relaxed costs of the goal atoms (inadmissible,
//! drives the satisficing search); `h_max` takes their maximum
//! (admissible and consistent, drives the optimal search). Negative
//! goal literals are ignored by the relaxation.

use std::collections::BTreeSet;
use std::collections::HashMap;

use crate::pddl::{Atom, GroundAction, GroundLiteral};
use crate::state::State;

use super::search::PackedTask;

/// Fixpoint over relaxed actions: cost of an atom is 0 when true in the
/// state, otherwise the cheapest `1 + combine(preconditions)` over its
/// achievers. `sum` selects additive vs max combination.
fn relaxed_costs(
    pre: &[Vec<u32>],
    add: &[Vec<u32>],
    atom_count: usize,
    state: &[u32],
    sum: bool,
) -> Vec<f64> {
    let mut cost = vec![f64::INFINITY; atom_count];
    for &a in state {
        cost[a as usize] = 0.0;
    }
    loop {
        let mut changed = false;
        for (action_pre, action_add) in pre.iter().zip(add) {
            let mut combined = 0.0f64;
            for &p in action_pre {
                let c = cost[p as usize];
                if c.is_infinite() {
                    combined = f64::INFINITY;
                    break;
                }
                combined = if sum { combined + c } else { combined.max(c) };
            }
            if combined.is_infinite() {
                continue;
            }
            let action_cost = 1.0 + combined;
            for &a in action_add {
                if action_cost < cost[a as usize] {
                    cost[a as usize] = action_cost;
                    changed = true;
                }
            }
        }
        if !changed {
            return cost;
        }
    }
}

/// Relaxation context over a packed task, reused across expansions.
pub(crate) struct RelaxedTable<'a> {
    task: &'a PackedTask,
}

impl<'a> RelaxedTable<'a> {
    pub fn new(task: &'a PackedTask) -> Self {
        RelaxedTable { task }
    }

    fn goal_value(&self, cost: &[f64], sum: bool) -> f64 {
        let mut total = 0.0f64;
        for &g in &self.task.goal_pos {
            let c = cost[g as usize];
            if c.is_infinite() {
                return f64::INFINITY;
            }
            total = if sum { total + c } else { total.max(c) };
        }
        total
    }

    pub fn h_add(&self, state: &[u32]) -> f64 {
        let cost =
            relaxed_costs(&self.task.pre_pos, &self.task.add, self.task.atom_count, state, true);
        self.goal_value(&cost, true)
    }

    pub fn h_max(&self, state: &[u32]) -> f64 {
        let cost =
            relaxed_costs(&self.task.pre_pos, &self.task.add, self.task.atom_count, state, false);
        self.goal_value(&cost, false)
    }
}

fn public_estimate(
    state: &State,
    goal: &BTreeSet<GroundLiteral>,
    ground: &[GroundAction],
    sum: bool,
) -> f64 {
    // Intern every atom mentioned by the state, the goal or any action.
    let mut index: HashMap<&Atom, u32> = HashMap::new();
    let mut atoms: Vec<&Atom> = Vec::new();
    for a in state.atoms() {
        atoms.push(a);
    }
    for l in goal {
        atoms.push(&l.atom);
    }
    for action in ground {
        atoms.extend(action.pre_pos.iter());
        atoms.extend(action.add.iter());
    }
    atoms.sort_unstable();
    atoms.dedup();
    for (i, a) in atoms.iter().enumerate() {
        index.insert(a, i as u32);
    }

    let pre: Vec<Vec<u32>> = ground
        .iter()
        .map(|a| a.pre_pos.iter().map(|atom| index[atom]).collect())
        .collect();
    let add: Vec<Vec<u32>> = ground
        .iter()
        .map(|a| a.add.iter().map(|atom| index[atom]).collect())
        .collect();
    let state_ids: Vec<u32> = state.atoms().map(|a| index[a]).collect();
    let cost = relaxed_costs(&pre, &add, atoms.len(), &state_ids, sum);

    let mut total = 0.0f64;
    for l in goal.iter().filter(|l| !l.negated) {
        let c = cost[index[&l.atom] as usize];
        if c.is_infinite() {
            return f64::INFINITY;
        }
        total = if sum { total + c } else { total.max(c) };
    }
    total
}

/// Additive delete-relaxation estimate of reaching `goal` from `state`.
/// Returns 0 when the positive goal atoms already hold and infinity when
/// the goal is relaxed-unreachable.
pub fn h_add(state: &State, goal: &BTreeSet<GroundLiteral>, ground: &[GroundAction]) -> f64 {
    public_estimate(state, goal, ground, true)
}

/// Max variant of the delete relaxation; admissible under unit costs.
pub fn h_max(state: &State, goal: &BTreeSet<GroundLiteral>, ground: &[GroundAction]) -> f64 {
    public_estimate(state, goal, ground, false)
}
