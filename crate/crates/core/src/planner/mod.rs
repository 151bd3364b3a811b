//! Plan synthesis: built-in forward state-space search plus the
//! file-based adapter for external classical planners.
//!
//! The optimal mode runs A* under an admissible heuristic (unit action
//! costs), the satisficing mode runs greedy best-first search on the
//! additive delete-relaxation heuristic. Both are deterministic: equal
//! f-values expand in insertion order and successors are generated in
//! canonical ground-action order, so a fixed config on a fixed input
//! always yields the same plan.

mod external;
mod heuristic;
mod search;

pub use external::{solve_external, ExitCodeMap, ExternalPlannerConfig};
pub use heuristic::{h_add, h_max};
pub use search::solve_task;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{ground, DomainModel, GroundError, GroundTask, GroundingOptions, ProblemModel};
use crate::state::{validate_plan, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    Optimal,
    Satisficing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heuristic {
    Blind,
    HAdd,
    HMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub heuristic: Heuristic,
    pub node_cap: usize,
    pub time_budget: Duration,
}

impl SearchConfig {
    pub fn optimal() -> Self {
        SearchConfig {
            mode: SearchMode::Optimal,
            heuristic: Heuristic::HMax,
            node_cap: 1_000_000,
            time_budget: Duration::from_secs(300),
        }
    }

    pub fn satisficing() -> Self {
        SearchConfig {
            mode: SearchMode::Satisficing,
            heuristic: Heuristic::HAdd,
            node_cap: 1_000_000,
            time_budget: Duration::from_secs(300),
        }
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.time_budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), PlannerError> {
        if self.node_cap == 0 {
            return Err(PlannerError::InvalidConfig("node cap must be positive".into()));
        }
        if self.time_budget.is_zero() {
            return Err(PlannerError::InvalidConfig("time budget must be positive".into()));
        }
        if self.mode == SearchMode::Optimal && self.heuristic == Heuristic::HAdd {
            return Err(PlannerError::InvalidConfig(
                "h_add is inadmissible; optimal mode requires blind or h_max".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Solved,
    Unsolvable,
    Timeout,
    CapExceeded,
}

/// Search outcome. `plan` is present exactly when `status` is `Solved`,
/// and every returned plan has passed `validate_plan`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerResult {
    pub status: SolveStatus,
    pub plan: Option<Plan>,
    pub expanded: usize,
    pub wall: Duration,
}

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grounding(#[from] GroundError),
    #[error("external planner executable not found: {0}")]
    ExecutableMissing(String),
    #[error("external planner failed with exit code {code:?}: {stderr}")]
    ExternalFailure { code: Option<i32>, stderr: String },
    #[error("external planner emitted an invalid plan: {0}")]
    ExternalInvalidPlan(String),
    #[error("external plan file unreadable: {0}")]
    PlanFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Grounds the task and searches it with the built-in engine.
pub fn solve(
    dom: &DomainModel,
    prob: &ProblemModel,
    cfg: &SearchConfig,
) -> Result<PlannerResult, PlannerError> {
    let task = ground(dom, prob, &GroundingOptions::default())?;
    solve_grounded(prob, &task, cfg)
}

/// Searches an already-grounded task.
pub fn solve_grounded(
    prob: &ProblemModel,
    task: &GroundTask,
    cfg: &SearchConfig,
) -> Result<PlannerResult, PlannerError> {
    cfg.validate()?;
    let result = solve_task(prob, task, cfg);
    if let Some(plan) = &result.plan {
        let trace = validate_plan(prob, plan);
        assert!(
            trace.outcome.is_goal_satisfied(),
            "search returned a plan that fails validation: {}",
            trace.outcome
        );
    }
    Ok(result)
}
