//! File-based adapter for external classical planners.
//!
//! The contract is deliberately loose: a command template with
//! `{domain}`, `{problem}`, `{plan_out}` and `{budget}` placeholders, a
//! plan file of `(name args)` lines, and a configurable exit-code map.
//! Plans coming back are re-validated symbolically before they are ever
//! reported as solved.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::pddl::{
    ground, serialize_domain, serialize_problem, DomainModel, GroundingOptions, ProblemModel,
};
use crate::state::{parse_plan, validate_plan, PlanSource};

use super::{PlannerError, PlannerResult, SolveStatus};

/// Maps process exit codes onto solver outcomes. Codes in neither list
/// are treated as hard failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitCodeMap {
    pub solved: Vec<i32>,
    pub unsolvable: Vec<i32>,
}

impl Default for ExitCodeMap {
    fn default() -> Self {
        // Fast Downward driver convention: 0 = plan found,
        // 11/12 = proved unsolvable / search exhausted incomplete.
        ExitCodeMap { solved: vec![0], unsolvable: vec![11, 12] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalPlannerConfig {
    pub name: String,
    /// Command template; split on whitespace, placeholders substituted
    /// per token.
    pub command: String,
    pub exit_codes: ExitCodeMap,
}

impl ExternalPlannerConfig {
    /// Fast Downward, optimal portfolio configuration.
    pub fn seq_opt_fdss_1() -> Self {
        ExternalPlannerConfig {
            name: "seq-opt-fdss-1".into(),
            command: "fast-downward.py --alias seq-opt-fdss-1 --overall-time-limit {budget}s \
                      --plan-file {plan_out} {domain} {problem}"
                .into(),
            exit_codes: ExitCodeMap::default(),
        }
    }

    /// Fast Downward, satisficing LAMA configuration.
    pub fn lama() -> Self {
        ExternalPlannerConfig {
            name: "lama".into(),
            command: "fast-downward.py --alias lama --overall-time-limit {budget}s \
                      --plan-file {plan_out} {domain} {problem}"
                .into(),
            exit_codes: ExitCodeMap::default(),
        }
    }
}

/// Writes canonical domain/problem files into `work_dir`, invokes the
/// external planner and parses + validates its plan file.
pub fn solve_external(
    dom: &DomainModel,
    prob: &ProblemModel,
    cfg: &ExternalPlannerConfig,
    budget: Duration,
    work_dir: &Path,
) -> Result<PlannerResult, PlannerError> {
    let started = Instant::now();
    std::fs::create_dir_all(work_dir)?;
    let domain_path = work_dir.join("domain.pddl");
    let problem_path = work_dir.join("problem.pddl");
    let plan_path = work_dir.join("plan.txt");
    std::fs::write(&domain_path, serialize_domain(dom))?;
    std::fs::write(&problem_path, serialize_problem(prob))?;

    let budget_secs = budget.as_secs().max(1).to_string();
    let tokens: Vec<String> = cfg
        .command
        .split_whitespace()
        .map(|tok| {
            tok.replace("{domain}", &domain_path.to_string_lossy())
                .replace("{problem}", &problem_path.to_string_lossy())
                .replace("{plan_out}", &plan_path.to_string_lossy())
                .replace("{budget}", &budget_secs)
        })
        .collect();
    let (program, args) = tokens.split_first().ok_or_else(|| {
        PlannerError::InvalidConfig("external planner command template is empty".into())
    })?;

    let output = Command::new(program).args(args).output().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            PlannerError::ExecutableMissing(program.clone())
        } else {
            PlannerError::Io(e)
        }
    })?;

    let code = output.status.code();
    let solved = code.map_or(false, |c| cfg.exit_codes.solved.contains(&c));
    let unsolvable = code.map_or(false, |c| cfg.exit_codes.unsolvable.contains(&c));

    if unsolvable {
        return Ok(PlannerResult {
            status: SolveStatus::Unsolvable,
            plan: None,
            expanded: 0,
            wall: started.elapsed(),
        });
    }
    if !solved {
        return Err(PlannerError::ExternalFailure {
            code,
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        });
    }

    let plan_text = std::fs::read_to_string(&plan_path)
        .map_err(|e| PlannerError::PlanFile(format!("{}: {e}", plan_path.display())))?;
    let task = ground(dom, prob, &GroundingOptions::default())?;
    let plan = parse_plan(&plan_text, &task, PlanSource::External)
        .map_err(|e| PlannerError::ExternalInvalidPlan(e.to_string()))?;

    let trace = validate_plan(prob, &plan);
    if !trace.outcome.is_goal_satisfied() {
        return Err(PlannerError::ExternalInvalidPlan(trace.outcome.to_string()));
    }

    Ok(PlannerResult {
        status: SolveStatus::Solved,
        plan: Some(plan),
        expanded: 0,
        wall: started.elapsed(),
    })
}
