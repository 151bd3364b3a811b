//! Symbolic execution: states, plans and execution traces.
//!
//! Everything here is pure. States are closed-world atom sets; applying
//! an action never mutates its input, and plan validation is a
//! deterministic simulation whose failures are encoded in the trace
//! outcome rather than raised as errors.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{parse_sexpr, Atom, GroundAction, GroundLiteral, GroundTask, ProblemModel, SExpr};

/// Closed-world state: a set of true ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State(BTreeSet<Atom>);

impl State {
    pub fn new(atoms: BTreeSet<Atom>) -> Self {
        State(atoms)
    }

    pub fn from_problem(prob: &ProblemModel) -> Self {
        State(prob.init.clone())
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn satisfies(&self, literal: &GroundLiteral) -> bool {
        self.contains(&literal.atom) != literal.negated
    }

    pub fn satisfies_all<'a>(&self, literals: impl IntoIterator<Item = &'a GroundLiteral>) -> bool {
        literals.into_iter().all(|l| self.satisfies(l))
    }

    pub fn into_atoms(self) -> BTreeSet<Atom> {
        self.0
    }
}

impl FromIterator<Atom> for State {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        State(iter.into_iter().collect())
    }
}

/// Where a plan came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanSource {
    Builtin,
    External,
    Generated,
}

/// Ordered action sequence. Cost equals length (unit action costs).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub actions: Vec<GroundAction>,
    pub source: PlanSource,
}

impl Plan {
    pub fn new(actions: Vec<GroundAction>, source: PlanSource) -> Self {
        Plan { actions, source }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn cost(&self) -> usize {
        self.actions.len()
    }

    /// IPC plan file body: one `(name args)` line per action.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.actions {
            out.push_str(&a.display_form());
            out.push('\n');
        }
        out
    }
}

/// Errors raised by the execution layer.
#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("action {action} is not applicable: unsatisfied precondition {literal}")]
    Inapplicable { action: String, literal: String },
    #[error("plan line {line}: {msg}")]
    PlanFormat { line: usize, msg: String },
    #[error("plan line {line}: unknown ground action {action}")]
    UnknownAction { line: usize, action: String },
    #[error("trace is internally inconsistent at step {step}: {msg}")]
    InconsistentTrace { step: usize, msg: String },
}

/// True iff positive preconditions hold and negated ones are absent.
pub fn applicable(state: &State, action: &GroundAction) -> bool {
    action.pre_pos.iter().all(|a| state.contains(a))
        && action.pre_neg.iter().all(|a| !state.contains(a))
}

/// First violated precondition in canonical atom order, if any.
/// Positive preconditions are checked before negated ones.
pub fn first_violation(state: &State, action: &GroundAction) -> Option<GroundLiteral> {
    for atom in &action.pre_pos {
        if !state.contains(atom) {
            return Some(GroundLiteral { atom: atom.clone(), negated: false });
        }
    }
    for atom in &action.pre_neg {
        if state.contains(atom) {
            return Some(GroundLiteral { atom: atom.clone(), negated: true });
        }
    }
    None
}

/// Successor state `(s \ del) ∪ add`. The input state is untouched.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, EngineError> {
    if let Some(literal) = first_violation(state, action) {
        return Err(EngineError::Inapplicable {
            action: action.display_form(),
            literal: literal.to_string(),
        });
    }
    Ok(apply_unchecked(state, action))
}

/// Effect application without the applicability check; used by
/// simulation code that has already established applicability.
pub fn apply_unchecked(state: &State, action: &GroundAction) -> State {
    let mut atoms = state.0.clone();
    for atom in &action.del {
        atoms.remove(atom);
    }
    for atom in &action.add {
        atoms.insert(atom.clone());
    }
    State(atoms)
}

/// Why a simulation stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceOutcome {
    GoalSatisfied,
    /// 1-based step index plus the violated precondition or, when every
    /// step applied but the goal does not hold, the unmet goal literal.
    Failed { step: usize, violated: GroundLiteral },
}

impl TraceOutcome {
    pub fn is_goal_satisfied(&self) -> bool {
        matches!(self, TraceOutcome::GoalSatisfied)
    }
}

/// One executed (or attempted) step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub action: GroundAction,
    pub pre: State,
    pub post: State,
}

/// Full record of a plan simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub initial: State,
    pub steps: Vec<TraceStep>,
    pub terminal: State,
    pub outcome: TraceOutcome,
    /// The action that failed its applicability check, when the outcome
    /// is a step failure. It never executed, so it has no trace step.
    pub failed_action: Option<GroundAction>,
}

impl ExecutionTrace {
    /// Re-derives every recorded post-state from its pre-state and
    /// checks the chaining invariant between consecutive steps.
    pub fn check_consistency(&self) -> Result<(), EngineError> {
        let mut prev = &self.initial;
        for (i, step) in self.steps.iter().enumerate() {
            if &step.pre != prev {
                return Err(EngineError::InconsistentTrace {
                    step: i + 1,
                    msg: "pre-state does not chain from the previous step".into(),
                });
            }
            let expected = apply_unchecked(&step.pre, &step.action);
            if expected != step.post {
                return Err(EngineError::InconsistentTrace {
                    step: i + 1,
                    msg: "post-state does not equal (pre \\ del) ∪ add".into(),
                });
            }
            prev = &step.post;
        }
        if prev != &self.terminal {
            return Err(EngineError::InconsistentTrace {
                step: self.steps.len(),
                msg: "terminal state does not match the last post-state".into(),
            });
        }
        Ok(())
    }
}

/// Simulates `plan` from the problem's initial state.
///
/// The trace records executed steps only; a step that fails its
/// applicability check terminates the simulation with a
/// `Failed { step, violated }` outcome, and an executable plan that
/// misses the goal fails at step `len + 1` on the first unmet goal
/// literal in canonical order.
pub fn validate_plan(prob: &ProblemModel, plan: &Plan) -> ExecutionTrace {
    let initial = State::from_problem(prob);
    let mut current = initial.clone();
    let mut steps = Vec::with_capacity(plan.len());

    for (i, action) in plan.actions.iter().enumerate() {
        if let Some(violated) = first_violation(&current, action) {
            return ExecutionTrace {
                initial,
                steps,
                terminal: current,
                outcome: TraceOutcome::Failed { step: i + 1, violated },
                failed_action: Some(action.clone()),
            };
        }
        let post = apply_unchecked(&current, action);
        steps.push(TraceStep { action: action.clone(), pre: current, post: post.clone() });
        current = post;
    }

    let unmet = prob.goal.iter().find(|l| !current.satisfies(l));
    let outcome = match unmet {
        None => TraceOutcome::GoalSatisfied,
        Some(literal) => {
            TraceOutcome::Failed { step: plan.len() + 1, violated: literal.clone() }
        }
    };
    ExecutionTrace { initial, steps, terminal: current, outcome, failed_action: None }
}

/// Parses an IPC plan file (`(name args)` lines, `;` comments) against
/// the ground action set.
pub fn parse_plan(text: &str, task: &GroundTask, source: PlanSource) -> Result<Plan, EngineError> {
    let mut actions = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let expr = parse_sexpr(line).map_err(|e| EngineError::PlanFormat {
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        let items = match &expr {
            SExpr::List { items, .. } => items,
            SExpr::Sym { .. } => {
                return Err(EngineError::PlanFormat {
                    line: lineno + 1,
                    msg: "expected an (action args) form".into(),
                })
            }
        };
        let mut parts = Vec::with_capacity(items.len());
        for item in items {
            match item.as_sym() {
                Some(s) => parts.push(s.to_string()),
                None => {
                    return Err(EngineError::PlanFormat {
                        line: lineno + 1,
                        msg: "nested lists are not allowed in a plan line".into(),
                    })
                }
            }
        }
        if parts.is_empty() {
            return Err(EngineError::PlanFormat { line: lineno + 1, msg: "empty action".into() });
        }
        let name = parts.remove(0);
        let idx = task.action_index(&name, &parts).ok_or_else(|| EngineError::UnknownAction {
            line: lineno + 1,
            action: format!("({} {})", name, parts.join(" ")),
        })?;
        actions.push(task.actions[idx].clone());
    }
    Ok(Plan::new(actions, source))
}

/// One record of the line-delimited trace log.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceRecord {
    Init { state: Vec<String> },
    Step { action: String, pre: Vec<String>, post: Vec<String> },
    Outcome {
        goal_satisfied: bool,
        failed_step: Option<usize>,
        violated: Option<String>,
        failed_action: Option<String>,
    },
}

fn atoms_to_strings(state: &State) -> Vec<String> {
    state.atoms().map(|a| a.to_string()).collect()
}

/// Serializes a trace as a line-delimited structured log.
pub fn trace_to_log(trace: &ExecutionTrace) -> String {
    let mut out = String::new();
    let mut push = |record: &TraceRecord| {
        out.push_str(&serde_json::to_string(record).expect("trace record serializes"));
        out.push('\n');
    };
    push(&TraceRecord::Init { state: atoms_to_strings(&trace.initial) });
    for step in &trace.steps {
        push(&TraceRecord::Step {
            action: step.action.display_form(),
            pre: atoms_to_strings(&step.pre),
            post: atoms_to_strings(&step.post),
        });
    }
    let (goal_satisfied, failed_step, violated) = match &trace.outcome {
        TraceOutcome::GoalSatisfied => (true, None, None),
        TraceOutcome::Failed { step, violated } => {
            (false, Some(*step), Some(violated.to_string()))
        }
    };
    push(&TraceRecord::Outcome {
        goal_satisfied,
        failed_step,
        violated,
        failed_action: trace.failed_action.as_ref().map(|a| a.display_form()),
    });
    out
}

fn parse_atom_line(text: &str, line: usize) -> Result<Atom, EngineError> {
    let expr = parse_sexpr(text)
        .map_err(|e| EngineError::PlanFormat { line, msg: e.to_string() })?;
    crate::pddl::parse_ground_atom(&expr)
        .map_err(|e| EngineError::PlanFormat { line, msg: e.to_string() })
}

/// Reads a trace log back. Actions are resolved against the ground set
/// so the loaded trace carries full effect information.
pub fn trace_from_log(text: &str, task: &GroundTask) -> Result<ExecutionTrace, EngineError> {
    let mut initial = None;
    let mut steps = Vec::new();
    let mut outcome = None;
    let mut failed_action = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let record: TraceRecord = serde_json::from_str(line).map_err(|e| {
            EngineError::PlanFormat { line: lineno + 1, msg: e.to_string() }
        })?;
        match record {
            TraceRecord::Init { state } => {
                let atoms = state
                    .iter()
                    .map(|s| parse_atom_line(s, lineno + 1))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                initial = Some(State::new(atoms));
            }
            TraceRecord::Step { action, pre, post } => {
                let plan = parse_plan(&action, task, PlanSource::External)?;
                let action = plan.actions.into_iter().next().ok_or_else(|| {
                    EngineError::PlanFormat { line: lineno + 1, msg: "empty step action".into() }
                })?;
                let pre = pre
                    .iter()
                    .map(|s| parse_atom_line(s, lineno + 1))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                let post = post
                    .iter()
                    .map(|s| parse_atom_line(s, lineno + 1))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                steps.push(TraceStep { action, pre: State::new(pre), post: State::new(post) });
            }
            TraceRecord::Outcome { goal_satisfied, failed_step, violated, failed_action: fa } => {
                if let Some(text) = fa {
                    let plan = parse_plan(&text, task, PlanSource::External)?;
                    failed_action = plan.actions.into_iter().next();
                }
                outcome = Some(if goal_satisfied {
                    TraceOutcome::GoalSatisfied
                } else {
                    let step = failed_step.unwrap_or(steps.len() + 1);
                    let violated = violated.ok_or_else(|| EngineError::PlanFormat {
                        line: lineno + 1,
                        msg: "failed outcome without a violated literal".into(),
                    })?;
                    let (text, negated) = match violated.strip_prefix("(not ") {
                        Some(rest) => (rest.trim_end_matches(')').to_string() + ")", true),
                        None => (violated, false),
                    };
                    TraceOutcome::Failed {
                        step,
                        violated: GroundLiteral {
                            atom: parse_atom_line(&text, lineno + 1)?,
                            negated,
                        },
                    }
                });
            }
        }
    }

    let initial = initial.ok_or_else(|| EngineError::PlanFormat {
        line: 1,
        msg: "trace log has no init record".into(),
    })?;
    let outcome = outcome.ok_or_else(|| EngineError::PlanFormat {
        line: 1,
        msg: "trace log has no outcome record".into(),
    })?;
    let terminal = steps.last().map(|s| s.post.clone()).unwrap_or_else(|| initial.clone());
    Ok(ExecutionTrace { initial, steps, terminal, outcome, failed_action })
}

impl fmt::Display for TraceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceOutcome::GoalSatisfied => write!(f, "goal-satisfied"),
            TraceOutcome::Failed { step, violated } => {
                write!(f, "failed-at-step {step} (violated {violated})")
            }
        }
    }
}
