//! Multi-agent plan validation with reputation-weighted consensus.
//!
//! A pool of validator agents scores a candidate plan in [0, 1]; the
//! verdict is the reputation-weighted mean, approved at the 0.7
//! threshold. The shipped agents are deterministic rule-based checkers
//! so the whole suite runs without any external service; generative
//! backends plug in behind a strict reply grammar (`SCORE:` then
//! `RATIONALE:`), and a malformed reply counts as a backend failure,
//! never as a score.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causal::{CausalStore, Relation, TripleQuery};
use crate::clients::{ClientError, GenOptions, GenerativeClient};
use crate::pddl::{DomainModel, ProblemModel};
use crate::state::{validate_plan, ExecutionTrace, Plan};

pub const DEFAULT_THRESHOLD: f64 = 0.7;
pub const DEFAULT_POOL_SIZE: usize = 12;
/// PREVENTS triples at or above this confidence veto contradicting
/// steps in the causal-consistency check.
pub const PREVENTS_CONFIDENCE: f64 = 0.8;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("consensus over an empty score list")]
    EmptyScores,
    #[error("every agent backend failed")]
    AllAgentsFailed,
}

/// Deterministic rule-based backends. Each one scores 0 outright when
/// the plan is not symbolically executable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Full symbolic validity: every step applies and the goal holds.
    SymbolicValidity,
    /// Fraction of goal literals satisfied in the terminal state.
    GoalCoverage,
    /// No step may contradict a high-confidence PREVENTS triple.
    CausalConsistency,
    /// Per-domain resource sanity: no immediately-undone step pairs and
    /// a loose length budget.
    DomainHeuristics,
}

/// Agent backend: a shipped rule or an external generative client.
#[derive(Clone)]
pub enum AgentBackend {
    Rule(RuleKind),
    Generative(Arc<dyn GenerativeClient>),
}

impl std::fmt::Debug for AgentBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AgentBackend::Rule(kind) => write!(f, "Rule({kind:?})"),
            AgentBackend::Generative(c) => write!(f, "Generative({})", c.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidatorAgent {
    pub id: String,
    pub expertise: Vec<String>,
    pub reputation: f64,
    pub backend: AgentBackend,
}

impl ValidatorAgent {
    pub fn rule(id: &str, expertise: &[&str], kind: RuleKind) -> Self {
        ValidatorAgent {
            id: id.to_string(),
            expertise: expertise.iter().map(|s| s.to_string()).collect(),
            reputation: 1.0,
            backend: AgentBackend::Rule(kind),
        }
    }

    pub fn generative(id: &str, expertise: &[&str], client: Arc<dyn GenerativeClient>) -> Self {
        ValidatorAgent {
            id: id.to_string(),
            expertise: expertise.iter().map(|s| s.to_string()).collect(),
            reputation: 1.0,
            backend: AgentBackend::Generative(client),
        }
    }

    pub fn is_expert_for(&self, domain: &str) -> bool {
        self.expertise.iter().any(|d| d == domain)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentScore {
    pub agent_id: String,
    pub reputation: f64,
    pub score: f64,
    pub rationale: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub scores: Vec<AgentScore>,
    pub consensus: f64,
    pub threshold: f64,
    pub approved: bool,
}

/// Default 12-agent pool: one expert per bundled benchmark domain plus
/// six general validators, all rule-based.
pub fn default_pool() -> Vec<ValidatorAgent> {
    let mut pool = Vec::with_capacity(DEFAULT_POOL_SIZE);
    for domain in ["blocksworld", "gripper", "floortile", "storage", "rovers", "satellite"] {
        pool.push(ValidatorAgent::rule(
            &format!("expert-{domain}"),
            &[domain],
            RuleKind::DomainHeuristics,
        ));
    }
    let general_kinds = [
        RuleKind::SymbolicValidity,
        RuleKind::GoalCoverage,
        RuleKind::CausalConsistency,
        RuleKind::SymbolicValidity,
        RuleKind::GoalCoverage,
        RuleKind::CausalConsistency,
    ];
    for (i, kind) in general_kinds.iter().enumerate() {
        pool.push(ValidatorAgent::rule(&format!("general-{}", i + 1), &[], *kind));
    }
    pool
}

/// Domain experts first, then generals; within each group reputation
/// descending with id order breaking ties. Truncated to `n`.
pub fn select_agents(
    pool: &[ValidatorAgent],
    domain: &str,
    n: usize,
) -> Vec<ValidatorAgent> {
    let by_rank = |a: &ValidatorAgent, b: &ValidatorAgent| {
        b.reputation
            .partial_cmp(&a.reputation)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.id.cmp(&b.id))
    };
    let mut experts: Vec<ValidatorAgent> =
        pool.iter().filter(|a| a.is_expert_for(domain)).cloned().collect();
    let mut generals: Vec<ValidatorAgent> =
        pool.iter().filter(|a| !a.is_expert_for(domain)).cloned().collect();
    experts.sort_by(by_rank);
    generals.sort_by(by_rank);
    experts.into_iter().chain(generals).take(n).collect()
}

/// Reputation-weighted mean: Σ rᵢ·sᵢ / Σ rᵢ. Approval at `threshold`.
pub fn consensus(
    scores: &[(f64, f64)],
    threshold: f64,
) -> Result<(f64, bool), ValidationError> {
    if scores.is_empty() {
        return Err(ValidationError::EmptyScores);
    }
    let weighted: f64 = scores.iter().map(|(r, s)| r * s).sum();
    let mass: f64 = scores.iter().map(|(r, _)| r).sum();
    let value = weighted / mass;
    Ok((value, value >= threshold))
}

/// EMA reputation update toward agreement with ground truth, clamped to
/// [0.01, 1].
pub fn update_reputation(agent: &mut ValidatorAgent, agreed: bool) -> f64 {
    let target = if agreed { 1.0 } else { 0.0 };
    agent.reputation = (0.9 * agent.reputation + 0.1 * target).clamp(0.01, 1.0);
    agent.reputation
}

/// Everything an agent may look at.
pub struct ValidationContext<'a> {
    pub dom: &'a DomainModel,
    pub prob: &'a ProblemModel,
    pub plan: &'a Plan,
    pub trace: &'a ExecutionTrace,
    pub causal: &'a CausalStore,
    pub task_text: &'a str,
}

fn executable(trace: &ExecutionTrace) -> bool {
    trace.failed_action.is_none()
}

fn score_rule(kind: RuleKind, ctx: &ValidationContext<'_>) -> (f64, String) {
    if !executable(ctx.trace) {
        return (0.0, format!("plan is symbolically invalid: {}", ctx.trace.outcome));
    }
    match kind {
        RuleKind::SymbolicValidity => {
            if ctx.trace.outcome.is_goal_satisfied() {
                (1.0, "plan executes and satisfies the goal".into())
            } else {
                (0.0, format!("plan executes but misses the goal: {}", ctx.trace.outcome))
            }
        }
        RuleKind::GoalCoverage => {
            let total = ctx.prob.goal.len();
            if total == 0 {
                return (1.0, "empty goal is trivially covered".into());
            }
            let met = ctx.prob.goal.iter().filter(|l| ctx.trace.terminal.satisfies(l)).count();
            (met as f64 / total as f64, format!("{met}/{total} goal literals hold at the end"))
        }
        RuleKind::CausalConsistency => {
            let mut violations = Vec::new();
            for (i, step) in ctx.trace.steps.iter().enumerate() {
                let prevents = ctx.causal.query(&TripleQuery {
                    action: Some(step.action.schema.clone()),
                    relation: Some(Relation::Prevents),
                    min_confidence: PREVENTS_CONFIDENCE,
                    ..Default::default()
                });
                for triple in prevents {
                    if let Some(atom) = triple.pattern.instantiate(&step.action.args) {
                        if step.post.contains(&atom) {
                            violations.push(format!(
                                "step {} keeps {} despite PREVENTS knowledge",
                                i + 1,
                                atom
                            ));
                        }
                    }
                }
            }
            if violations.is_empty() {
                (1.0, "no step contradicts high-confidence causal knowledge".into())
            } else {
                (0.0, violations.join("; "))
            }
        }
        RuleKind::DomainHeuristics => {
            let mut score: f64 = 1.0;
            let mut notes = Vec::new();
            let actions = &ctx.plan.actions;
            for pair in actions.windows(2) {
                if pair[1].add == pair[0].del && pair[1].del == pair[0].add {
                    score -= 0.5;
                    notes.push(format!(
                        "{} immediately undoes {}",
                        pair[1].display_form(),
                        pair[0].display_form()
                    ));
                    break;
                }
            }
            let budget = 10 * (ctx.prob.goal.len() + 1);
            if actions.len() > budget {
                score -= 0.5;
                notes.push(format!("length {} exceeds the budget {budget}", actions.len()));
            }
            if notes.is_empty() {
                notes.push("no wasted steps; length within budget".into());
            }
            (score.max(0.0), notes.join("; "))
        }
    }
}

/// Fixed request grammar for generative validators.
pub fn validation_request(ctx: &ValidationContext<'_>) -> String {
    let mut triples: Vec<String> = ctx
        .causal
        .query(&TripleQuery::default())
        .into_iter()
        .take(10)
        .map(|t| format!("({}, {}, {}) confidence {:.3}", t.action, t.relation, t.pattern, t.confidence()))
        .collect();
    if triples.is_empty() {
        triples.push("(none)".into());
    }
    format!(
        "VALIDATE PLAN\nTASK:\n{}\nPLAN:\n{}CAUSAL:\n{}\n\
         Reply with exactly two lines:\nSCORE: <number in [0,1]>\nRATIONALE: <one line>\n",
        ctx.task_text,
        ctx.plan.to_text(),
        triples.join("\n"),
    )
}

/// Strict reply parser: a `SCORE:` line holding a float in [0,1] and a
/// `RATIONALE:` line.
pub fn parse_agent_reply(reply: &str) -> Result<(f64, String), ClientError> {
    let mut score = None;
    let mut rationale = String::new();
    for line in reply.lines() {
        if let Some(rest) = line.trim().strip_prefix("SCORE:") {
            let value: f64 = rest
                .trim()
                .parse()
                .map_err(|_| ClientError::BadReply(format!("unparseable score {rest:?}")))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(ClientError::BadReply(format!("score {value} outside [0,1]")));
            }
            score = Some(value);
        } else if let Some(rest) = line.trim().strip_prefix("RATIONALE:") {
            rationale = rest.trim().to_string();
        }
    }
    match score {
        Some(s) => Ok((s, rationale)),
        None => Err(ClientError::BadReply("missing SCORE line".into())),
    }
}

/// Scores the plan with every agent and aggregates by consensus.
/// Failed backends are skipped and logged; when nothing is left the
/// whole validation fails.
pub fn validate(
    plan: &Plan,
    prob: &ProblemModel,
    dom: &DomainModel,
    causal: &CausalStore,
    agents: &[ValidatorAgent],
    task_text: &str,
    threshold: f64,
) -> Result<ValidationVerdict, ValidationError> {
    let trace = validate_plan(prob, plan);
    let ctx = ValidationContext { dom, prob, plan, trace: &trace, causal, task_text };
    let request = validation_request(&ctx);

    let results: Vec<Option<AgentScore>> = agents
        .par_iter()
        .map(|agent| match &agent.backend {
            AgentBackend::Rule(kind) => {
                let (score, rationale) = score_rule(*kind, &ctx);
                Some(AgentScore {
                    agent_id: agent.id.clone(),
                    reputation: agent.reputation,
                    score,
                    rationale,
                })
            }
            AgentBackend::Generative(client) => {
                let reply = client
                    .complete(&request, &GenOptions::default())
                    .and_then(|r| parse_agent_reply(&r));
                match reply {
                    Ok((score, rationale)) => Some(AgentScore {
                        agent_id: agent.id.clone(),
                        reputation: agent.reputation,
                        score,
                        rationale,
                    }),
                    Err(e) => {
                        log::warn!("validator {} skipped: {e}", agent.id);
                        None
                    }
                }
            }
        })
        .collect();

    let scores: Vec<AgentScore> = results.into_iter().flatten().collect();
    if scores.is_empty() {
        return Err(ValidationError::AllAgentsFailed);
    }
    let pairs: Vec<(f64, f64)> = scores.iter().map(|s| (s.reputation, s.score)).collect();
    let (value, approved) = consensus(&pairs, threshold)?;
    Ok(ValidationVerdict { scores, consensus: value, threshold, approved })
}
