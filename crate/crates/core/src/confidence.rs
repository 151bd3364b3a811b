//! Confidence assessment: the routing signal between hierarchical
//! decomposition and progressive generation.
//!
//! Four components in [0, 1] combine as
//!
//! ```text
//! c_total = 0.4·c_exp + 0.3·(1 − c_complexity) + 0.2·c_causal + 0.1·c_domain
//! ```
//!
//! c_exp is the mean cosine of the top-3 similar successful
//! experiences, c_complexity a normalized size measure, c_causal the
//! fraction of schemas with usable causal knowledge, and c_domain
//! blends expert-validator availability with historical success.

use serde::{Deserialize, Serialize};

use crate::causal::{CausalStore, TripleQuery};
use crate::embedding::EmbeddingVector;
use crate::memory::MemoryStore;
use crate::pddl::{DomainModel, GroundTask, ProblemModel};
use crate::validation::ValidatorAgent;

pub const WEIGHT_EXP: f64 = 0.4;
pub const WEIGHT_COMPLEXITY: f64 = 0.3;
pub const WEIGHT_CAUSAL: f64 = 0.2;
pub const WEIGHT_DOMAIN: f64 = 0.1;

/// Routing threshold τ: at or above goes to decomposition.
pub const DEFAULT_ROUTE_THRESHOLD: f64 = 0.6;

/// Causal knowledge counts once a triple reaches this confidence.
pub const CAUSAL_CONFIDENCE_FLOOR: f64 = 0.5;

/// Normalization constants of the complexity formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityWeights {
    pub objects_scale: f64,
    pub goals_scale: f64,
    pub actions_scale: f64,
}

impl Default for ComplexityWeights {
    fn default() -> Self {
        ComplexityWeights { objects_scale: 30.0, goals_scale: 15.0, actions_scale: 2000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Decomposition,
    Progressive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceReport {
    pub c_exp: f64,
    pub c_complexity: f64,
    pub c_causal: f64,
    pub c_domain: f64,
    pub c_total: f64,
    /// Per-component provenance, for the run log.
    pub notes: Vec<String>,
}

impl ConfidenceReport {
    pub fn route(&self, threshold: f64) -> Route {
        if self.c_total >= threshold {
            Route::Decomposition
        } else {
            Route::Progressive
        }
    }
}

/// The published weighted combination, evaluated exactly.
pub fn total(c_exp: f64, c_complexity: f64, c_causal: f64, c_domain: f64) -> f64 {
    WEIGHT_EXP * c_exp
        + WEIGHT_COMPLEXITY * (1.0 - c_complexity)
        + WEIGHT_CAUSAL * c_causal
        + WEIGHT_DOMAIN * c_domain
}

/// min(1, 0.5·|objects|/30 + 0.3·|goals|/15 + 0.2·|ground actions|/2000).
pub fn complexity(prob: &ProblemModel, task: &GroundTask, w: &ComplexityWeights) -> f64 {
    let objects = prob.objects.len() as f64;
    let goals = prob.goal.len() as f64;
    let actions = task.actions.len() as f64;
    (0.5 * objects / w.objects_scale
        + 0.3 * goals / w.goals_scale
        + 0.2 * actions / w.actions_scale)
        .min(1.0)
}

/// Full assessment over the current memories and validator registry.
pub fn assess(
    embedding: &EmbeddingVector,
    dom: &DomainModel,
    prob: &ProblemModel,
    task: &GroundTask,
    memory: &MemoryStore,
    causal: &CausalStore,
    validators: &[ValidatorAgent],
    weights: &ComplexityWeights,
) -> ConfidenceReport {
    let mut notes = Vec::new();

    let hits = memory.retrieve_similar(embedding, 3);
    let c_exp = if hits.is_empty() {
        notes.push("c_exp: no similar successful experiences".into());
        0.0
    } else {
        let mean = hits.iter().map(|h| h.similarity).sum::<f64>() / hits.len() as f64;
        notes.push(format!(
            "c_exp: mean cosine of top-{} = {mean:.4}",
            hits.len()
        ));
        // Cosine can be negative; the component is clamped into [0,1].
        mean.clamp(0.0, 1.0)
    };

    let c_complexity = complexity(prob, task, weights);
    notes.push(format!(
        "c_complexity: {} objects, {} goal literals, {} ground actions -> {c_complexity:.4}",
        prob.objects.len(),
        prob.goal.len(),
        task.actions.len()
    ));

    let c_causal = if dom.actions.is_empty() {
        notes.push("c_causal: domain has no action schemas".into());
        0.0
    } else {
        let covered = dom
            .actions
            .iter()
            .filter(|a| {
                !causal
                    .query(&TripleQuery {
                        action: Some(a.name.clone()),
                        min_confidence: CAUSAL_CONFIDENCE_FLOOR,
                        ..Default::default()
                    })
                    .is_empty()
            })
            .count();
        notes.push(format!(
            "c_causal: {covered}/{} schemas have confident triples",
            dom.actions.len()
        ));
        covered as f64 / dom.actions.len() as f64
    };

    let expert = validators.iter().any(|a| a.is_expert_for(&dom.name));
    let (rate, count) = memory.domain_success_rate(&dom.name);
    let history = if count == 0 { 0.5 } else { rate };
    let c_domain = 0.5 * f64::from(expert) + 0.5 * history;
    notes.push(format!(
        "c_domain: expert registered = {expert}, success rate = {history:.4} over {count} runs"
    ));

    let c_total = total(c_exp, c_complexity, c_causal, c_domain);
    ConfidenceReport { c_exp, c_complexity, c_causal, c_domain, c_total, notes }
}
