//! Causal knowledge learned from execution traces.
//!
//! Traces are mined into lifted triples `(action schema, relation,
//! state pattern)` with frequency-based confidence
//! `support / (support + contradictions)`. Successful traces add
//! support; a failed trace adds contradictions to the triples of its
//! failing step. Patterns lift ground atoms by matching constants to
//! the action's bound parameters; unmatched constants become wildcards.
//!
//! REQUIRES comes from positive preconditions, PRODUCES from Δ⁺ and
//! PREVENTS from Δ⁻. ENABLES and MODIFIES need cross-step analysis and
//! are only ever written through the advisory GNN/manual path.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{Atom, DomainModel, GroundAction};
use crate::state::{EngineError, ExecutionTrace, Plan, State, TraceOutcome};

/// Causal relation kinds, in canonical (tie-break) order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    Enables,
    Requires,
    Produces,
    Prevents,
    Modifies,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::Enables,
        Relation::Requires,
        Relation::Produces,
        Relation::Prevents,
        Relation::Modifies,
    ];
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::Enables => "ENABLES",
            Relation::Requires => "REQUIRES",
            Relation::Produces => "PRODUCES",
            Relation::Prevents => "PREVENTS",
            Relation::Modifies => "MODIFIES",
        };
        f.write_str(s)
    }
}

impl FromStr for Relation {
    type Err = CausalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ENABLES" => Ok(Relation::Enables),
            "REQUIRES" => Ok(Relation::Requires),
            "PRODUCES" => Ok(Relation::Produces),
            "PREVENTS" => Ok(Relation::Prevents),
            "MODIFIES" => Ok(Relation::Modifies),
            other => Err(CausalError::Format(format!("unknown relation {other}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum CausalError {
    #[error(transparent)]
    Trace(#[from] EngineError),
    #[error("cannot abstract an empty plan")]
    EmptyPlan,
    #[error("causal store format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One lifted argument slot: a bound parameter position or a wildcard.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum PatternArg {
    Param(usize),
    Wildcard,
}

/// Lifted state pattern: predicate plus role slots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StatePattern {
    pub predicate: String,
    pub roles: Vec<PatternArg>,
}

impl fmt::Display for StatePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        let mut sep = '⟨';
        for role in &self.roles {
            match role {
                PatternArg::Param(i) => write!(f, "{sep}p{i}")?,
                PatternArg::Wildcard => write!(f, "{sep}*")?,
            }
            sep = ',';
        }
        if !self.roles.is_empty() {
            write!(f, "⟩")?;
        }
        Ok(())
    }
}

impl StatePattern {
    /// Lifts a ground atom against an action's bound arguments. A
    /// constant matching several parameters takes the first position.
    pub fn lift(atom: &Atom, action_args: &[String]) -> Self {
        let roles = atom
            .args
            .iter()
            .map(|c| match action_args.iter().position(|a| a == c) {
                Some(i) => PatternArg::Param(i),
                None => PatternArg::Wildcard,
            })
            .collect();
        StatePattern { predicate: atom.predicate.clone(), roles }
    }

    /// Instantiates the pattern under concrete action arguments.
    /// Wildcard slots make the result `None`.
    pub fn instantiate(&self, action_args: &[String]) -> Option<Atom> {
        let mut args = Vec::with_capacity(self.roles.len());
        for role in &self.roles {
            match role {
                PatternArg::Param(i) => args.push(action_args.get(*i)?.clone()),
                PatternArg::Wildcard => return None,
            }
        }
        Some(Atom { predicate: self.predicate.clone(), args })
    }
}

/// Identity of a triple; counts live in the store.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TripleKey {
    pub action: String,
    pub relation: Relation,
    pub pattern: StatePattern,
}

/// Learned causal unit with its evidence counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalTriple {
    pub action: String,
    pub relation: Relation,
    pub pattern: StatePattern,
    pub support: u64,
    pub contradictions: u64,
}

impl CausalTriple {
    pub fn confidence(&self) -> f64 {
        self.support as f64 / (self.support + self.contradictions) as f64
    }

    pub fn key(&self) -> TripleKey {
        TripleKey {
            action: self.action.clone(),
            relation: self.relation,
            pattern: self.pattern.clone(),
        }
    }
}

/// Δ⁺: atoms in `post` but not in `pre`.
pub fn delta_plus(pre: &State, post: &State) -> BTreeSet<Atom> {
    post.atoms().filter(|a| !pre.contains(a)).cloned().collect()
}

/// Δ⁻: atoms in `pre` but not in `post`.
pub fn delta_minus(pre: &State, post: &State) -> BTreeSet<Atom> {
    pre.atoms().filter(|a| !post.contains(a)).cloned().collect()
}

/// Query filter; `None` fields match everything.
#[derive(Debug, Clone, Default)]
pub struct TripleQuery {
    pub action: Option<String>,
    pub predicate: Option<String>,
    pub relation: Option<Relation>,
    pub min_confidence: f64,
}

/// Frequency-weighted triple store. Single writer, many readers.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<CausalTriple>", into = "Vec<CausalTriple>")]
pub struct CausalStore {
    triples: BTreeMap<TripleKey, (u64, u64)>,
}

impl From<Vec<CausalTriple>> for CausalStore {
    fn from(list: Vec<CausalTriple>) -> Self {
        let mut store = CausalStore::default();
        for t in list {
            if t.support >= 1 {
                let entry = store.triples.entry(t.key()).or_insert((0, 0));
                entry.0 += t.support;
                entry.1 += t.contradictions;
            }
        }
        store
    }
}

impl From<CausalStore> for Vec<CausalTriple> {
    fn from(store: CausalStore) -> Self {
        store.all()
    }
}

impl CausalStore {
    pub fn new() -> Self {
        CausalStore::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn all(&self) -> Vec<CausalTriple> {
        self.triples
            .iter()
            .map(|(k, (s, c))| CausalTriple {
                action: k.action.clone(),
                relation: k.relation,
                pattern: k.pattern.clone(),
                support: *s,
                contradictions: *c,
            })
            .collect()
    }

    pub fn support(&mut self, key: TripleKey) {
        let entry = self.triples.entry(key).or_insert((0, 0));
        entry.0 += 1;
    }

    /// Contradictions never create triples: stored triples keep
    /// support ≥ 1.
    pub fn contradict(&mut self, key: &TripleKey) {
        if let Some(entry) = self.triples.get_mut(key) {
            entry.1 += 1;
        }
    }

    /// Manual/advisory insertion path (GNN predictions land here).
    pub fn insert_advisory(&mut self, key: TripleKey) {
        self.support(key);
    }

    pub fn get(&self, key: &TripleKey) -> Option<CausalTriple> {
        self.triples.get(key).map(|(s, c)| CausalTriple {
            action: key.action.clone(),
            relation: key.relation,
            pattern: key.pattern.clone(),
            support: *s,
            contradictions: *c,
        })
    }

    /// Matching triples sorted by confidence then support, descending;
    /// key order breaks the remaining ties.
    pub fn query(&self, q: &TripleQuery) -> Vec<CausalTriple> {
        let mut out: Vec<CausalTriple> = self
            .all()
            .into_iter()
            .filter(|t| {
                q.action.as_deref().map_or(true, |a| t.action == a)
                    && q.predicate.as_deref().map_or(true, |p| t.pattern.predicate == p)
                    && q.relation.map_or(true, |r| t.relation == r)
                    && t.confidence() >= q.min_confidence
            })
            .collect();
        out.sort_by(|a, b| {
            b.confidence()
                .partial_cmp(&a.confidence())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| b.support.cmp(&a.support))
                .then_with(|| a.key().cmp(&b.key()))
        });
        out
    }

    /// Mines one trace. Returns the post-update snapshots of every
    /// touched triple.
    pub fn learn_from_trace(
        &mut self,
        trace: &ExecutionTrace,
    ) -> Result<Vec<CausalTriple>, CausalError> {
        trace.check_consistency()?;
        let mut touched: BTreeSet<TripleKey> = BTreeSet::new();

        match &trace.outcome {
            TraceOutcome::GoalSatisfied => {
                for step in &trace.steps {
                    for key in step_triples_observed(step) {
                        self.support(key.clone());
                        touched.insert(key);
                    }
                }
            }
            TraceOutcome::Failed { .. } => {
                // Executed prefix steps carry no evidence; the failing
                // step's schema-derived triples collect contradictions.
                // A goal miss has no failing action and updates nothing.
                if let Some(action) = &trace.failed_action {
                    for key in action_schema_triples(action) {
                        self.contradict(&key);
                        touched.insert(key);
                    }
                }
            }
        }
        Ok(touched.into_iter().filter_map(|k| self.get(&k)).collect())
    }

    pub fn export_json(&self) -> String {
        serde_json::to_string_pretty(&self.all()).expect("triples serialize")
    }

    pub fn import_json(text: &str) -> Result<Self, CausalError> {
        let list: Vec<CausalTriple> =
            serde_json::from_str(text).map_err(|e| CausalError::Format(e.to_string()))?;
        for t in &list {
            if t.support == 0 {
                return Err(CausalError::Format(format!(
                    "triple ({}, {}, {}) has zero support",
                    t.action, t.relation, t.pattern
                )));
            }
        }
        Ok(CausalStore::from(list))
    }
}

/// Triples observed in one executed step: REQUIRES from positive
/// preconditions, PRODUCES from Δ⁺, PREVENTS from Δ⁻.
fn step_triples_observed(step: &crate::state::TraceStep) -> Vec<TripleKey> {
    let action = &step.action;
    let mut keys = Vec::new();
    for atom in &action.pre_pos {
        keys.push(TripleKey {
            action: action.schema.clone(),
            relation: Relation::Requires,
            pattern: StatePattern::lift(atom, &action.args),
        });
    }
    for atom in delta_plus(&step.pre, &step.post) {
        keys.push(TripleKey {
            action: action.schema.clone(),
            relation: Relation::Produces,
            pattern: StatePattern::lift(&atom, &action.args),
        });
    }
    for atom in delta_minus(&step.pre, &step.post) {
        keys.push(TripleKey {
            action: action.schema.clone(),
            relation: Relation::Prevents,
            pattern: StatePattern::lift(&atom, &action.args),
        });
    }
    keys
}

/// Schema-level triples for a step that never executed (its Δ sets do
/// not exist): preconditions, adds and deletes lifted directly.
fn action_schema_triples(action: &GroundAction) -> Vec<TripleKey> {
    let mut keys = Vec::new();
    for atom in &action.pre_pos {
        keys.push(TripleKey {
            action: action.schema.clone(),
            relation: Relation::Requires,
            pattern: StatePattern::lift(atom, &action.args),
        });
    }
    for atom in &action.add {
        keys.push(TripleKey {
            action: action.schema.clone(),
            relation: Relation::Produces,
            pattern: StatePattern::lift(atom, &action.args),
        });
    }
    for atom in &action.del {
        keys.push(TripleKey {
            action: action.schema.clone(),
            relation: Relation::Prevents,
            pattern: StatePattern::lift(atom, &action.args),
        });
    }
    keys
}

// ---------------------------------------------------------------------------
// Cross-domain pattern transfer
// ---------------------------------------------------------------------------

/// Abstract action vocabulary for cross-domain transfer.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum AbstractType {
    Acquire,
    Transport,
    Release,
    Apply,
    Toggle,
}

impl fmt::Display for AbstractType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AbstractType::Acquire => "acquire",
            AbstractType::Transport => "transport",
            AbstractType::Release => "release",
            AbstractType::Apply => "apply",
            AbstractType::Toggle => "toggle",
        };
        f.write_str(s)
    }
}

impl FromStr for AbstractType {
    type Err = CausalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "acquire" => Ok(AbstractType::Acquire),
            "transport" => Ok(AbstractType::Transport),
            "release" => Ok(AbstractType::Release),
            "apply" => Ok(AbstractType::Apply),
            "toggle" => Ok(AbstractType::Toggle),
            other => Err(CausalError::Format(format!("unknown abstract type {other}"))),
        }
    }
}

/// User-editable mapping `(domain, action) → abstract type`. Ships with
/// defaults for the bundled benchmark domains.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RoleTable {
    entries: BTreeMap<(String, String), AbstractType>,
}

impl RoleTable {
    pub fn empty() -> Self {
        RoleTable::default()
    }

    pub fn builtin() -> Self {
        use AbstractType::*;
        let mut table = RoleTable::default();
        let defaults: &[(&str, &str, AbstractType)] = &[
            ("blocksworld", "pick-up", Acquire),
            ("blocksworld", "unstack", Acquire),
            ("blocksworld", "put-down", Release),
            ("blocksworld", "stack", Release),
            ("gripper", "pick", Acquire),
            ("gripper", "move", Transport),
            ("gripper", "drop", Release),
            ("floortile", "move", Transport),
            ("floortile", "paint", Apply),
            ("floortile", "change-color", Toggle),
            ("storage", "lift", Acquire),
            ("storage", "go", Transport),
            ("storage", "drop", Release),
            ("rovers", "collect", Acquire),
            ("rovers", "navigate", Transport),
            ("rovers", "communicate", Apply),
            ("satellite", "turn-to", Transport),
            ("satellite", "switch-on", Toggle),
            ("satellite", "calibrate", Toggle),
            ("satellite", "take-image", Apply),
            ("logistics", "load", Acquire),
            ("logistics", "drive", Transport),
            ("logistics", "unload", Release),
        ];
        for (dom, action, ty) in defaults {
            table.insert(dom, action, *ty);
        }
        table
    }

    pub fn insert(&mut self, domain: &str, action: &str, ty: AbstractType) {
        self.entries.insert((domain.to_string(), action.to_string()), ty);
    }

    pub fn lookup(&self, domain: &str, action: &str) -> Option<AbstractType> {
        self.entries.get(&(domain.to_string(), action.to_string())).copied()
    }

    /// Target-domain schemas tagged with the given type, sorted.
    pub fn actions_of(&self, domain: &str, ty: AbstractType) -> Vec<String> {
        self.entries
            .iter()
            .filter(|((d, _), t)| d == domain && **t == ty)
            .map(|((_, a), _)| a.clone())
            .collect()
    }
}

/// Abstracted plan shape plus its source-domain mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractPattern {
    pub steps: Vec<AbstractType>,
    pub source_domain: String,
    pub source_mapping: BTreeMap<AbstractType, BTreeSet<String>>,
    /// Set when unmappable actions were dropped from the sequence.
    pub omitted_actions: Vec<String>,
}

/// Maps plan actions to abstract types and collapses consecutive
/// duplicates. Unmappable actions are omitted and flagged.
pub fn abstract_pattern(
    plan: &Plan,
    dom: &DomainModel,
    table: &RoleTable,
) -> Result<AbstractPattern, CausalError> {
    if plan.is_empty() {
        return Err(CausalError::EmptyPlan);
    }
    let mut steps: Vec<AbstractType> = Vec::new();
    let mut mapping: BTreeMap<AbstractType, BTreeSet<String>> = BTreeMap::new();
    let mut omitted = Vec::new();
    for action in &plan.actions {
        match table.lookup(&dom.name, &action.schema) {
            Some(ty) => {
                mapping.entry(ty).or_default().insert(action.schema.clone());
                if steps.last() != Some(&ty) {
                    steps.push(ty);
                }
            }
            None => omitted.push(action.schema.clone()),
        }
    }
    if steps.is_empty() {
        return Err(CausalError::EmptyPlan);
    }
    Ok(AbstractPattern {
        steps,
        source_domain: dom.name.clone(),
        source_mapping: mapping,
        omitted_actions: omitted,
    })
}

/// Candidate schema sequence in the target domain: per pattern step,
/// the target schemas tagged with that abstract type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSkeleton {
    pub steps: Vec<Vec<String>>,
}

/// `None` when any step has no tagged schema in the target domain.
pub fn transfer(
    pattern: &AbstractPattern,
    target: &DomainModel,
    table: &RoleTable,
) -> Option<TransferSkeleton> {
    let mut steps = Vec::with_capacity(pattern.steps.len());
    for ty in &pattern.steps {
        let candidates: Vec<String> = table
            .actions_of(&target.name, *ty)
            .into_iter()
            .filter(|name| target.action(name).is_some())
            .collect();
        if candidates.is_empty() {
            return None;
        }
        steps.push(candidates);
    }
    Some(TransferSkeleton { steps })
}
