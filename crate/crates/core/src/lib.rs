//! Neuro-symbolic planning engine.
//!
//! The pipeline: parse typed-STRIPS PDDL ([`pddl`]), score confidence on
//! the task ([`confidence`]), route between hierarchical decomposition
//! ([`decomposition`]) and progressive validated generation
//! ([`orchestrator`]), plan with built-in heuristic search or an
//! external classical planner ([`planner`]), validate plans by
//! multi-agent consensus ([`validation`]), and learn causal triples and
//! reusable patterns from execution traces ([`causal`]).

pub mod causal;
pub mod clients;
pub mod confidence;
pub mod decomposition;
pub mod embedding;
pub mod fixtures;
pub mod gnn;
pub mod memory;
pub mod orchestrator;
pub mod pddl;
pub mod planner;
pub mod state;
pub mod validation;

pub use pddl::{Atom, DomainModel, GroundAction, ProblemModel};
pub use state::{ExecutionTrace, Plan, State};
