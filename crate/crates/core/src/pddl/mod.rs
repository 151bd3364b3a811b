//! Typed-STRIPS PDDL: parsing, validation, grounding and serialization.
//!
//! Models are immutable after construction and cheap to share across
//! threads. Both serializers emit a canonical layout so that texts from
//! successive refinement iterations diff cleanly, and two runs over the
//! same input are byte-identical.

mod ground;
mod lexer;
mod model;
mod parser;
mod writer;

pub use ground::{ground, GroundTask, GroundingOptions};
pub use lexer::{parse_sexpr, SExpr};
pub use model::*;
pub use parser::{
    parse_domain, parse_ground_atom, parse_problem, parse_problem_with, MismatchPolicy,
    ProblemOptions,
};
pub use writer::{serialize_domain, serialize_problem};

use thiserror::Error;

/// Parse- and validation-time diagnostics, with 1-based positions.
#[derive(Debug, Clone, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: SourcePos, msg: String },
    #[error("{pos}: requirement {name} is not in the supported subset (:strips :typing :negative-preconditions :equality)")]
    UnsupportedRequirement { pos: SourcePos, name: String },
    #[error("{pos}: unsupported construct: {what}")]
    Unsupported { pos: SourcePos, what: String },
    #[error("{pos}: duplicate {what} declaration {name}")]
    Duplicate { pos: SourcePos, what: &'static str, name: String },
    #[error("{pos}: variable ?{variable} in action {action} is not declared in its parameter list")]
    UnboundVariable { pos: SourcePos, variable: String, action: String },
    #[error("{pos}: unknown predicate {name} in {context}")]
    UnknownPredicate { pos: SourcePos, name: String, context: String },
    #[error("{pos}: unknown type {name} in {context}")]
    UnknownType { pos: SourcePos, name: String, context: String },
    #[error("{pos}: unknown object {name} in {context}")]
    UnknownObject { pos: SourcePos, name: String, context: String },
    #[error("{pos}: predicate {predicate} expects {expected} arguments, got {got}")]
    ArityMismatch { pos: SourcePos, predicate: String, expected: usize, got: usize },
    #[error("{pos}: object {object} has type {got}, expected {expected}")]
    TypeMismatch { pos: SourcePos, object: String, expected: String, got: String },
    #[error("{pos}: problem declares domain {declared}, expected {expected}")]
    DomainMismatch { pos: SourcePos, declared: String, expected: String },
}

/// Grounding failures.
#[derive(Debug, Clone, Error)]
pub enum GroundError {
    #[error("grounding exceeds the configured cap of {cap} actions")]
    CapExceeded { cap: usize },
}
