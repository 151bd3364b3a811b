//! Parsed and grounded planning models.
//!
//! The supported fragment is STRIPS with `:typing`,
//! `:negative-preconditions` and `:equality`. Identifiers are
//! case-insensitive and normalized to lower case on parse.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the implicit root type.
pub const OBJECT_TYPE: &str = "object";

/// 1-based source position attached to diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourcePos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Single-parent type hierarchy rooted at `object`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeHierarchy {
    parents: BTreeMap<String, String>,
}

impl TypeHierarchy {
    pub fn insert(&mut self, name: &str, parent: &str) {
        if name != OBJECT_TYPE {
            self.parents.insert(name.to_string(), parent.to_string());
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        name == OBJECT_TYPE || self.parents.contains_key(name)
    }

    /// True when `sub` equals `sup` or is a descendant of it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == OBJECT_TYPE {
            return true;
        }
        let mut cur = sub;
        while let Some(parent) = self.parents.get(cur) {
            if parent == sup {
                return true;
            }
            cur = parent;
        }
        false
    }

    /// Declared type names excluding the root, in sorted order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(|s| s.as_str())
    }

    pub fn parent(&self, name: &str) -> Option<&str> {
        self.parents.get(name).map(|s| s.as_str())
    }
}

/// `?var - type` pair in a parameter list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypedParam {
    pub name: String,
    pub ty: String,
}

/// `name - type` pair in an object or constant list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypedObject {
    pub name: String,
    pub ty: String,
}

/// Predicate declaration: name plus typed parameter list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedParam>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Term in a schema body: a parameter variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Unground atom appearing in a schema body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SchemaAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

/// Precondition literal: a (possibly negated) atom or equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemaLiteral {
    Atom { atom: SchemaAtom, negated: bool },
    Equality { left: Term, right: Term, negated: bool },
}

/// STRIPS action schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedParam>,
    pub preconditions: BTreeSet<SchemaLiteral>,
    pub add_effects: BTreeSet<SchemaAtom>,
    pub del_effects: BTreeSet<SchemaAtom>,
}

impl ActionSchema {
    /// Position of a parameter by variable name.
    pub fn param_index(&self, var: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == var)
    }
}

/// Validated planning domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainModel {
    pub name: String,
    pub types: TypeHierarchy,
    pub constants: Vec<TypedObject>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl DomainModel {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }
}

/// Ground atom: predicate applied to constants. Orders lexicographically
/// by predicate then argument tuple, which is the canonical atom order
/// used everywhere (universes, diagnostics, serialization).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        Atom { predicate: predicate.into(), args }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// Ground literal used in goals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundLiteral {
    pub atom: Atom,
    pub negated: bool,
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "(not {})", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// Validated planning problem, cross-checked against its domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemModel {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedObject>,
    pub init: BTreeSet<Atom>,
    pub goal: BTreeSet<GroundLiteral>,
}

/// Fully instantiated action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    pub pre_pos: BTreeSet<Atom>,
    pub pre_neg: BTreeSet<Atom>,
    pub add: BTreeSet<Atom>,
    pub del: BTreeSet<Atom>,
}

impl GroundAction {
    /// IPC plan-line form, e.g. `(stack a b)`.
    pub fn display_form(&self) -> String {
        let mut s = format!("({}", self.schema);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_form())
    }
}
