//! Recursive-descent PDDL reader for the supported STRIPS fragment.

use std::collections::BTreeSet;

use super::lexer::{parse_sexpr, SExpr};
use super::model::*;
use super::ParseError;

const SUPPORTED_REQUIREMENTS: &[&str] =
    &[":strips", ":typing", ":negative-preconditions", ":equality"];

/// How to treat a problem whose `(:domain ...)` does not match the
/// domain model it is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MismatchPolicy {
    #[default]
    Warn,
    Error,
}

#[derive(Debug, Clone, Default)]
pub struct ProblemOptions {
    pub domain_name_mismatch: MismatchPolicy,
}

pub fn parse_domain(text: &str) -> Result<DomainModel, ParseError> {
    let root = parse_sexpr(text)?;
    let items = expect_define(&root)?;

    let mut name = None;
    let mut types = TypeHierarchy::default();
    let mut constants = Vec::new();
    let mut predicates: Vec<PredicateDecl> = Vec::new();
    let mut actions: Vec<ActionSchema> = Vec::new();

    for item in items {
        let head = item.head().ok_or_else(|| ParseError::Syntax {
            pos: item.pos(),
            msg: "expected a (:section ...) form".into(),
        })?;
        let list = item.as_list().unwrap();
        match head {
            "domain" => {
                name = Some(expect_name(list, item.pos(), "domain")?);
            }
            ":requirements" => check_requirements(list)?,
            ":types" => {
                for entry in parse_typed_list(&list[1..], item.pos())? {
                    if types.contains(&entry.name) && entry.name != OBJECT_TYPE {
                        return Err(ParseError::Duplicate {
                            pos: item.pos(),
                            what: "type",
                            name: entry.name,
                        });
                    }
                    types.insert(&entry.name, &entry.ty);
                }
            }
            ":constants" => {
                constants = parse_typed_list(&list[1..], item.pos())?;
            }
            ":predicates" => {
                for pred in &list[1..] {
                    let decl = parse_predicate_decl(pred)?;
                    if predicates.iter().any(|p| p.name == decl.name) {
                        return Err(ParseError::Duplicate {
                            pos: pred.pos(),
                            what: "predicate",
                            name: decl.name,
                        });
                    }
                    predicates.push(decl);
                }
            }
            ":action" => {
                let schema = parse_action(list, item.pos())?;
                if actions.iter().any(|a| a.name == schema.name) {
                    return Err(ParseError::Duplicate {
                        pos: item.pos(),
                        what: "action",
                        name: schema.name,
                    });
                }
                actions.push(schema);
            }
            ":functions" | ":durative-action" | ":derived" | ":axiom" => {
                return Err(ParseError::Unsupported {
                    pos: item.pos(),
                    what: format!("{head} is outside the supported STRIPS fragment"),
                });
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: item.pos(),
                    msg: format!("unrecognized domain section {other}"),
                });
            }
        }
    }

    let name = name.ok_or_else(|| ParseError::Syntax {
        pos: root.pos(),
        msg: "missing (domain NAME) declaration".into(),
    })?;

    let dom = DomainModel { name, types, constants, predicates, actions };
    validate_domain(&dom)?;
    Ok(dom)
}

pub fn parse_problem(text: &str, dom: &DomainModel) -> Result<ProblemModel, ParseError> {
    parse_problem_with(text, dom, &ProblemOptions::default())
}

pub fn parse_problem_with(
    text: &str,
    dom: &DomainModel,
    opts: &ProblemOptions,
) -> Result<ProblemModel, ParseError> {
    let root = parse_sexpr(text)?;
    let items = expect_define(&root)?;

    let mut name = None;
    let mut domain_name = None;
    let mut objects = Vec::new();
    let mut init = BTreeSet::new();
    let mut goal = BTreeSet::new();

    for item in items {
        let head = item.head().ok_or_else(|| ParseError::Syntax {
            pos: item.pos(),
            msg: "expected a (:section ...) form".into(),
        })?;
        let list = item.as_list().unwrap();
        match head {
            "problem" => name = Some(expect_name(list, item.pos(), "problem")?),
            ":domain" => domain_name = Some(expect_name(list, item.pos(), ":domain")?),
            ":requirements" => check_requirements(list)?,
            ":objects" => objects = parse_typed_list(&list[1..], item.pos())?,
            ":init" => {
                for entry in &list[1..] {
                    init.insert(parse_ground_atom(entry)?);
                }
            }
            ":goal" => {
                if list.len() != 2 {
                    return Err(ParseError::Syntax {
                        pos: item.pos(),
                        msg: "goal must be a single formula".into(),
                    });
                }
                goal = parse_goal(&list[1])?;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: item.pos(),
                    msg: format!("unrecognized problem section {other}"),
                });
            }
        }
    }

    let name = name.ok_or_else(|| ParseError::Syntax {
        pos: root.pos(),
        msg: "missing (problem NAME) declaration".into(),
    })?;
    let domain_name = domain_name.ok_or_else(|| ParseError::Syntax {
        pos: root.pos(),
        msg: "missing (:domain NAME) declaration".into(),
    })?;

    if domain_name != dom.name {
        match opts.domain_name_mismatch {
            MismatchPolicy::Warn => log::warn!(
                "problem {name} declares domain {domain_name}, checked against {}",
                dom.name
            ),
            MismatchPolicy::Error => {
                return Err(ParseError::DomainMismatch {
                    pos: root.pos(),
                    declared: domain_name,
                    expected: dom.name.clone(),
                });
            }
        }
    }

    let prob = ProblemModel { name, domain_name, objects, init, goal };
    validate_problem(&prob, dom)?;
    Ok(prob)
}

/// Parses a single ground atom such as `(on a b)`. Used for plan files
/// and trace records as well as `:init` entries.
pub fn parse_ground_atom(expr: &SExpr) -> Result<Atom, ParseError> {
    let items = expr.as_list().ok_or_else(|| ParseError::Syntax {
        pos: expr.pos(),
        msg: "expected an atom list".into(),
    })?;
    let mut parts = Vec::with_capacity(items.len());
    for item in items {
        let sym = item.as_sym().ok_or_else(|| ParseError::Syntax {
            pos: item.pos(),
            msg: "nested lists are not allowed inside an atom".into(),
        })?;
        parts.push(sym.to_string());
    }
    if parts.is_empty() {
        return Err(ParseError::Syntax { pos: expr.pos(), msg: "empty atom".into() });
    }
    let predicate = parts.remove(0);
    if predicate.starts_with('?') {
        return Err(ParseError::Syntax {
            pos: expr.pos(),
            msg: "atom must start with a predicate name".into(),
        });
    }
    Ok(Atom { predicate, args: parts })
}

fn expect_define(root: &SExpr) -> Result<&[SExpr], ParseError> {
    let items = root.as_list().ok_or_else(|| ParseError::Syntax {
        pos: root.pos(),
        msg: "expected (define ...)".into(),
    })?;
    match items.first().and_then(|e| e.as_sym()) {
        Some("define") => Ok(&items[1..]),
        _ => Err(ParseError::Syntax {
            pos: root.pos(),
            msg: "top-level form must be (define ...)".into(),
        }),
    }
}

fn expect_name(list: &[SExpr], pos: SourcePos, what: &str) -> Result<String, ParseError> {
    match list.get(1).and_then(|e| e.as_sym()) {
        Some(s) if list.len() == 2 => Ok(s.to_string()),
        _ => Err(ParseError::Syntax { pos, msg: format!("expected ({what} NAME)") }),
    }
}

fn check_requirements(list: &[SExpr]) -> Result<(), ParseError> {
    for req in &list[1..] {
        let sym = req.as_sym().ok_or_else(|| ParseError::Syntax {
            pos: req.pos(),
            msg: "requirement flags must be symbols".into(),
        })?;
        if !SUPPORTED_REQUIREMENTS.contains(&sym) {
            return Err(ParseError::UnsupportedRequirement {
                pos: req.pos(),
                name: sym.to_string(),
            });
        }
    }
    Ok(())
}

/// Parses `a b - t c d - s e` style typed lists; trailing untyped
/// entries default to `object`.
fn parse_typed_list(items: &[SExpr], pos: SourcePos) -> Result<Vec<TypedObject>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut iter = items.iter().peekable();
    while let Some(item) = iter.next() {
        let sym = item.as_sym().ok_or_else(|| ParseError::Syntax {
            pos: item.pos(),
            msg: "typed list entries must be symbols".into(),
        })?;
        if sym == "-" {
            let ty = iter
                .next()
                .and_then(|e| e.as_sym())
                .ok_or_else(|| ParseError::Syntax { pos, msg: "dangling - in typed list".into() })?;
            if pending.is_empty() {
                return Err(ParseError::Syntax { pos, msg: "type with no names before -".into() });
            }
            for name in pending.drain(..) {
                out.push(TypedObject { name, ty: ty.to_string() });
            }
        } else {
            pending.push(sym.to_string());
        }
    }
    for name in pending {
        out.push(TypedObject { name, ty: OBJECT_TYPE.to_string() });
    }
    Ok(out)
}

fn parse_params(items: &[SExpr], pos: SourcePos) -> Result<Vec<TypedParam>, ParseError> {
    let typed = parse_typed_list(items, pos)?;
    let mut params = Vec::with_capacity(typed.len());
    for entry in typed {
        let name = entry.name.strip_prefix('?').ok_or_else(|| ParseError::Syntax {
            pos,
            msg: format!("parameter {} must start with ?", entry.name),
        })?;
        params.push(TypedParam { name: name.to_string(), ty: entry.ty });
    }
    Ok(params)
}

fn parse_predicate_decl(expr: &SExpr) -> Result<PredicateDecl, ParseError> {
    let items = expr.as_list().ok_or_else(|| ParseError::Syntax {
        pos: expr.pos(),
        msg: "predicate declaration must be a list".into(),
    })?;
    let name = items.first().and_then(|e| e.as_sym()).ok_or_else(|| ParseError::Syntax {
        pos: expr.pos(),
        msg: "predicate declaration must start with a name".into(),
    })?;
    let params = parse_params(&items[1..], expr.pos())?;
    Ok(PredicateDecl { name: name.to_string(), params })
}

fn parse_term(expr: &SExpr) -> Result<Term, ParseError> {
    let sym = expr.as_sym().ok_or_else(|| ParseError::Syntax {
        pos: expr.pos(),
        msg: "expected a variable or constant".into(),
    })?;
    Ok(match sym.strip_prefix('?') {
        Some(var) => Term::Var(var.to_string()),
        None => Term::Const(sym.to_string()),
    })
}

fn parse_schema_atom(expr: &SExpr) -> Result<SchemaAtom, ParseError> {
    let items = expr.as_list().ok_or_else(|| ParseError::Syntax {
        pos: expr.pos(),
        msg: "expected an atom".into(),
    })?;
    let predicate = items.first().and_then(|e| e.as_sym()).ok_or_else(|| ParseError::Syntax {
        pos: expr.pos(),
        msg: "atom must start with a predicate name".into(),
    })?;
    let args = items[1..].iter().map(parse_term).collect::<Result<Vec<_>, _>>()?;
    Ok(SchemaAtom { predicate: predicate.to_string(), args })
}

/// Flattens `(and ...)` or accepts a bare literal/atom.
fn conjuncts(expr: &SExpr) -> Vec<&SExpr> {
    if expr.head() == Some("and") {
        expr.as_list().unwrap()[1..].iter().collect()
    } else {
        vec![expr]
    }
}

fn parse_precondition(expr: &SExpr, out: &mut BTreeSet<SchemaLiteral>) -> Result<(), ParseError> {
    for lit in conjuncts(expr) {
        let (inner, negated) = match lit.head() {
            Some("not") => {
                let items = lit.as_list().unwrap();
                if items.len() != 2 {
                    return Err(ParseError::Syntax {
                        pos: lit.pos(),
                        msg: "(not ...) takes exactly one literal".into(),
                    });
                }
                (&items[1], true)
            }
            _ => (lit, false),
        };
        if inner.head() == Some("=") {
            let items = inner.as_list().unwrap();
            if items.len() != 3 {
                return Err(ParseError::Syntax {
                    pos: inner.pos(),
                    msg: "(= ...) takes exactly two terms".into(),
                });
            }
            out.insert(SchemaLiteral::Equality {
                left: parse_term(&items[1])?,
                right: parse_term(&items[2])?,
                negated,
            });
        } else {
            if matches!(inner.head(), Some("and" | "or" | "forall" | "exists" | "when")) {
                return Err(ParseError::Unsupported {
                    pos: inner.pos(),
                    what: format!(
                        "{} conditions are outside the supported STRIPS fragment",
                        inner.head().unwrap()
                    ),
                });
            }
            out.insert(SchemaLiteral::Atom { atom: parse_schema_atom(inner)?, negated });
        }
    }
    Ok(())
}

fn parse_effects(
    expr: &SExpr,
    add: &mut BTreeSet<SchemaAtom>,
    del: &mut BTreeSet<SchemaAtom>,
) -> Result<(), ParseError> {
    for eff in conjuncts(expr) {
        match eff.head() {
            Some("not") => {
                let items = eff.as_list().unwrap();
                if items.len() != 2 {
                    return Err(ParseError::Syntax {
                        pos: eff.pos(),
                        msg: "(not ...) takes exactly one atom".into(),
                    });
                }
                del.insert(parse_schema_atom(&items[1])?);
            }
            Some("when" | "forall" | "increase" | "decrease" | "assign") => {
                return Err(ParseError::Unsupported {
                    pos: eff.pos(),
                    what: format!(
                        "{} effects are outside the supported STRIPS fragment",
                        eff.head().unwrap()
                    ),
                });
            }
            _ => {
                add.insert(parse_schema_atom(eff)?);
            }
        }
    }
    Ok(())
}

fn parse_action(list: &[SExpr], pos: SourcePos) -> Result<ActionSchema, ParseError> {
    let name = list.get(1).and_then(|e| e.as_sym()).ok_or_else(|| ParseError::Syntax {
        pos,
        msg: "action must have a name".into(),
    })?;
    let mut params = Vec::new();
    let mut preconditions = BTreeSet::new();
    let mut add_effects = BTreeSet::new();
    let mut del_effects = BTreeSet::new();

    let mut idx = 2;
    while idx < list.len() {
        let key = list[idx].as_sym().ok_or_else(|| ParseError::Syntax {
            pos: list[idx].pos(),
            msg: "expected :parameters, :precondition or :effect".into(),
        })?;
        let value = list.get(idx + 1).ok_or_else(|| ParseError::Syntax {
            pos: list[idx].pos(),
            msg: format!("{key} is missing its body"),
        })?;
        match key {
            ":parameters" => {
                let items = value.as_list().ok_or_else(|| ParseError::Syntax {
                    pos: value.pos(),
                    msg: ":parameters must be a list".into(),
                })?;
                params = parse_params(items, value.pos())?;
            }
            ":precondition" => parse_precondition(value, &mut preconditions)?,
            ":effect" => parse_effects(value, &mut add_effects, &mut del_effects)?,
            other => {
                return Err(ParseError::Unsupported {
                    pos: list[idx].pos(),
                    what: format!("action field {other}"),
                });
            }
        }
        idx += 2;
    }

    // Add wins over delete when a ground instance lists an atom in both;
    // drop the syntactic overlap here so add/del stay disjoint.
    let del_effects = del_effects.difference(&add_effects).cloned().collect();

    Ok(ActionSchema {
        name: name.to_string(),
        params,
        preconditions,
        add_effects,
        del_effects,
    })
}

fn term_vars(term: &Term) -> Option<&str> {
    match term {
        Term::Var(v) => Some(v),
        Term::Const(_) => None,
    }
}

fn validate_domain(dom: &DomainModel) -> Result<(), ParseError> {
    let no_pos = SourcePos { line: 1, col: 1 };
    for ty in dom.types.names() {
        let mut cur = ty;
        while let Some(parent) = dom.types.parent(cur) {
            if parent == ty {
                return Err(ParseError::Syntax {
                    pos: no_pos,
                    msg: format!("type {ty} participates in a cycle"),
                });
            }
            cur = parent;
        }
    }
    let type_known = |ty: &str| dom.types.contains(ty);
    for pred in &dom.predicates {
        for param in &pred.params {
            if !type_known(&param.ty) {
                return Err(ParseError::UnknownType {
                    pos: no_pos,
                    name: param.ty.clone(),
                    context: format!("predicate {}", pred.name),
                });
            }
        }
    }
    for obj in &dom.constants {
        if !type_known(&obj.ty) {
            return Err(ParseError::UnknownType {
                pos: no_pos,
                name: obj.ty.clone(),
                context: format!("constant {}", obj.name),
            });
        }
    }
    for action in &dom.actions {
        for param in &action.params {
            if !type_known(&param.ty) {
                return Err(ParseError::UnknownType {
                    pos: no_pos,
                    name: param.ty.clone(),
                    context: format!("action {}", action.name),
                });
            }
        }
        let declared: BTreeSet<&str> = action.params.iter().map(|p| p.name.as_str()).collect();
        let check_atom = |atom: &SchemaAtom| -> Result<(), ParseError> {
            let decl = dom.predicate(&atom.predicate).ok_or_else(|| ParseError::UnknownPredicate {
                pos: no_pos,
                name: atom.predicate.clone(),
                context: format!("action {}", action.name),
            })?;
            if decl.arity() != atom.args.len() {
                return Err(ParseError::ArityMismatch {
                    pos: no_pos,
                    predicate: atom.predicate.clone(),
                    expected: decl.arity(),
                    got: atom.args.len(),
                });
            }
            for term in &atom.args {
                if let Some(var) = term_vars(term) {
                    if !declared.contains(var) {
                        return Err(ParseError::UnboundVariable {
                            pos: no_pos,
                            variable: var.to_string(),
                            action: action.name.clone(),
                        });
                    }
                }
            }
            Ok(())
        };
        for lit in &action.preconditions {
            match lit {
                SchemaLiteral::Atom { atom, .. } => check_atom(atom)?,
                SchemaLiteral::Equality { left, right, .. } => {
                    for term in [left, right] {
                        if let Some(var) = term_vars(term) {
                            if !declared.contains(var) {
                                return Err(ParseError::UnboundVariable {
                                    pos: no_pos,
                                    variable: var.to_string(),
                                    action: action.name.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        for atom in action.add_effects.iter().chain(&action.del_effects) {
            check_atom(atom)?;
        }
    }
    Ok(())
}

fn validate_problem(prob: &ProblemModel, dom: &DomainModel) -> Result<(), ParseError> {
    let no_pos = SourcePos { line: 1, col: 1 };
    let mut object_type = std::collections::BTreeMap::new();
    for obj in dom.constants.iter().chain(&prob.objects) {
        if !dom.types.contains(&obj.ty) {
            return Err(ParseError::UnknownType {
                pos: no_pos,
                name: obj.ty.clone(),
                context: format!("object {}", obj.name),
            });
        }
        if object_type.insert(obj.name.clone(), obj.ty.clone()).is_some() {
            return Err(ParseError::Duplicate {
                pos: no_pos,
                what: "object",
                name: obj.name.clone(),
            });
        }
    }
    let check_atom = |atom: &Atom, context: &str| -> Result<(), ParseError> {
        let decl = dom.predicate(&atom.predicate).ok_or_else(|| ParseError::UnknownPredicate {
            pos: no_pos,
            name: atom.predicate.clone(),
            context: context.to_string(),
        })?;
        if decl.arity() != atom.args.len() {
            return Err(ParseError::ArityMismatch {
                pos: no_pos,
                predicate: atom.predicate.clone(),
                expected: decl.arity(),
                got: atom.args.len(),
            });
        }
        for (arg, param) in atom.args.iter().zip(&decl.params) {
            let ty = object_type.get(arg).ok_or_else(|| ParseError::UnknownObject {
                pos: no_pos,
                name: arg.clone(),
                context: context.to_string(),
            })?;
            if !dom.types.is_subtype(ty, &param.ty) {
                return Err(ParseError::TypeMismatch {
                    pos: no_pos,
                    object: arg.clone(),
                    expected: param.ty.clone(),
                    got: ty.clone(),
                });
            }
        }
        Ok(())
    };
    for atom in &prob.init {
        check_atom(atom, "init")?;
    }
    for lit in &prob.goal {
        check_atom(&lit.atom, "goal")?;
    }
    Ok(())
}

fn parse_goal(expr: &SExpr) -> Result<BTreeSet<GroundLiteral>, ParseError> {
    let mut out = BTreeSet::new();
    for lit in conjuncts(expr) {
        let (inner, negated) = match lit.head() {
            Some("not") => {
                let items = lit.as_list().unwrap();
                if items.len() != 2 {
                    return Err(ParseError::Syntax {
                        pos: lit.pos(),
                        msg: "(not ...) takes exactly one atom".into(),
                    });
                }
                (&items[1], true)
            }
            _ => (lit, false),
        };
        out.insert(GroundLiteral { atom: parse_ground_atom(inner)?, negated });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn blocksworld_parses_with_four_actions() {
        let dom = parse_domain(fixtures::BLOCKSWORLD_DOMAIN).unwrap();
        let names: Vec<_> = dom.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["pick-up", "put-down", "stack", "unstack"]);
        assert_eq!(dom.name, "blocksworld");
    }

    #[test]
    fn zero_action_domain_is_valid() {
        let dom = parse_domain("(define (domain empty) (:requirements :strips))").unwrap();
        assert!(dom.actions.is_empty());
    }

    #[test]
    fn unbound_variable_is_rejected() {
        let text = "(define (domain bad)
          (:predicates (p ?x))
          (:action a :parameters (?y) :precondition (p ?x) :effect (p ?y)))";
        let err = parse_domain(text).unwrap_err();
        assert!(matches!(err, ParseError::UnboundVariable { ref variable, .. } if variable == "x"));
    }

    #[test]
    fn unknown_requirement_is_rejected() {
        let text = "(define (domain bad) (:requirements :strips :durative-actions))";
        assert!(matches!(
            parse_domain(text).unwrap_err(),
            ParseError::UnsupportedRequirement { .. }
        ));
    }

    #[test]
    fn duplicate_action_is_rejected() {
        let text = "(define (domain bad)
          (:predicates (p))
          (:action a :parameters () :effect (p))
          (:action a :parameters () :effect (p)))";
        assert!(matches!(parse_domain(text).unwrap_err(), ParseError::Duplicate { .. }));
    }

    #[test]
    fn diagnostics_carry_position() {
        let err = parse_domain("(define (domain x)\n  (:requirements :adl))").unwrap_err();
        match err {
            ParseError::UnsupportedRequirement { pos, .. } => {
                assert_eq!(pos.line, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn gripper_problem_objects_and_init() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::GRIPPER_PROBLEM, &dom).unwrap();
        assert_eq!(prob.objects.len(), 7); // 2 rooms + 2 balls + 1 robot + 2 grippers
        assert!(prob.init.contains(&Atom::new("at-robby", vec!["robot1".into(), "rooma".into()])));
        assert!(prob.init.contains(&Atom::new("free", vec!["robot1".into(), "left".into()])));
        assert_eq!(prob.goal.len(), 2);
    }

    #[test]
    fn empty_goal_is_valid() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let text = "(define (problem p) (:domain gripper)
          (:objects rooma - room) (:init) (:goal (and)))";
        let prob = parse_problem(text, &dom).unwrap();
        assert!(prob.goal.is_empty());
    }

    #[test]
    fn wrong_arity_init_atom_is_rejected() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let text = "(define (problem p) (:domain gripper)
          (:objects rooma - room) (:init (at-robby rooma)) (:goal (and)))";
        assert!(matches!(
            parse_problem(text, &dom).unwrap_err(),
            ParseError::ArityMismatch { .. }
        ));
    }

    #[test]
    fn type_mismatch_is_rejected() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let text = "(define (problem p) (:domain gripper)
          (:objects b1 - ball r1 - robot)
          (:init (at-robby r1 b1)) (:goal (and)))";
        assert!(matches!(parse_problem(text, &dom).unwrap_err(), ParseError::TypeMismatch { .. }));
    }

    #[test]
    fn domain_name_mismatch_policy() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let text = "(define (problem p) (:domain other) (:objects) (:init) (:goal (and)))";
        assert!(parse_problem(text, &dom).is_ok());
        let opts = ProblemOptions { domain_name_mismatch: MismatchPolicy::Error };
        assert!(matches!(
            parse_problem_with(text, &dom, &opts).unwrap_err(),
            ParseError::DomainMismatch { .. }
        ));
    }
}
