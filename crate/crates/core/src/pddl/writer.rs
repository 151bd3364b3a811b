//! Canonical PDDL emission.
//!
//! Output is stable: the same model always serializes to the same bytes,
//! so diffs between refinement iterations show real edits only.

use std::fmt::Write;

use super::model::*;

const REQUIREMENTS: &str = ":strips :typing :negative-preconditions :equality";

fn write_typed_list(out: &mut String, entries: &[(String, String)], prefix: &str) {
    for (name, ty) in entries {
        let _ = write!(out, "{prefix}{name} - {ty}\n");
    }
}

fn typed_params(params: &[TypedParam]) -> String {
    let mut parts = Vec::with_capacity(params.len());
    for p in params {
        parts.push(format!("?{} - {}", p.name, p.ty));
    }
    parts.join(" ")
}

fn schema_atom(atom: &SchemaAtom) -> String {
    let mut s = format!("({}", atom.predicate);
    for t in &atom.args {
        let _ = write!(s, " {t}");
    }
    s.push(')');
    s
}

fn schema_literal(lit: &SchemaLiteral) -> String {
    match lit {
        SchemaLiteral::Atom { atom, negated: false } => schema_atom(atom),
        SchemaLiteral::Atom { atom, negated: true } => format!("(not {})", schema_atom(atom)),
        SchemaLiteral::Equality { left, right, negated: false } => format!("(= {left} {right})"),
        SchemaLiteral::Equality { left, right, negated: true } => {
            format!("(not (= {left} {right}))")
        }
    }
}

pub fn serialize_domain(dom: &DomainModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", dom.name);
    let _ = writeln!(out, "  (:requirements {REQUIREMENTS})");

    let mut type_entries: Vec<(String, String)> = dom
        .types
        .names()
        .map(|n| (n.to_string(), dom.types.parent(n).unwrap_or(OBJECT_TYPE).to_string()))
        .collect();
    type_entries.sort();
    if !type_entries.is_empty() {
        out.push_str("  (:types\n");
        write_typed_list(&mut out, &type_entries, "    ");
        out.push_str("  )\n");
    }

    if !dom.constants.is_empty() {
        out.push_str("  (:constants\n");
        let entries: Vec<(String, String)> =
            dom.constants.iter().map(|o| (o.name.clone(), o.ty.clone())).collect();
        write_typed_list(&mut out, &entries, "    ");
        out.push_str("  )\n");
    }

    if !dom.predicates.is_empty() {
        out.push_str("  (:predicates\n");
        for pred in &dom.predicates {
            if pred.params.is_empty() {
                let _ = writeln!(out, "    ({})", pred.name);
            } else {
                let _ = writeln!(out, "    ({} {})", pred.name, typed_params(&pred.params));
            }
        }
        out.push_str("  )\n");
    }

    for action in &dom.actions {
        let _ = writeln!(out, "  (:action {}", action.name);
        let _ = writeln!(out, "    :parameters ({})", typed_params(&action.params));
        let pre: Vec<String> = action.preconditions.iter().map(schema_literal).collect();
        let _ = writeln!(out, "    :precondition (and {})", pre.join(" "));
        let mut effects: Vec<String> = action.add_effects.iter().map(schema_atom).collect();
        effects.extend(action.del_effects.iter().map(|a| format!("(not {})", schema_atom(a))));
        let _ = writeln!(out, "    :effect (and {})", effects.join(" "));
        out.push_str("  )\n");
    }
    out.push_str(")\n");
    out
}

pub fn serialize_problem(prob: &ProblemModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", prob.name);
    let _ = writeln!(out, "  (:domain {})", prob.domain_name);

    // One object per line, declaration order preserved, so the text
    // round-trips to a structurally identical model.
    out.push_str("  (:objects\n");
    for obj in &prob.objects {
        let _ = writeln!(out, "    {} - {}", obj.name, obj.ty);
    }
    out.push_str("  )\n");

    out.push_str("  (:init\n");
    for atom in &prob.init {
        let _ = writeln!(out, "    {atom}");
    }
    out.push_str("  )\n");

    // An empty goal still gets an explicit (and) conjunction.
    let goals: Vec<String> = prob.goal.iter().map(|l| l.to_string()).collect();
    let _ = writeln!(out, "  (:goal (and {}))", goals.join(" "));
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use crate::fixtures;
    use crate::pddl::{ground, parse_domain, parse_problem, GroundingOptions};

    use super::*;

    #[test]
    fn domain_round_trips_structurally() {
        let dom = parse_domain(fixtures::BLOCKSWORLD_DOMAIN).unwrap();
        let text = serialize_domain(&dom);
        let reparsed = parse_domain(&text).unwrap();
        assert_eq!(dom, reparsed);
    }

    #[test]
    fn problem_round_trips_structurally() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::GRIPPER_PROBLEM, &dom).unwrap();
        let text = serialize_problem(&prob);
        let reparsed = parse_problem(&text, &dom).unwrap();
        assert_eq!(prob, reparsed);
    }

    #[test]
    fn empty_goal_gets_explicit_conjunction() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let text = "(define (problem p) (:domain gripper)
          (:objects rooma - room) (:init) (:goal (and)))";
        let prob = parse_problem(text, &dom).unwrap();
        assert!(serialize_problem(&prob).contains("(:goal (and ))"));
    }

    #[test]
    fn serialization_is_stable() {
        let dom = parse_domain(fixtures::SATELLITE_DOMAIN).unwrap();
        assert_eq!(serialize_domain(&dom), serialize_domain(&dom));
    }

    #[test]
    fn reground_after_round_trip_is_identical() {
        let dom = parse_domain(fixtures::BLOCKSWORLD_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::BLOCKSWORLD_SUSSMAN, &dom).unwrap();
        let opts = GroundingOptions::default();
        let direct = ground(&dom, &prob, &opts).unwrap();

        let dom2 = parse_domain(&serialize_domain(&dom)).unwrap();
        let prob2 = parse_problem(&serialize_problem(&prob), &dom2).unwrap();
        let round = ground(&dom2, &prob2, &opts).unwrap();
        assert_eq!(direct.actions, round.actions);
        assert_eq!(direct.atoms, round.atoms);
    }
}
