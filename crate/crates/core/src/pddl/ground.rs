//! Schema instantiation over the typed object pool.

use std::collections::BTreeMap;

use super::model::*;
use super::GroundError;

#[derive(Debug, Clone)]
pub struct GroundingOptions {
    /// Hard cap on the number of generated ground actions.
    pub max_actions: usize,
}

impl Default for GroundingOptions {
    fn default() -> Self {
        GroundingOptions { max_actions: 1_000_000 }
    }
}

/// Grounded task: the deduplicated ground action list in canonical order
/// (schema name, then argument tuple) and the syntactic atom universe.
#[derive(Debug, Clone)]
pub struct GroundTask {
    pub actions: Vec<GroundAction>,
    pub atoms: Vec<Atom>,
}

impl GroundTask {
    pub fn atom_id(&self, atom: &Atom) -> Option<usize> {
        self.atoms.binary_search(atom).ok()
    }

    /// Ground action lookup by `(schema, args)` identity.
    pub fn action_index(&self, schema: &str, args: &[String]) -> Option<usize> {
        self.actions
            .binary_search_by(|a| {
                a.schema.as_str().cmp(schema).then_with(|| a.args.as_slice().cmp(args))
            })
            .ok()
    }
}

/// Instantiates every type-consistent binding of every schema.
///
/// Distinct variables may bind to the same object; only explicit
/// `(= ...)` preconditions constrain bindings, and those are resolved
/// statically here (bindings whose equality literals are false are not
/// generated).
pub fn ground(
    dom: &DomainModel,
    prob: &ProblemModel,
    opts: &GroundingOptions,
) -> Result<GroundTask, GroundError> {
    let mut objects_by_type: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let pool: Vec<&TypedObject> = dom.constants.iter().chain(&prob.objects).collect();
    let mut type_names: Vec<&str> = vec![OBJECT_TYPE];
    type_names.extend(dom.types.names());
    for ty in type_names {
        let mut members: Vec<&str> = pool
            .iter()
            .filter(|o| dom.types.is_subtype(&o.ty, ty))
            .map(|o| o.name.as_str())
            .collect();
        members.sort_unstable();
        objects_by_type.insert(ty, members);
    }

    let mut actions = Vec::new();
    for schema in &dom.actions {
        let domains: Vec<&[&str]> = schema
            .params
            .iter()
            .map(|p| objects_by_type.get(p.ty.as_str()).map(|v| v.as_slice()).unwrap_or(&[]))
            .collect();
        let mut binding = vec![""; schema.params.len()];
        enumerate(schema, &domains, 0, &mut binding, opts, &mut actions)?;
    }
    actions.sort_by(|a, b| a.schema.cmp(&b.schema).then_with(|| a.args.cmp(&b.args)));
    actions.dedup();

    let mut atoms = Vec::new();
    for pred in &dom.predicates {
        let domains: Vec<&[&str]> = pred
            .params
            .iter()
            .map(|p| objects_by_type.get(p.ty.as_str()).map(|v| v.as_slice()).unwrap_or(&[]))
            .collect();
        enumerate_atoms(&pred.name, &domains, 0, &mut Vec::new(), &mut atoms);
    }
    atoms.sort_unstable();
    atoms.dedup();

    Ok(GroundTask { actions, atoms })
}

fn enumerate<'a>(
    schema: &ActionSchema,
    domains: &[&[&'a str]],
    depth: usize,
    binding: &mut Vec<&'a str>,
    opts: &GroundingOptions,
    out: &mut Vec<GroundAction>,
) -> Result<(), GroundError> {
    if depth == domains.len() {
        if let Some(action) = instantiate(schema, binding) {
            if out.len() >= opts.max_actions {
                return Err(GroundError::CapExceeded { cap: opts.max_actions });
            }
            out.push(action);
        }
        return Ok(());
    }
    for obj in domains[depth] {
        binding[depth] = obj;
        enumerate(schema, domains, depth + 1, binding, opts, out)?;
    }
    Ok(())
}

fn resolve<'a>(term: &'a Term, schema: &ActionSchema, binding: &[&'a str]) -> &'a str {
    match term {
        Term::Const(c) => c,
        Term::Var(v) => {
            let idx = schema.param_index(v).expect("validated schema");
            binding[idx]
        }
    }
}

fn instantiate(schema: &ActionSchema, binding: &[&str]) -> Option<GroundAction> {
    let bind_atom = |atom: &SchemaAtom| Atom {
        predicate: atom.predicate.clone(),
        args: atom.args.iter().map(|t| resolve(t, schema, binding).to_string()).collect(),
    };

    let mut pre_pos = std::collections::BTreeSet::new();
    let mut pre_neg = std::collections::BTreeSet::new();
    for lit in &schema.preconditions {
        match lit {
            SchemaLiteral::Equality { left, right, negated } => {
                let l = resolve(left, schema, binding);
                let r = resolve(right, schema, binding);
                if (l == r) == *negated {
                    return None; // statically false under this binding
                }
            }
            SchemaLiteral::Atom { atom, negated } => {
                let ground = bind_atom(atom);
                if *negated {
                    pre_neg.insert(ground);
                } else {
                    pre_pos.insert(ground);
                }
            }
        }
    }

    let add: std::collections::BTreeSet<Atom> = schema.add_effects.iter().map(bind_atom).collect();
    let del: std::collections::BTreeSet<Atom> = schema
        .del_effects
        .iter()
        .map(bind_atom)
        .filter(|a| !add.contains(a)) // add wins; keeps add/del disjoint
        .collect();

    Some(GroundAction {
        schema: schema.name.clone(),
        args: binding.iter().map(|s| s.to_string()).collect(),
        pre_pos,
        pre_neg,
        add,
        del,
    })
}

fn enumerate_atoms(
    predicate: &str,
    domains: &[&[&str]],
    depth: usize,
    args: &mut Vec<String>,
    out: &mut Vec<Atom>,
) {
    if depth == domains.len() {
        out.push(Atom { predicate: predicate.to_string(), args: args.clone() });
        return;
    }
    for obj in domains[depth] {
        args.push(obj.to_string());
        enumerate_atoms(predicate, domains, depth + 1, args, out);
        args.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::{parse_domain, parse_problem};

    fn counts(actions: &[GroundAction]) -> BTreeMap<String, usize> {
        let mut map = BTreeMap::new();
        for a in actions {
            *map.entry(a.schema.clone()).or_insert(0) += 1;
        }
        map
    }

    #[test]
    fn gripper_grounds_to_twenty_actions() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::GRIPPER_PROBLEM, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        let by_schema = counts(&task.actions);
        assert_eq!(by_schema["move"], 4);
        assert_eq!(by_schema["pick"], 8);
        assert_eq!(by_schema["drop"], 8);
        assert_eq!(task.actions.len(), 20);
    }

    #[test]
    fn blocksworld_three_blocks_grounds_to_eighteen() {
        let dom = parse_domain(fixtures::BLOCKSWORLD_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::BLOCKSWORLD_SUSSMAN, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        let by_schema = counts(&task.actions);
        assert_eq!(by_schema["pick-up"], 3);
        assert_eq!(by_schema["put-down"], 3);
        assert_eq!(by_schema["stack"], 6); // (= ?x ?y) bindings resolved away
        assert_eq!(by_schema["unstack"], 6);
        assert_eq!(task.actions.len(), 18);
    }

    #[test]
    fn zero_action_domain_grounds_empty() {
        let dom = parse_domain("(define (domain none) (:predicates (p)))").unwrap();
        let prob =
            parse_problem("(define (problem q) (:domain none) (:init) (:goal (and)))", &dom)
                .unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        assert!(task.actions.is_empty());
        assert_eq!(task.atoms.len(), 1); // the 0-ary atom (p)
    }

    #[test]
    fn cap_is_enforced() {
        let dom = parse_domain(fixtures::BLOCKSWORLD_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::BLOCKSWORLD_SUSSMAN, &dom).unwrap();
        let err = ground(&dom, &prob, &GroundingOptions { max_actions: 5 }).unwrap_err();
        assert!(matches!(err, GroundError::CapExceeded { cap: 5 }));
    }

    #[test]
    fn order_is_deterministic_and_canonical() {
        let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
        let prob = parse_problem(fixtures::GRIPPER_PROBLEM, &dom).unwrap();
        let a = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        let b = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        assert_eq!(a.actions, b.actions);
        let mut sorted = a.actions.clone();
        sorted.sort_by(|x, y| x.schema.cmp(&y.schema).then_with(|| x.args.cmp(&y.args)));
        assert_eq!(a.actions, sorted);
    }
}
