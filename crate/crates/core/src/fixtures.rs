//! Built-in example domains and problems.
//!
//! Six small IPC-style benchmark tasks ship with the engine so the CLI,
//! the test suites and the benchmarks all exercise the same corpus.

pub const BLOCKSWORLD_DOMAIN: &str = include_str!("../fixtures/blocksworld/domain.pddl");
pub const BLOCKSWORLD_SUSSMAN: &str = include_str!("../fixtures/blocksworld/sussman.pddl");
pub const BLOCKSWORLD_STACK2: &str = include_str!("../fixtures/blocksworld/stack2.pddl");
pub const GRIPPER_DOMAIN: &str = include_str!("../fixtures/gripper/domain.pddl");
pub const GRIPPER_PROBLEM: &str = include_str!("../fixtures/gripper/two-balls.pddl");
pub const FLOORTILE_DOMAIN: &str = include_str!("../fixtures/floortile/domain.pddl");
pub const FLOORTILE_PROBLEM: &str = include_str!("../fixtures/floortile/row3.pddl");
pub const STORAGE_DOMAIN: &str = include_str!("../fixtures/storage/domain.pddl");
pub const STORAGE_PROBLEM: &str = include_str!("../fixtures/storage/swap1.pddl");
pub const ROVERS_DOMAIN: &str = include_str!("../fixtures/rovers/domain.pddl");
pub const ROVERS_PROBLEM: &str = include_str!("../fixtures/rovers/relay1.pddl");
pub const SATELLITE_DOMAIN: &str = include_str!("../fixtures/satellite/domain.pddl");
pub const SATELLITE_PROBLEM: &str = include_str!("../fixtures/satellite/image1.pddl");

/// One benchmark task: domain text, problem text and the known optimal
/// plan length for the shipped instance.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub domain: &'static str,
    pub problem: &'static str,
    pub optimal_length: usize,
}

/// The six shipped benchmark tasks.
pub const ALL: &[Fixture] = &[
    Fixture {
        name: "blocksworld",
        domain: BLOCKSWORLD_DOMAIN,
        problem: BLOCKSWORLD_SUSSMAN,
        optimal_length: 6,
    },
    Fixture {
        name: "gripper",
        domain: GRIPPER_DOMAIN,
        problem: GRIPPER_PROBLEM,
        optimal_length: 5,
    },
    Fixture {
        name: "floortile",
        domain: FLOORTILE_DOMAIN,
        problem: FLOORTILE_PROBLEM,
        optimal_length: 3,
    },
    Fixture {
        name: "storage",
        domain: STORAGE_DOMAIN,
        problem: STORAGE_PROBLEM,
        optimal_length: 3,
    },
    Fixture {
        name: "rovers",
        domain: ROVERS_DOMAIN,
        problem: ROVERS_PROBLEM,
        optimal_length: 4,
    },
    Fixture {
        name: "satellite",
        domain: SATELLITE_DOMAIN,
        problem: SATELLITE_PROBLEM,
        optimal_length: 5,
    },
];

pub fn by_name(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}
