//! Hot-path benchmarks: grounding, optimal search, the GAT forward
//! pass, embedding and memory retrieval.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use nsplan_core::embedding::{EmbeddingProvider, HashEmbedder};
use nsplan_core::fixtures;
use nsplan_core::gnn::{gat_forward, node_init, GnnWeights, TaskGraph};
use nsplan_core::memory::{Experience, MemoryStore, Outcome};
use nsplan_core::pddl::{ground, parse_domain, parse_problem, GroundingOptions};
use nsplan_core::planner::{solve_grounded, SearchConfig};

fn bench_parse_and_ground(c: &mut Criterion) {
    c.bench_function("parse_domain/blocksworld", |b| {
        b.iter(|| parse_domain(black_box(fixtures::BLOCKSWORLD_DOMAIN)).unwrap())
    });

    let dom = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
    let prob = parse_problem(fixtures::GRIPPER_PROBLEM, &dom).unwrap();
    c.bench_function("ground/gripper-2-2-2", |b| {
        b.iter(|| ground(black_box(&dom), black_box(&prob), &GroundingOptions::default()).unwrap())
    });
}

fn bench_search(c: &mut Criterion) {
    for fixture in [fixtures::by_name("blocksworld").unwrap(), fixtures::by_name("gripper").unwrap()]
    {
        let dom = parse_domain(fixture.domain).unwrap();
        let prob = parse_problem(fixture.problem, &dom).unwrap();
        let task = ground(&dom, &prob, &GroundingOptions::default()).unwrap();
        c.bench_function(&format!("solve_optimal/{}", fixture.name), |b| {
            b.iter(|| {
                solve_grounded(black_box(&prob), black_box(&task), &SearchConfig::optimal())
                    .unwrap()
            })
        });
    }
}

fn bench_gnn(c: &mut Criterion) {
    let embedder = HashEmbedder::default();
    let mut graph = TaskGraph::new();
    for i in 0..8 {
        let text = format!("subtask number {i}");
        graph.add_node(format!("n{i}"), text.clone(), embedder.embed(&text).unwrap()).unwrap();
    }
    for i in 0..7 {
        graph.add_edge(&format!("n{i}"), &format!("n{}", i + 1)).unwrap();
    }
    let weights = GnnWeights::seeded(7);
    let h0 = node_init(&graph, &weights).unwrap();
    c.bench_function("gat_forward/8-node-chain", |b| {
        b.iter(|| gat_forward(black_box(&graph), black_box(&h0), &weights).unwrap())
    });
}

fn bench_embedding_and_memory(c: &mut Criterion) {
    let embedder = HashEmbedder::default();
    c.bench_function("embed/short-task", |b| {
        b.iter(|| embedder.embed(black_box("move ball one to room b with the left gripper")))
    });

    let mut store = MemoryStore::new();
    for i in 0..1000u64 {
        store.insert(Experience {
            embedding: embedder.embed(&format!("stored task {i}")).unwrap(),
            domain: "bench".into(),
            problem_digest: format!("{i}"),
            plan: vec!["(noop)".into()],
            outcome: if i % 3 == 0 { Outcome::Failure } else { Outcome::Success },
            plan_length: 1,
            wall_seconds: 0.0,
            timestamp_ms: i,
        });
    }
    let query = embedder.embed("a fresh query task").unwrap();
    c.bench_function("retrieve_similar/full-ring", |b| {
        b.iter(|| store.retrieve_similar(black_box(&query), 3))
    });
}

criterion_group!(
    benches,
    bench_parse_and_ground,
    bench_search,
    bench_gnn,
    bench_embedding_and_memory
);
criterion_main!(benches);
