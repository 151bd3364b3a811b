//! `nsplan` — command-line surface of the planning engine.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nsplan_core::causal::CausalStore;
use nsplan_core::memory::MemoryStore;
use nsplan_core::orchestrator::{
    run_bench, BenchManifest, Engine, EngineConfig, PlannerChoice, RunStatus, TaskInput,
    TaskRequest,
};
use nsplan_core::pddl::{ground, parse_domain, parse_problem, GroundingOptions};
use nsplan_core::state::{parse_plan, trace_from_log, validate_plan, PlanSource};

#[derive(Parser)]
#[command(
    name = "nsplan",
    about = "Neuro-symbolic planning engine: parse PDDL, route by confidence, \
             plan, validate by consensus, learn from traces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// TOML config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wall budget per task in seconds.
    #[arg(long)]
    budget: Option<u64>,
    /// Routing threshold τ: confidence at or above decomposes.
    #[arg(long)]
    threshold: Option<f64>,
    /// Planning backend.
    #[arg(long, value_parser = ["builtin", "external"])]
    planner: Option<String>,
    /// Validator pool size.
    #[arg(long)]
    agents: Option<usize>,
    /// Seed for seeded components (GNN weights and friends).
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for run artifacts (config snapshot, PDDL, plans,
    /// traces, records).
    #[arg(long)]
    run_dir: Option<PathBuf>,
    /// Experience memory log (JSONL), loaded before and rewritten after.
    #[arg(long)]
    memory: Option<PathBuf>,
    /// Causal store (JSON), loaded before and saved after.
    #[arg(long)]
    causal: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one task from PDDL files or natural-language text.
    Solve {
        #[command(flatten)]
        engine: EngineArgs,
        /// Domain PDDL file.
        #[arg(long, required_unless_present = "text")]
        domain: Option<PathBuf>,
        /// Problem PDDL file.
        #[arg(long, required_unless_present = "text")]
        problem: Option<PathBuf>,
        /// Natural-language task (needs NSPLAN_GEN_CMD).
        #[arg(long, conflicts_with_all = ["domain", "problem"])]
        text: Option<String>,
        /// Domain hint accompanying --text.
        #[arg(long, default_value = "")]
        domain_hint: String,
    },
    /// Run a benchmark manifest (TOML listing domain/problem pairs).
    Bench {
        #[command(flatten)]
        engine: EngineArgs,
        manifest: PathBuf,
        /// Write the machine-readable report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a plan file against a domain/problem pair.
    Validate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// IPC-format plan file: one (action args) per line.
        plan: PathBuf,
    },
    /// Learn causal triples from a trace log.
    Learn {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Trace log (JSONL) produced by solve/validate runs.
        trace: PathBuf,
        /// Causal store to update.
        #[arg(long)]
        causal: PathBuf,
    },
    /// Experience memory snapshots.
    Memory {
        #[command(subcommand)]
        command: MemoryCommand,
    },
}

#[derive(Subcommand)]
enum MemoryCommand {
    /// Write a JSON snapshot of a memory log.
    Export {
        /// Experience log (JSONL).
        #[arg(long)]
        store: PathBuf,
        /// Snapshot destination.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a memory log from a JSON snapshot (validates entries).
    Import {
        /// Snapshot to read.
        #[arg(long)]
        snapshot: PathBuf,
        /// Log destination (overwritten).
        #[arg(long)]
        store: PathBuf,
    },
}

fn load_config(args: &EngineArgs) -> Result<EngineConfig> {
    let mut config = match &args.config {
        Some(path) => EngineConfig::from_toml(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => EngineConfig::default(),
    };
    if let Some(budget) = args.budget {
        config.budget_secs = budget;
    }
    if let Some(threshold) = args.threshold {
        config.route_threshold = threshold;
    }
    if let Some(planner) = &args.planner {
        config.planner = match planner.as_str() {
            "external" => PlannerChoice::External,
            _ => PlannerChoice::Builtin,
        };
    }
    if let Some(agents) = args.agents {
        config.agents = agents;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn build_engine(args: &EngineArgs) -> Result<Engine> {
    let config = load_config(args)?;
    let mut engine = Engine::new(config).with_env_client();
    if let Some(path) = &args.memory {
        engine.memory = MemoryStore::load_log(path)?;
    }
    if let Some(path) = &args.causal {
        if path.exists() {
            engine.causal = CausalStore::import_json(&std::fs::read_to_string(path)?)?;
        }
    }
    Ok(engine)
}

fn persist_engine(engine: &Engine, args: &EngineArgs) -> Result<()> {
    if let Some(path) = &args.memory {
        // Rewrite the compacted ring so the log never outgrows it.
        let mut text = String::new();
        for e in engine.memory.iter() {
            text.push_str(&serde_json::to_string(e)?);
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    if let Some(path) = &args.causal {
        std::fs::write(path, engine.causal.export_json())?;
    }
    Ok(())
}

fn load_models(
    domain: &Path,
    problem: &Path,
) -> Result<(nsplan_core::DomainModel, nsplan_core::ProblemModel)> {
    let domain_text = std::fs::read_to_string(domain)
        .with_context(|| format!("reading {}", domain.display()))?;
    let problem_text = std::fs::read_to_string(problem)
        .with_context(|| format!("reading {}", problem.display()))?;
    let dom = parse_domain(&domain_text)?;
    let prob = parse_problem(&problem_text, &dom)?;
    Ok((dom, prob))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    match cli.command {
        Command::Solve { engine: engine_args, domain, problem, text, domain_hint } => {
            let mut engine = build_engine(&engine_args)?;
            let input = match (domain, problem, text) {
                (Some(d), Some(p), None) => TaskInput::Files { domain: d, problem: p },
                (None, None, Some(t)) => TaskInput::Text { text: t, domain_hint },
                _ => bail!("pass either --domain and --problem, or --text"),
            };
            let request = TaskRequest {
                input,
                budget_secs: engine.config.budget_secs,
                run_dir: engine_args.run_dir.clone(),
            };
            let record = engine.run(&request)?;
            persist_engine(&engine, &engine_args)?;
            println!("{}", serde_json::to_string_pretty(&record)?);
            if record.status != RunStatus::Success {
                std::process::exit(1);
            }
        }
        Command::Bench { engine: engine_args, manifest, out } => {
            let config = load_config(&engine_args)?;
            let text = std::fs::read_to_string(&manifest)
                .with_context(|| format!("reading {}", manifest.display()))?;
            let mut parsed = BenchManifest::from_toml(&text)?;
            if let Some(base) = manifest.parent() {
                parsed.resolve_relative_to(base);
            }
            let report = run_bench(&config, &parsed)?;
            print!("{}", report.to_table());
            if let Some(path) = out {
                std::fs::write(&path, report.to_json())?;
                eprintln!("report written to {}", path.display());
            }
        }
        Command::Validate { domain, problem, plan } => {
            let (dom, prob) = load_models(&domain, &problem)?;
            let task = ground(&dom, &prob, &GroundingOptions::default())?;
            let plan_text = std::fs::read_to_string(&plan)
                .with_context(|| format!("reading {}", plan.display()))?;
            let parsed = parse_plan(&plan_text, &task, PlanSource::External)?;
            let trace = validate_plan(&prob, &parsed);
            println!("{}", trace.outcome);
            if !trace.outcome.is_goal_satisfied() {
                std::process::exit(1);
            }
        }
        Command::Learn { domain, problem, trace, causal } => {
            let (dom, prob) = load_models(&domain, &problem)?;
            let task = ground(&dom, &prob, &GroundingOptions::default())?;
            let log = std::fs::read_to_string(&trace)
                .with_context(|| format!("reading {}", trace.display()))?;
            let parsed = trace_from_log(&log, &task)?;
            let mut store = if causal.exists() {
                CausalStore::import_json(&std::fs::read_to_string(&causal)?)?
            } else {
                CausalStore::new()
            };
            let updates = store.learn_from_trace(&parsed)?;
            std::fs::write(&causal, store.export_json())?;
            println!("updated {} triples; store holds {}", updates.len(), store.len());
        }
        Command::Memory { command } => match command {
            MemoryCommand::Export { store, out } => {
                let memory = MemoryStore::load_log(&store)?;
                std::fs::write(&out, memory.export_json())?;
                println!("exported {} experiences to {}", memory.len(), out.display());
            }
            MemoryCommand::Import { snapshot, store } => {
                let memory = MemoryStore::import_json(&std::fs::read_to_string(&snapshot)?)?;
                let mut text = String::new();
                for e in memory.iter() {
                    text.push_str(&serde_json::to_string(e)?);
                    text.push('\n');
                }
                std::fs::write(&store, text)?;
                println!("imported {} experiences into {}", memory.len(), store.display());
            }
        },
    }
    Ok(())
}
