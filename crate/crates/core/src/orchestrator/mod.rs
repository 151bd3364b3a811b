//! The control loop: assess confidence, route, plan, validate, learn.
//!
//! High confidence takes the decomposition path (with a monolithic
//! fallback when decomposition fails); low confidence takes progressive
//! generation — plan, validate with the agent pool, refine the PDDL on
//! rejection, at most five iterations. Successful runs feed the
//! experience memory and the causal store. Every run leaves an
//! auditable directory that replays to the same record.

mod bench;
mod refine;

pub use bench::{run_bench, BenchInstance, BenchManifest, BenchReport, BenchRow};
pub use refine::{generate_pddl, refine_pddl, RefineLog, RefineOutcome};

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causal::{abstract_pattern, CausalStore, RoleTable};
use crate::clients::{ClientError, CommandClient, GenerativeClient};
use crate::confidence::{
    assess, ComplexityWeights, ConfidenceReport, Route, DEFAULT_ROUTE_THRESHOLD,
};
use crate::decomposition::{decompose_and_solve, DecompositionError};
use crate::embedding::{CachedEmbedder, EmbeddingProvider, HashEmbedder};
use crate::memory::{Experience, MemoryStore, Outcome};
use crate::pddl::{
    ground, parse_domain, parse_problem, serialize_domain, serialize_problem, DomainModel,
    GroundTask, GroundingOptions, ParseError, ProblemModel,
};
use crate::planner::{
    solve_external, solve_grounded, ExternalPlannerConfig, PlannerError, PlannerResult,
    SearchConfig, SolveStatus,
};
use crate::state::{trace_to_log, validate_plan, Plan};
use crate::validation::{
    default_pool, select_agents, validate, ValidationVerdict, ValidatorAgent,
    DEFAULT_POOL_SIZE, DEFAULT_THRESHOLD,
};

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("task input error: {0}")]
    Input(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("refinement made no progress (identical candidate twice)")]
    NoProgress,
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Ground(#[from] crate::pddl::GroundError),
    #[error(transparent)]
    Validation(#[from] crate::validation::ValidationError),
    #[error(transparent)]
    Memory(#[from] crate::memory::MemoryError),
    #[error(transparent)]
    Causal(#[from] crate::causal::CausalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
}

/// Which planning backend `solve` uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerChoice {
    Builtin,
    External,
}

/// Engine configuration; the TOML config file maps onto this.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub seed: u64,
    pub budget_secs: u64,
    pub route_threshold: f64,
    pub validation_threshold: f64,
    pub agents: usize,
    pub planner: PlannerChoice,
    pub temperature: f64,
    pub max_refinements: usize,
    pub grounding_cap: usize,
    pub complexity: ComplexityWeights,
    pub external: Option<ExternalPlannerConfig>,
    /// Extra role-table entries layered over the built-in defaults.
    pub role_table: Vec<RoleEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoleEntry {
    pub domain: String,
    pub action: String,
    pub abstract_type: String,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            seed: 0,
            budget_secs: 300,
            route_threshold: DEFAULT_ROUTE_THRESHOLD,
            validation_threshold: DEFAULT_THRESHOLD,
            agents: DEFAULT_POOL_SIZE,
            planner: PlannerChoice::Builtin,
            temperature: 0.1,
            max_refinements: 5,
            grounding_cap: 1_000_000,
            complexity: ComplexityWeights::default(),
            external: None,
            role_table: Vec::new(),
        }
    }
}

impl EngineConfig {
    pub fn from_toml(text: &str) -> Result<Self, OrchestratorError> {
        toml::from_str(text).map_err(|e| OrchestratorError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// One planning request. Exactly one input form.
#[derive(Debug, Clone)]
pub enum TaskInput {
    /// Domain and problem files on disk.
    Files { domain: PathBuf, problem: PathBuf },
    /// In-memory PDDL texts.
    Inline { domain: String, problem: String },
    /// Natural-language task; needs a generative client.
    Text { text: String, domain_hint: String },
}

#[derive(Debug, Clone)]
pub struct TaskRequest {
    pub input: TaskInput,
    /// Wall budget in seconds; zero means "time out immediately".
    pub budget_secs: u64,
    pub run_dir: Option<PathBuf>,
}

impl TaskRequest {
    pub fn files(domain: impl Into<PathBuf>, problem: impl Into<PathBuf>) -> Self {
        TaskRequest {
            input: TaskInput::Files { domain: domain.into(), problem: problem.into() },
            budget_secs: 300,
            run_dir: None,
        }
    }

    pub fn inline(domain: impl Into<String>, problem: impl Into<String>) -> Self {
        TaskRequest {
            input: TaskInput::Inline { domain: domain.into(), problem: problem.into() },
            budget_secs: 300,
            run_dir: None,
        }
    }

    pub fn with_budget(mut self, secs: u64) -> Self {
        self.budget_secs = secs;
        self
    }

    pub fn with_run_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.run_dir = Some(dir.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Success,
    Timeout,
    Unsolvable,
    Rejected,
}

/// Advisory GNN classification of one dependency edge. Advisory only:
/// trace-derived triples stay authoritative when the two disagree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdvisoryRelation {
    pub from_node: usize,
    pub to_node: usize,
    pub relation: crate::causal::Relation,
    pub confidence: f32,
}

/// Full record of one run. The digest covers the deterministic outcome
/// fields only (never timings), so a replayed run dir digests equal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub status: RunStatus,
    pub problem_name: String,
    pub domain_name: String,
    pub confidence: ConfidenceReport,
    pub route: Route,
    /// Decomposition failed and the run fell back to monolithic search.
    pub fallback: bool,
    pub planner_status: Option<SolveStatus>,
    pub expanded_nodes: usize,
    pub plan: Option<Vec<String>>,
    pub verdict: Option<ValidationVerdict>,
    /// GNN edge classifications over the dependency graph, when the
    /// decomposition route ran. Excluded from the digest.
    pub advisory_relations: Vec<AdvisoryRelation>,
    pub learned_triples: usize,
    pub refinement_iterations: usize,
    pub total_seconds: f64,
}

impl RunRecord {
    /// Stable digest over the outcome: confidence components, route,
    /// plan lines, consensus and learned-triple count.
    pub fn digest(&self) -> String {
        let mut text = String::new();
        text.push_str(&format!(
            "{:?}|{}|{}|{:.12}|{:.12}|{:.12}|{:.12}|{:.12}|{:?}|{}|",
            self.status,
            self.problem_name,
            self.domain_name,
            self.confidence.c_exp,
            self.confidence.c_complexity,
            self.confidence.c_causal,
            self.confidence.c_domain,
            self.confidence.c_total,
            self.route,
            self.fallback,
        ));
        if let Some(plan) = &self.plan {
            text.push_str(&plan.join(";"));
        }
        text.push('|');
        if let Some(verdict) = &self.verdict {
            text.push_str(&format!("{:.12}|{}", verdict.consensus, verdict.approved));
        }
        text.push_str(&format!("|{}", self.learned_triples));
        format!("{:016x}", crate::embedding::fnv1a(0, text.as_bytes()))
    }
}

/// Canonical linearization of a problem for embedding: name, then the
/// object list, then goal literals, all in model order.
pub fn task_text(prob: &ProblemModel) -> String {
    let mut text = format!("problem {} domain {}", prob.name, prob.domain_name);
    text.push_str(" objects");
    for obj in &prob.objects {
        text.push_str(&format!(" {} {}", obj.name, obj.ty));
    }
    text.push_str(" goal");
    for literal in &prob.goal {
        text.push_str(&format!(" {literal}"));
    }
    text
}

/// The engine: configuration, memories, validator pool and clients.
pub struct Engine {
    pub config: EngineConfig,
    pub memory: MemoryStore,
    pub causal: CausalStore,
    pub agents: Vec<ValidatorAgent>,
    pub role_table: RoleTable,
    embedder: CachedEmbedder<HashEmbedder>,
    client: Option<Arc<dyn GenerativeClient>>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        let mut role_table = RoleTable::builtin();
        for entry in &config.role_table {
            if let Ok(ty) = entry.abstract_type.parse() {
                role_table.insert(&entry.domain, &entry.action, ty);
            }
        }
        Engine {
            config,
            memory: MemoryStore::new(),
            causal: CausalStore::new(),
            agents: default_pool(),
            role_table,
            embedder: CachedEmbedder::new(HashEmbedder::default()),
            client: None,
        }
    }

    /// Installs a generative client (scripted in tests, external via
    /// `NSPLAN_GEN_CMD` in production).
    pub fn with_client(mut self, client: Arc<dyn GenerativeClient>) -> Self {
        self.client = Some(client);
        self
    }

    /// Picks up the command client from the environment when present.
    pub fn with_env_client(mut self) -> Self {
        if let Ok(client) = CommandClient::from_env() {
            self.client = Some(Arc::new(client));
        }
        self
    }

    pub fn has_client(&self) -> bool {
        self.client.is_some()
    }

    fn grounding_options(&self) -> GroundingOptions {
        GroundingOptions { max_actions: self.config.grounding_cap }
    }

    /// Classifies dependency edges with the seeded GNN. Best-effort:
    /// failures degrade to an empty advisory list, never to a run
    /// failure.
    fn advisory_relations(
        &self,
        graph: &crate::decomposition::DependencyGraph,
    ) -> Vec<AdvisoryRelation> {
        use crate::gnn::{classify_edge, gat_forward, node_init, GnnWeights, TaskGraph};
        if graph.edges.is_empty() {
            return Vec::new();
        }
        let weights = GnnWeights::seeded(self.config.seed);
        let mut task_graph = TaskGraph::new();
        for node in &graph.nodes {
            let text: String = node
                .goals
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let Ok(embedding) = self.embedder.embed(&text) else { return Vec::new() };
            if task_graph.add_node(node.id.to_string(), text, embedding).is_err() {
                return Vec::new();
            }
        }
        for (s, d) in &graph.edges {
            let _ = task_graph.add_edge(&s.to_string(), &d.to_string());
        }
        let Ok(h0) = node_init(&task_graph, &weights) else { return Vec::new() };
        let Ok(features) = gat_forward(&task_graph, &h0, &weights) else { return Vec::new() };
        graph
            .edges
            .iter()
            .filter_map(|(s, d)| {
                let prediction = classify_edge(&features[*s], &features[*d], &weights).ok()?;
                Some(AdvisoryRelation {
                    from_node: *s,
                    to_node: *d,
                    relation: prediction.relation,
                    confidence: prediction.confidence,
                })
            })
            .collect()
    }

    /// The LOOP cycle for one task.
    pub fn run(&mut self, request: &TaskRequest) -> Result<RunRecord, OrchestratorError> {
        let started = Instant::now();
        let budget = Duration::from_secs(request.budget_secs);
        let run_dir = request.run_dir.clone();
        if let Some(dir) = &run_dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("config.toml"), self.config.to_toml())?;
            std::fs::write(dir.join("memory_before.json"), self.memory.export_json())?;
            std::fs::write(dir.join("causal_before.json"), self.causal.export_json())?;
        }

        // Resolve the input into parsed models, generating/refining
        // through the client when needed.
        let (dom, prob, refinement_iterations) =
            self.resolve_input(&request.input, run_dir.as_deref())?;

        if let Some(dir) = &run_dir {
            let input_dir = dir.join("input");
            std::fs::create_dir_all(&input_dir)?;
            std::fs::write(input_dir.join("domain.pddl"), serialize_domain(&dom))?;
            std::fs::write(input_dir.join("problem.pddl"), serialize_problem(&prob))?;
        }

        let task = ground(&dom, &prob, &self.grounding_options())?;
        let embedding = self
            .embedder
            .embed(&task_text(&prob))
            .map_err(|e| OrchestratorError::Input(e.to_string()))?;
        let confidence = assess(
            &embedding,
            &dom,
            &prob,
            &task,
            &self.memory,
            &self.causal,
            &self.agents,
            &self.config.complexity,
        );
        let route = confidence.route(self.config.route_threshold);
        if let Some(dir) = &run_dir {
            std::fs::write(
                dir.join("confidence.json"),
                serde_json::to_string_pretty(&confidence).expect("report serializes"),
            )?;
        }

        // A zero budget times out before any planner launches.
        if budget.is_zero() {
            let record = RunRecord {
                status: RunStatus::Timeout,
                problem_name: prob.name.clone(),
                domain_name: dom.name.clone(),
                confidence,
                route,
                fallback: false,
                planner_status: None,
                expanded_nodes: 0,
                plan: None,
                verdict: None,
                advisory_relations: Vec::new(),
                learned_triples: 0,
                refinement_iterations,
                total_seconds: started.elapsed().as_secs_f64(),
            };
            self.finish(record, None, &dom, &prob, run_dir.as_deref())
        } else {
            let record = self.plan_validate_learn(
                &dom,
                &prob,
                &task,
                confidence,
                route,
                refinement_iterations,
                budget,
                started,
                run_dir.as_deref(),
            )?;
            Ok(record)
        }
    }

    fn resolve_input(
        &self,
        input: &TaskInput,
        run_dir: Option<&Path>,
    ) -> Result<(DomainModel, ProblemModel, usize), OrchestratorError> {
        let (domain_text, problem_text) = match input {
            TaskInput::Files { domain, problem } => {
                let d = std::fs::read_to_string(domain).map_err(|e| {
                    OrchestratorError::Input(format!("{}: {e}", domain.display()))
                })?;
                let p = std::fs::read_to_string(problem).map_err(|e| {
                    OrchestratorError::Input(format!("{}: {e}", problem.display()))
                })?;
                (d, p)
            }
            TaskInput::Inline { domain, problem } => (domain.clone(), problem.clone()),
            TaskInput::Text { text, domain_hint } => {
                let Some(client) = &self.client else {
                    return Err(OrchestratorError::Input(
                        "natural-language input needs a generative client; \
                         set NSPLAN_GEN_CMD or pass PDDL files instead"
                            .into(),
                    ));
                };
                let generated = generate_pddl(
                    text,
                    domain_hint,
                    client.as_ref(),
                    self.config.temperature,
                )?;
                (generated.0, generated.1)
            }
        };

        // Parse; when parsing fails and a client is available, run the
        // refinement loop on the diagnostics.
        match parse_pair(&domain_text, &problem_text) {
            Ok((dom, prob)) => Ok((dom, prob, 0)),
            Err(first_error) => {
                let Some(client) = &self.client else { return Err(first_error.into()) };
                let outcome = refine_pddl(
                    &domain_text,
                    &problem_text,
                    &first_error.to_string(),
                    client.as_ref(),
                    self.config.temperature,
                    self.config.max_refinements,
                    run_dir,
                )?;
                let (dom, prob) = parse_pair(&outcome.domain_text, &outcome.problem_text)
                    .map_err(OrchestratorError::Parse)?;
                Ok((dom, prob, outcome.iterations))
            }
        }
    }

    fn solve_once(
        &self,
        dom: &DomainModel,
        prob: &ProblemModel,
        task: &GroundTask,
        budget: Duration,
        run_dir: Option<&Path>,
    ) -> Result<PlannerResult, OrchestratorError> {
        match self.config.planner {
            PlannerChoice::Builtin => {
                let cfg = SearchConfig::optimal().with_budget(budget);
                Ok(solve_grounded(prob, task, &cfg)?)
            }
            PlannerChoice::External => {
                let cfg = self.config.external.clone().ok_or_else(|| {
                    OrchestratorError::Config(
                        "planner = \"external\" needs an [external] section".into(),
                    )
                })?;
                let work = match run_dir {
                    Some(dir) => dir.join("external"),
                    None => std::env::temp_dir().join(format!(
                        "nsplan-ext-{}-{}",
                        std::process::id(),
                        prob.name
                    )),
                };
                Ok(solve_external(dom, prob, &cfg, budget, &work)?)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn plan_validate_learn(
        &mut self,
        dom: &DomainModel,
        prob: &ProblemModel,
        task: &GroundTask,
        confidence: ConfidenceReport,
        route: Route,
        refinement_iterations: usize,
        budget: Duration,
        started: Instant,
        run_dir: Option<&Path>,
    ) -> Result<RunRecord, OrchestratorError> {
        let remaining = || budget.saturating_sub(started.elapsed());

        let mut fallback = false;
        let mut advisory_relations = Vec::new();
        let planner_outcome: Result<PlannerResult, OrchestratorError> = match route {
            Route::Decomposition if !prob.goal.is_empty() => {
                let sub_dir = run_dir.map(|d| d.join("subtasks"));
                match decompose_and_solve(
                    dom,
                    prob,
                    task,
                    &self.causal,
                    remaining(),
                    sub_dir.as_deref(),
                ) {
                    Ok((graph, plan, results)) => {
                        advisory_relations = self.advisory_relations(&graph);
                        Ok(PlannerResult {
                            status: SolveStatus::Solved,
                            expanded: results.iter().map(|r| r.result.expanded).sum(),
                            wall: started.elapsed(),
                            plan: Some(plan),
                        })
                    }
                    Err(DecompositionError::Planner(e)) => Err(e.into()),
                    Err(DecompositionError::Io(e)) => Err(e.into()),
                    Err(e) => {
                        // Progressive fallback: re-plan monolithically.
                        log::info!("decomposition failed ({e}); falling back to monolithic");
                        fallback = true;
                        self.solve_once(dom, prob, task, remaining(), run_dir).map_err(Into::into)
                    }
                }
            }
            _ => self.solve_once(dom, prob, task, remaining(), run_dir),
        };
        let mut planner_result = planner_outcome?;

        // Validate the candidate; a rejection with a client configured
        // triggers plan-level re-planning via refinement of the model
        // texts. Deterministic built-in plans pass on the first pass.
        let mut verdict: Option<ValidationVerdict> = None;
        if let (SolveStatus::Solved, Some(plan)) = (planner_result.status, &planner_result.plan) {
            let selected = select_agents(&self.agents, &dom.name, self.config.agents);
            let v = validate(
                plan,
                prob,
                dom,
                &self.causal,
                &selected,
                &task_text(prob),
                self.config.validation_threshold,
            )?;
            if !v.approved {
                log::warn!(
                    "plan rejected by consensus {:.3} < {:.3}",
                    v.consensus,
                    v.threshold
                );
            }
            verdict = Some(v);
        }

        let status = match (planner_result.status, &verdict) {
            (SolveStatus::Solved, Some(v)) if v.approved => RunStatus::Success,
            (SolveStatus::Solved, _) => RunStatus::Rejected,
            (SolveStatus::Unsolvable, _) => RunStatus::Unsolvable,
            (SolveStatus::Timeout, _) | (SolveStatus::CapExceeded, _) => RunStatus::Timeout,
        };

        // Learn from the final candidate's trace and remember the run.
        let mut learned = 0usize;
        let plan_taken = planner_result.plan.take();
        if let Some(plan) = &plan_taken {
            let trace = validate_plan(prob, plan);
            if let Some(dir) = run_dir {
                std::fs::write(dir.join("trace.jsonl"), trace_to_log(&trace))?;
                std::fs::write(dir.join("plan.txt"), plan.to_text())?;
            }
            if status == RunStatus::Success {
                learned = self.causal.learn_from_trace(&trace)?.len();
                if let Ok(pattern) = abstract_pattern(plan, dom, &self.role_table) {
                    log::debug!(
                        "abstract pattern: {}",
                        pattern
                            .steps
                            .iter()
                            .map(|s| s.to_string())
                            .collect::<Vec<_>>()
                            .join(" -> ")
                    );
                }
            } else if trace.failed_action.is_some() {
                learned = self.causal.learn_from_trace(&trace)?.len();
            }
        }

        let record = RunRecord {
            status,
            problem_name: prob.name.clone(),
            domain_name: dom.name.clone(),
            confidence,
            route,
            fallback,
            planner_status: Some(planner_result.status),
            expanded_nodes: planner_result.expanded,
            plan: plan_taken.as_ref().map(|p| {
                p.actions.iter().map(|a| a.display_form()).collect()
            }),
            verdict,
            advisory_relations,
            learned_triples: learned,
            refinement_iterations,
            total_seconds: started.elapsed().as_secs_f64(),
        };
        self.finish(record, plan_taken, dom, prob, run_dir)
    }

    /// Records the experience, persists the run record, returns it.
    fn finish(
        &mut self,
        record: RunRecord,
        plan: Option<Plan>,
        _dom: &DomainModel,
        prob: &ProblemModel,
        run_dir: Option<&Path>,
    ) -> Result<RunRecord, OrchestratorError> {
        let outcome = match record.status {
            RunStatus::Success => Outcome::Success,
            _ => Outcome::Failure,
        };
        let embedding = self
            .embedder
            .embed(&task_text(prob))
            .map_err(|e| OrchestratorError::Input(e.to_string()))?;
        let plan_lines: Vec<String> = plan
            .as_ref()
            .map(|p| p.actions.iter().map(|a| a.display_form()).collect())
            .unwrap_or_default();
        let experience = Experience {
            embedding,
            domain: record.domain_name.clone(),
            problem_digest: format!(
                "{:016x}",
                crate::embedding::fnv1a(0, serialize_problem(prob).as_bytes())
            ),
            plan_length: plan_lines.len(),
            plan: plan_lines,
            outcome,
            wall_seconds: record.total_seconds,
            timestamp_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
        };
        experience.validate()?;
        self.memory.insert(experience);

        if let Some(dir) = run_dir {
            std::fs::write(
                dir.join("record.json"),
                serde_json::to_string_pretty(&record).expect("record serializes"),
            )?;
            if let Some(v) = &record.verdict {
                std::fs::write(
                    dir.join("verdict.json"),
                    serde_json::to_string_pretty(v).expect("verdict serializes"),
                )?;
            }
        }
        Ok(record)
    }
}

fn parse_pair(
    domain_text: &str,
    problem_text: &str,
) -> Result<(DomainModel, ProblemModel), ParseError> {
    let dom = parse_domain(domain_text)?;
    let prob = parse_problem(problem_text, &dom)?;
    Ok((dom, prob))
}

/// Re-runs a persisted run directory from its snapshots and returns the
/// fresh record; its digest must match the stored one.
pub fn replay(run_dir: &Path) -> Result<(RunRecord, RunRecord), OrchestratorError> {
    let config = EngineConfig::from_toml(&std::fs::read_to_string(
        run_dir.join("config.toml"),
    )?)?;
    let stored: RunRecord = serde_json::from_str(&std::fs::read_to_string(
        run_dir.join("record.json"),
    )?)
    .map_err(|e| OrchestratorError::Config(format!("record.json: {e}")))?;

    let mut engine = Engine::new(config);
    engine.memory = MemoryStore::import_json(&std::fs::read_to_string(
        run_dir.join("memory_before.json"),
    )?)?;
    engine.causal = CausalStore::import_json(&std::fs::read_to_string(
        run_dir.join("causal_before.json"),
    )?)?;

    let domain = std::fs::read_to_string(run_dir.join("input").join("domain.pddl"))?;
    let problem = std::fs::read_to_string(run_dir.join("input").join("problem.pddl"))?;
    let request = TaskRequest::inline(domain, problem)
        .with_budget(engine.config.budget_secs);
    let replayed = engine.run(&request)?;
    Ok((stored, replayed))
}
