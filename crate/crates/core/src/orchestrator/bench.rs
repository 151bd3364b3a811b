//! Benchmark harness over a manifest of domain/problem pairs.
//!
//! Instances run sequentially in manifest order through one shared
//! engine, so later instances benefit from earlier learning. Missing or
//! broken files fail their own row and the run continues.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Engine, EngineConfig, OrchestratorError, RunStatus, TaskRequest};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchInstance {
    pub domain: PathBuf,
    pub problem: PathBuf,
    /// Reference optimal length, when known; enables the optimality
    /// column.
    pub optimal_length: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BenchManifest {
    #[serde(default, rename = "instance")]
    pub instances: Vec<BenchInstance>,
}

impl BenchManifest {
    pub fn from_toml(text: &str) -> Result<Self, OrchestratorError> {
        toml::from_str(text).map_err(|e| OrchestratorError::Config(e.to_string()))
    }

    /// Resolves relative instance paths against the manifest location.
    pub fn resolve_relative_to(&mut self, base: &Path) {
        for instance in &mut self.instances {
            if instance.domain.is_relative() {
                instance.domain = base.join(&instance.domain);
            }
            if instance.problem.is_relative() {
                instance.problem = base.join(&instance.problem);
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub domain_file: String,
    pub problem_file: String,
    pub domain_name: Option<String>,
    pub problem_name: Option<String>,
    pub success: bool,
    pub plan_length: Option<usize>,
    pub optimal: Option<bool>,
    pub wall_seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSummary {
    pub domain: String,
    pub instances: usize,
    pub success_rate: f64,
    /// Fraction of reference-checked successes that matched the
    /// reference length. `None` when no instance carried a reference.
    pub optimality_rate: Option<f64>,
    pub mean_wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub domains: Vec<DomainSummary>,
}

impl BenchReport {
    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<14} {:<16} {:>8} {:>8} {:>9}  {}\n",
            "domain", "problem", "solved", "length", "time(s)", "note"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<14} {:<16} {:>8} {:>8} {:>9.3}  {}\n",
                row.domain_name.as_deref().unwrap_or("-"),
                row.problem_name.as_deref().unwrap_or("-"),
                if row.success { "yes" } else { "no" },
                row.plan_length.map_or("-".into(), |l| l.to_string()),
                row.wall_seconds,
                row.error.as_deref().unwrap_or(""),
            ));
        }
        out.push('\n');
        out.push_str(&format!(
            "{:<14} {:>9} {:>10} {:>12} {:>12}\n",
            "domain", "instances", "success%", "optimality%", "mean time(s)"
        ));
        for d in &self.domains {
            out.push_str(&format!(
                "{:<14} {:>9} {:>9.1}% {:>11}% {:>12}\n",
                d.domain,
                d.instances,
                d.success_rate * 100.0,
                d.optimality_rate
                    .map_or("-".into(), |r| format!("{:.1}", r * 100.0)),
                d.mean_wall_seconds
                    .map_or("-".into(), |t| format!("{t:.3}")),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every manifest instance under the configured budget.
pub fn run_bench(
    config: &EngineConfig,
    manifest: &BenchManifest,
) -> Result<BenchReport, OrchestratorError> {
    let mut engine = Engine::new(config.clone()).with_env_client();
    let mut rows = Vec::with_capacity(manifest.instances.len());

    for instance in &manifest.instances {
        let started = Instant::now();
        let mut row = BenchRow {
            domain_file: instance.domain.display().to_string(),
            problem_file: instance.problem.display().to_string(),
            domain_name: None,
            problem_name: None,
            success: false,
            plan_length: None,
            optimal: None,
            wall_seconds: 0.0,
            error: None,
        };
        let request = TaskRequest::files(&instance.domain, &instance.problem)
            .with_budget(config.budget_secs);
        match engine.run(&request) {
            Ok(record) => {
                row.domain_name = Some(record.domain_name.clone());
                row.problem_name = Some(record.problem_name.clone());
                row.success = record.status == RunStatus::Success;
                row.plan_length = record.plan.as_ref().map(|p| p.len());
                row.optimal = match (instance.optimal_length, &row.plan_length) {
                    (Some(reference), Some(length)) if row.success => {
                        Some(*length == reference)
                    }
                    _ => None,
                };
                if !row.success {
                    row.error = Some(format!("{:?}", record.status));
                }
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row.wall_seconds = started.elapsed().as_secs_f64();
        rows.push(row);
    }

    Ok(BenchReport { domains: summarize(&rows), rows })
}

fn summarize(rows: &[BenchRow]) -> Vec<DomainSummary> {
    let mut domains: Vec<String> = rows
        .iter()
        .map(|r| r.domain_name.clone().unwrap_or_else(|| "(unparsed)".into()))
        .collect();
    domains.sort();
    domains.dedup();

    domains
        .into_iter()
        .map(|domain| {
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.domain_name.as_deref().unwrap_or("(unparsed)") == domain)
                .collect();
            let successes: Vec<&&BenchRow> = group.iter().filter(|r| r.success).collect();
            let checked: Vec<&&BenchRow> =
                group.iter().filter(|r| r.optimal.is_some()).collect();
            let optimality_rate = if checked.is_empty() {
                None
            } else {
                Some(
                    checked.iter().filter(|r| r.optimal == Some(true)).count() as f64
                        / checked.len() as f64,
                )
            };
            DomainSummary {
                instances: group.len(),
                success_rate: if group.is_empty() {
                    0.0
                } else {
                    successes.len() as f64 / group.len() as f64
                },
                optimality_rate,
                mean_wall_seconds: if successes.is_empty() {
                    None
                } else {
                    Some(
                        successes.iter().map(|r| r.wall_seconds).sum::<f64>()
                            / successes.len() as f64,
                    )
                },
                domain,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn write_fixture_files(dir: &Path) -> BenchManifest {
        let mut instances = Vec::new();
        for fixture in fixtures::ALL {
            let d = dir.join(format!("{}.domain.pddl", fixture.name));
            let p = dir.join(format!("{}.problem.pddl", fixture.name));
            std::fs::write(&d, fixture.domain).unwrap();
            std::fs::write(&p, fixture.problem).unwrap();
            instances.push(BenchInstance {
                domain: d,
                problem: p,
                optimal_length: Some(fixture.optimal_length),
            });
        }
        BenchManifest { instances }
    }

    #[test]
    fn full_fixture_suite_is_solved_optimally() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_fixture_files(dir.path());
        let report = run_bench(&EngineConfig::default(), &manifest).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert!(report.rows.iter().all(|r| r.success), "{:#?}", report.rows);
        assert!(report.rows.iter().all(|r| r.optimal == Some(true)));
        for d in &report.domains {
            assert_eq!(d.success_rate, 1.0);
            assert_eq!(d.optimality_rate, Some(1.0));
        }
        let table = report.to_table();
        assert!(table.contains("blocksworld"));
        assert!(table.contains("100.0%"));
    }

    #[test]
    fn missing_file_fails_only_its_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = write_fixture_files(dir.path());
        manifest.instances[0].problem = dir.path().join("does-not-exist.pddl");
        let report = run_bench(&EngineConfig::default(), &manifest).unwrap();
        assert!(!report.rows[0].success);
        assert!(report.rows[0].error.is_some());
        assert!(report.rows[1..].iter().all(|r| r.success));
    }

    #[test]
    fn empty_manifest_is_an_empty_report() {
        let report =
            run_bench(&EngineConfig::default(), &BenchManifest::default()).unwrap();
        assert!(report.rows.is_empty());
        assert!(report.domains.is_empty());
    }

    #[test]
    fn manifest_parses_from_toml() {
        let text = "[[instance]]\ndomain = \"d.pddl\"\nproblem = \"p.pddl\"\noptimal_length = 6\n";
        let mut manifest = BenchManifest::from_toml(text).unwrap();
        assert_eq!(manifest.instances.len(), 1);
        manifest.resolve_relative_to(Path::new("/base"));
        assert_eq!(manifest.instances[0].domain, PathBuf::from("/base/d.pddl"));
    }
}
