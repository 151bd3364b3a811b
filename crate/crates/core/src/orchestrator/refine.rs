//! PDDL generation and iterative refinement through a generative
//! client.
//!
//! Requests and replies use a fixed sectioned grammar: a `DOMAIN:` line
//! followed by the domain text, then a `PROBLEM:` line and the problem
//! text. Every refinement iteration is logged with a line diff; the
//! loop aborts after five iterations or as soon as a candidate repeats
//! (content-hash no-progress detection).

use std::collections::HashSet;
use std::path::Path;

use crate::clients::{ClientError, GenOptions, GenerativeClient};

use super::{parse_pair, OrchestratorError};

pub const SECTION_DOMAIN: &str = "DOMAIN:";
pub const SECTION_PROBLEM: &str = "PROBLEM:";

#[derive(Debug, Clone)]
pub struct RefineLog {
    pub iteration: usize,
    pub diagnostics: String,
    pub diff: String,
}

#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub domain_text: String,
    pub problem_text: String,
    pub iterations: usize,
    pub log: Vec<RefineLog>,
}

/// Splits a reply into its DOMAIN/PROBLEM sections.
pub fn parse_sections(reply: &str) -> Result<(String, String), ClientError> {
    let mut domain = String::new();
    let mut problem = String::new();
    let mut current: Option<&mut String> = None;
    for line in reply.lines() {
        match line.trim() {
            SECTION_DOMAIN => current = Some(&mut domain),
            SECTION_PROBLEM => current = Some(&mut problem),
            _ => {
                if let Some(section) = current.as_deref_mut() {
                    section.push_str(line);
                    section.push('\n');
                }
            }
        }
    }
    if domain.trim().is_empty() || problem.trim().is_empty() {
        return Err(ClientError::BadReply(
            "reply must contain DOMAIN: and PROBLEM: sections".into(),
        ));
    }
    Ok((domain, problem))
}

/// Natural language → candidate PDDL pair.
pub fn generate_pddl(
    task: &str,
    domain_hint: &str,
    client: &dyn GenerativeClient,
    temperature: f64,
) -> Result<(String, String), OrchestratorError> {
    let request = format!(
        "GENERATE PDDL\nTASK:\n{task}\nDOMAIN HINT: {domain_hint}\n\
         Reply with a typed STRIPS domain and problem in this exact format:\n\
         {SECTION_DOMAIN}\n<domain pddl>\n{SECTION_PROBLEM}\n<problem pddl>\n"
    );
    let reply = client.complete(&request, &GenOptions { temperature })?;
    Ok(parse_sections(&reply)?)
}

/// Iterative repair driven by parser/validator diagnostics.
///
/// Already-valid input returns unchanged with zero iterations.
#[allow(clippy::too_many_arguments)]
pub fn refine_pddl(
    domain_text: &str,
    problem_text: &str,
    diagnostics: &str,
    client: &dyn GenerativeClient,
    temperature: f64,
    max_iterations: usize,
    run_dir: Option<&Path>,
) -> Result<RefineOutcome, OrchestratorError> {
    if parse_pair(domain_text, problem_text).is_ok() {
        return Ok(RefineOutcome {
            domain_text: domain_text.to_string(),
            problem_text: problem_text.to_string(),
            iterations: 0,
            log: Vec::new(),
        });
    }

    let mut seen: HashSet<u64> = HashSet::new();
    let content_hash = |d: &str, p: &str| {
        crate::embedding::fnv1a(1, format!("{d}\u{0}{p}").as_bytes())
    };
    seen.insert(content_hash(domain_text, problem_text));

    let mut current_domain = domain_text.to_string();
    let mut current_problem = problem_text.to_string();
    let mut current_diagnostics = diagnostics.to_string();
    let mut log = Vec::new();

    for iteration in 1..=max_iterations {
        let request = format!(
            "REFINE PDDL\nDIAGNOSTICS:\n{current_diagnostics}\n\
             {SECTION_DOMAIN}\n{current_domain}\n{SECTION_PROBLEM}\n{current_problem}\n\
             Fix the diagnostics and reply with the corrected texts in the same \
             {SECTION_DOMAIN} / {SECTION_PROBLEM} format.\n"
        );
        let reply = client.complete(&request, &GenOptions { temperature })?;
        let (new_domain, new_problem) = parse_sections(&reply)?;

        if !seen.insert(content_hash(&new_domain, &new_problem)) {
            return Err(OrchestratorError::NoProgress);
        }

        let diff = format!(
            "--- domain\n{}\n--- problem\n{}",
            line_diff(&current_domain, &new_domain),
            line_diff(&current_problem, &new_problem)
        );
        if let Some(dir) = run_dir {
            let iter_dir = dir.join("iterations");
            std::fs::create_dir_all(&iter_dir)?;
            std::fs::write(iter_dir.join(format!("iter-{iteration}.domain.pddl")), &new_domain)?;
            std::fs::write(
                iter_dir.join(format!("iter-{iteration}.problem.pddl")),
                &new_problem,
            )?;
            std::fs::write(iter_dir.join(format!("iter-{iteration}.diff.txt")), &diff)?;
        }
        log.push(RefineLog {
            iteration,
            diagnostics: current_diagnostics.clone(),
            diff,
        });

        current_domain = new_domain;
        current_problem = new_problem;
        match parse_pair(&current_domain, &current_problem) {
            Ok(_) => {
                return Ok(RefineOutcome {
                    domain_text: current_domain,
                    problem_text: current_problem,
                    iterations: iteration,
                    log,
                })
            }
            Err(e) => current_diagnostics = e.to_string(),
        }
    }

    Ok(RefineOutcome {
        domain_text: current_domain,
        problem_text: current_problem,
        iterations: max_iterations,
        log,
    })
}

/// Minimal line diff (LCS-based): `-` lines removed, `+` lines added.
pub fn line_diff(old: &str, new: &str) -> String {
    let a: Vec<&str> = old.lines().collect();
    let b: Vec<&str> = new.lines().collect();
    let mut lcs = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in (0..a.len()).rev() {
        for j in (0..b.len()).rev() {
            lcs[i][j] = if a[i] == b[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    let mut out = String::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            out.push_str(&format!("- {}\n", a[i]));
            i += 1;
        } else {
            out.push_str(&format!("+ {}\n", b[j]));
            j += 1;
        }
    }
    for line in &a[i..] {
        out.push_str(&format!("- {line}\n"));
    }
    for line in &b[j..] {
        out.push_str(&format!("+ {line}\n"));
    }
    if out.is_empty() {
        out.push_str("(no changes)\n");
    }
    out
}
