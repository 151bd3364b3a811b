//! Fixed-capacity ring of planning experiences with cosine retrieval.
//!
//! Capacity is 1000; when full, inserting evicts exactly the oldest
//! entry. Retrieval considers successful experiences only and scans
//! linearly — at this capacity an index would not pay for itself.

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{cosine, EmbeddingVector};

pub const CAPACITY: usize = 1000;

#[derive(Debug, Error)]
pub enum MemoryError {
    #[error("experience store format error: {0}")]
    Format(String),
    #[error("success experience must carry a nonempty plan")]
    EmptyPlanOnSuccess,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
}

/// One remembered planning episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experience {
    pub embedding: EmbeddingVector,
    pub domain: String,
    /// Content digest of the problem text; identifies the instance
    /// without storing it.
    pub problem_digest: String,
    pub plan: Vec<String>,
    pub outcome: Outcome,
    pub plan_length: usize,
    pub wall_seconds: f64,
    pub timestamp_ms: u64,
}

impl Experience {
    pub fn validate(&self) -> Result<(), MemoryError> {
        if self.outcome == Outcome::Success && self.plan.is_empty() && self.plan_length > 0 {
            return Err(MemoryError::EmptyPlanOnSuccess);
        }
        Ok(())
    }
}

/// A retrieval hit: the experience and its similarity to the query.
#[derive(Debug, Clone)]
pub struct Retrieved<'a> {
    pub experience: &'a Experience,
    pub similarity: f64,
}

/// Ring buffer of recent experiences. No deduplication: recency
/// semantics are exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemoryStore {
    entries: VecDeque<Experience>,
    capacity: usize,
    inserted: u64,
}

impl Default for MemoryStore {
    fn default() -> Self {
        MemoryStore::new()
    }
}

impl MemoryStore {
    pub fn new() -> Self {
        MemoryStore::with_capacity(CAPACITY)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        MemoryStore { entries: VecDeque::with_capacity(capacity.min(CAPACITY)), capacity, inserted: 0 }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_inserted(&self) -> u64 {
        self.inserted
    }

    /// Oldest-first iteration.
    pub fn iter(&self) -> impl Iterator<Item = &Experience> {
        self.entries.iter()
    }

    pub fn insert(&mut self, e: Experience) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(e);
        self.inserted += 1;
    }

    /// Top-k successful experiences by cosine similarity, descending;
    /// ties broken by recency (newer first). Fewer than `k` when the
    /// store has fewer successes.
    pub fn retrieve_similar(&self, query: &EmbeddingVector, k: usize) -> Vec<Retrieved<'_>> {
        let mut scored: Vec<(f64, usize)> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.outcome == Outcome::Success)
            .map(|(i, e)| (cosine(query, &e.embedding), i))
            .collect();
        // Later ring positions are newer.
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(b.1.cmp(&a.1))
        });
        scored
            .into_iter()
            .take(k)
            .map(|(similarity, i)| Retrieved { experience: &self.entries[i], similarity })
            .collect()
    }

    /// Success fraction for a domain plus how many entries it rests on.
    /// A count of zero is reported as such, never as a zero rate.
    pub fn domain_success_rate(&self, domain: &str) -> (f64, usize) {
        let mut successes = 0usize;
        let mut total = 0usize;
        for e in &self.entries {
            if e.domain == domain {
                total += 1;
                if e.outcome == Outcome::Success {
                    successes += 1;
                }
            }
        }
        if total == 0 {
            (0.0, 0)
        } else {
            (successes as f64 / total as f64, total)
        }
    }

    /// Appends one entry to an append-only JSONL log.
    pub fn append_to_log(path: &Path, e: &Experience) -> Result<(), MemoryError> {
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        let line = serde_json::to_string(e).map_err(|err| MemoryError::Format(err.to_string()))?;
        writeln!(file, "{line}")?;
        Ok(())
    }

    /// Replays a JSONL log with ring semantics.
    pub fn load_log(path: &Path) -> Result<Self, MemoryError> {
        let mut store = MemoryStore::new();
        if !path.exists() {
            return Ok(store);
        }
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: Experience = serde_json::from_str(line).map_err(|err| {
                MemoryError::Format(format!("line {}: {err}", lineno + 1))
            })?;
            e.validate()?;
            store.insert(e);
        }
        Ok(store)
    }

    /// Snapshot export: one JSON document, oldest first.
    pub fn export_json(&self) -> String {
        let entries: Vec<&Experience> = self.entries.iter().collect();
        serde_json::to_string_pretty(&entries).expect("experiences serialize")
    }

    /// Snapshot import; validates every entry and applies ring
    /// semantics.
    pub fn import_json(text: &str) -> Result<Self, MemoryError> {
        let entries: Vec<Experience> =
            serde_json::from_str(text).map_err(|e| MemoryError::Format(e.to_string()))?;
        let mut store = MemoryStore::new();
        for e in entries {
            e.validate()?;
            store.insert(e);
        }
        Ok(store)
    }
}
