//! Deterministic 384-dimensional text embeddings.
//!
//! The built-in provider is signed feature hashing over lowercased
//! 1- and 2-gram tokens with a fixed seed, L2-normalized. It is a
//! stand-in for an external sentence embedder: no semantic quality is
//! claimed, but every downstream computation is bit-reproducible.
//! External providers plug in through [`EmbeddingProvider`] under the
//! same dimension and norm contract.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed embedding dimension.
pub const DIM: usize = 384;

const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("text is empty after whitespace trim")]
    EmptyText,
    #[error("expected {DIM} components, got {0}")]
    DimensionMismatch(usize),
    #[error("vector norm {0} is not within 1e-6 of 1")]
    NotUnitNorm(f64),
    #[error("vector contains a non-finite component")]
    NonFinite,
    #[error("embedding provider failed: {0}")]
    Provider(String),
}

/// Unit-norm vector of exactly [`DIM`] finite components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    /// Validates dimension, finiteness and unit norm (±1e-6).
    pub fn from_components(components: Vec<f64>) -> Result<Self, EmbeddingError> {
        if components.len() != DIM {
            return Err(EmbeddingError::DimensionMismatch(components.len()));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(EmbeddingError::NonFinite);
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(EmbeddingError::NotUnitNorm(norm));
        }
        Ok(EmbeddingVector(components))
    }

    /// Normalizes an arbitrary non-zero vector of the right dimension.
    pub fn normalized(mut components: Vec<f64>) -> Result<Self, EmbeddingError> {
        if components.len() != DIM {
            return Err(EmbeddingError::DimensionMismatch(components.len()));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(EmbeddingError::NonFinite);
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(EmbeddingError::NotUnitNorm(0.0));
        }
        for c in &mut components {
            *c /= norm;
        }
        Ok(EmbeddingVector(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        EmbeddingVector(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<f64>> for EmbeddingVector {
    type Error = EmbeddingError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        EmbeddingVector::from_components(v)
    }
}

impl From<EmbeddingVector> for Vec<f64> {
    fn from(v: EmbeddingVector) -> Self {
        v.0
    }
}

/// Cosine similarity of two unit vectors: their dot product.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum()
}

/// Pluggable embedder contract.
pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbeddingError>;
}

/// FNV-1a, seeded. Stable across platforms and runs.
pub(crate) fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64 ^ seed;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Built-in hashing embedder.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    seed: u64,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder { seed: 0x6e73_706c_616e_2d65 }
    }
}

impl HashEmbedder {
    pub fn with_seed(seed: u64) -> Self {
        HashEmbedder { seed }
    }

    fn tokens(text: &str) -> Vec<String> {
        text.to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(|t| t.to_string())
            .collect()
    }

    /// Bucket and sign for one feature string.
    fn feature(&self, feature: &str) -> (usize, f64) {
        let h = fnv1a(self.seed, feature.as_bytes());
        let bucket = (h % DIM as u64) as usize;
        let sign = if (h >> 63) == 0 { 1.0 } else { -1.0 };
        (bucket, sign)
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbeddingError> {
        if text.trim().is_empty() {
            return Err(EmbeddingError::EmptyText);
        }
        let tokens = Self::tokens(text);
        if tokens.is_empty() {
            return Err(EmbeddingError::EmptyText);
        }
        let mut components = vec![0.0f64; DIM];
        for token in &tokens {
            let (bucket, sign) = self.feature(token);
            components[bucket] += sign;
        }
        for pair in tokens.windows(2) {
            let bigram = format!("{} {}", pair[0], pair[1]);
            let (bucket, sign) = self.feature(&bigram);
            components[bucket] += sign;
        }
        // Signed counts can cancel to the zero vector on adversarial
        // inputs; fall back to a single deterministic spike.
        if components.iter().all(|c| *c == 0.0) {
            let (bucket, sign) = self.feature(text.trim());
            components[bucket] = sign;
        }
        EmbeddingVector::normalized(components)
    }
}

/// Caching wrapper keyed by the request text.
pub struct CachedEmbedder<P> {
    inner: P,
    cache: RwLock<HashMap<String, EmbeddingVector>>,
}

impl<P: EmbeddingProvider> CachedEmbedder<P> {
    pub fn new(inner: P) -> Self {
        CachedEmbedder { inner, cache: RwLock::new(HashMap::new()) }
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for CachedEmbedder<P> {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbeddingError> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(text) {
            return Ok(hit.clone());
        }
        let vector = self.inner.embed(text)?;
        self.cache.write().expect("cache lock").insert(text.to_string(), vector.clone());
        Ok(vector)
    }
}

/// External embedder speaking the line protocol: one request line out,
/// 384 whitespace-separated floats back on a single line.
pub struct ProcessEmbedder {
    program: String,
    args: Vec<String>,
}

impl ProcessEmbedder {
    pub fn from_command(command: &str) -> Result<Self, EmbeddingError> {
        let mut tokens = command.split_whitespace().map(str::to_string);
        let program = tokens
            .next()
            .ok_or_else(|| EmbeddingError::Provider("empty embedder command".into()))?;
        Ok(ProcessEmbedder { program, args: tokens.collect() })
    }
}

impl EmbeddingProvider for ProcessEmbedder {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbeddingError> {
        if text.trim().is_empty() {
            return Err(EmbeddingError::EmptyText);
        }
        let mut child = std::process::Command::new(&self.program)
            .args(&self.args)
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .spawn()
            .map_err(|e| EmbeddingError::Provider(e.to_string()))?;
        {
            let stdin = child.stdin.as_mut().expect("piped stdin");
            writeln!(stdin, "{}", text.replace('\n', " "))
                .map_err(|e| EmbeddingError::Provider(e.to_string()))?;
        }
        let stdout = child.stdout.take().expect("piped stdout");
        let mut line = String::new();
        BufReader::new(stdout)
            .read_line(&mut line)
            .map_err(|e| EmbeddingError::Provider(e.to_string()))?;
        let _ = child.wait();
        let components: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| EmbeddingError::Provider(e.to_string()))?;
        EmbeddingVector::normalized(components)
    }
}
