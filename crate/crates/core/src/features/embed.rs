//! Text embeddings behind a pluggable provider.
//!
//! The builtin provider hashes tokens into fixed pseudo-random unit vectors,
//! which keeps the whole pipeline deterministic and offline. An HTTP provider
//! lets contextual-embedding services be swapped in for fidelity studies;
//! its vectors are L2-normalized on receipt. Provider failures surface to the
//! caller — feature pipelines must stay provider-consistent, so there is no
//! silent fallback.

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tokenize;

/// Builtin embedding dimension.
pub const DEFAULT_EMBEDDING_DIM: usize = 64;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding provider request failed: {0}")]
    Provider(String),
    #[error("provider returned vector of dimension {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("provider returned a non-finite or zero vector")]
    Degenerate,
}

/// A unit-norm embedding vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub values: Vec<f64>,
}

impl Embedding {
    /// Normalizes `values` to unit L2 norm. Zero or non-finite input is an
    /// error; callers that want the reserved empty-text vector use
    /// [`Embedding::empty_text`].
    pub fn from_values(values: Vec<f64>) -> Result<Embedding, EmbedError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::Degenerate);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(EmbedError::Degenerate);
        }
        Ok(Embedding {
            values: values.into_iter().map(|v| v / norm).collect(),
        })
    }

    /// The reserved fixed unit vector for empty text: e0 = (1, 0, ..., 0).
    pub fn empty_text(dim: usize) -> Embedding {
        let mut values = vec![0.0; dim];
        values[0] = 1.0;
        Embedding { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn dot(&self, other: &Embedding) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Cosine similarity of two unit vectors, clamped into [-1, 1].
pub fn cosine_similarity(u: &Embedding, v: &Embedding) -> f64 {
    u.dot(v).clamp(-1.0, 1.0)
}

/// Cosine distance 1 - u.v of two unit vectors, in [0, 2].
pub fn cosine_distance(u: &Embedding, v: &Embedding) -> f64 {
    1.0 - cosine_similarity(u, v)
}

/// Text-to-unit-vector encoder.
pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, text: &str) -> Result<Embedding, EmbedError>;
    fn dimension(&self) -> usize;
}

/// Deterministic builtin encoder: each token hashes to a fixed pseudo-random
/// vector; a text embeds as the L2-normalized sum over its tokens.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dim: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder {
            dim: DEFAULT_EMBEDDING_DIM,
        }
    }
}

impl HashEmbedder {
    pub fn new(dim: usize) -> HashEmbedder {
        assert!(dim >= 2, "embedding dimension must be at least 2");
        HashEmbedder { dim }
    }

    fn token_vector(&self, token: &str) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a64(token.as_bytes()));
        (0..self.dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect()
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn embed(&self, text: &str) -> Result<Embedding, EmbedError> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return Ok(Embedding::empty_text(self.dim));
        }
        let mut sum = vec![0.0; self.dim];
        for token in &tokens {
            for (s, v) in sum.iter_mut().zip(self.token_vector(token)) {
                *s += v;
            }
        }
        // Exact cancellation across token vectors is effectively impossible,
        // but fall back to the reserved vector rather than divide by ~0.
        Embedding::from_values(sum).or_else(|_| Ok(Embedding::empty_text(self.dim)))
    }

    fn dimension(&self) -> usize {
        self.dim
    }
}

/// FNV-1a, 64-bit. Stable across platforms and releases.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct HandshakeResponse {
    dimension: usize,
}

/// External embedding service.
///
/// Wire protocol: `GET {base}/handshake` -> `{"dimension": d}`, then
/// `POST {base}/embed` with `{"texts": [string]}` -> `{"vectors": [[real]]}`.
pub struct HttpEmbedder {
    agent: ureq::Agent,
    base_url: String,
    dim: usize,
}

impl HttpEmbedder {
    /// Connects and performs the dimension handshake.
    pub fn connect(base_url: &str, timeout: Duration) -> Result<HttpEmbedder, EmbedError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        let url = format!("{}/handshake", base_url.trim_end_matches('/'));
        let mut response = agent
            .get(&url)
            .call()
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        let handshake: HandshakeResponse =
            serde_json::from_str(&body).map_err(|e| EmbedError::Provider(e.to_string()))?;
        if handshake.dimension < 2 {
            return Err(EmbedError::Dimension {
                got: handshake.dimension,
                expected: 2,
            });
        }
        Ok(HttpEmbedder {
            agent,
            base_url: base_url.trim_end_matches('/').to_string(),
            dim: handshake.dimension,
        })
    }
}

impl EmbeddingProvider for HttpEmbedder {
    fn embed(&self, text: &str) -> Result<Embedding, EmbedError> {
        if tokenize(text).is_empty() {
            return Ok(Embedding::empty_text(self.dim));
        }
        let url = format!("{}/embed", self.base_url);
        let payload = serde_json::to_string(&EmbedRequest { texts: vec![text] })
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        let mut http_response = self
            .agent
            .post(&url)
            .header("content-type", "application/json")
            .send(&payload)
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        let body = http_response
            .body_mut()
            .read_to_string()
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        let response: EmbedResponse =
            serde_json::from_str(&body).map_err(|e| EmbedError::Provider(e.to_string()))?;
        let vector = response
            .vectors
            .into_iter()
            .next()
            .ok_or_else(|| EmbedError::Provider("empty vectors array".into()))?;
        if vector.len() != self.dim {
            return Err(EmbedError::Dimension {
                got: vector.len(),
                expected: self.dim,
            });
        }
        Embedding::from_values(vector)
    }

    fn dimension(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_texts_embed_identically() {
        let embedder = HashEmbedder::default();
        let a = embedder.embed("took my pills this morning").unwrap();
        let b = embedder.embed("took my pills this morning").unwrap();
        assert_eq!(a, b);
        assert!(cosine_distance(&a, &b).abs() < 1e-12);
    }

    #[test]
    fn empty_text_is_reserved_unit_vector() {
        let embedder = HashEmbedder::default();
        let e = embedder.embed("").unwrap();
        assert_eq!(e, Embedding::empty_text(64));
        let norm = e.dot(&e).sqrt();
        assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn embeddings_are_unit_norm() {
        let embedder = HashEmbedder::default();
        for text in ["done", "a b c d e f g", "the same word word word"] {
            let e = embedder.embed(text).unwrap();
            let norm = e.dot(&e).sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "norm {norm} for {text:?}");
        }
    }

    #[test]
    fn disjoint_texts_are_near_orthogonal() {
        // Mean |cos| over 100 token-disjoint pairs stays well under 0.3.
        let embedder = HashEmbedder::default();
        let mut total = 0.0;
        for i in 0..100 {
            let a = format!("alpha{i} bravo{i} charlie{i} delta{i}");
            let b = format!("echo{i} foxtrot{i} golf{i} hotel{i}");
            let ea = embedder.embed(&a).unwrap();
            let eb = embedder.embed(&b).unwrap();
            total += cosine_similarity(&ea, &eb).abs();
        }
        let mean = total / 100.0;
        assert!(mean < 0.3, "mean |cos| {mean}");
    }

    #[test]
    fn cosine_distance_identities() {
        let u = Embedding::from_values(vec![1.0, 0.0]).unwrap();
        let v = Embedding::from_values(vec![0.0, 1.0]).unwrap();
        let w = Embedding::from_values(vec![-1.0, 0.0]).unwrap();
        assert_eq!(cosine_distance(&u, &u), 0.0);
        assert_eq!(cosine_distance(&u, &v), 1.0);
        assert_eq!(cosine_distance(&u, &w), 2.0);
    }

    #[test]
    fn repeated_tokens_shift_the_embedding() {
        let embedder = HashEmbedder::default();
        let once = embedder.embed("good morning").unwrap();
        let thrice = embedder.embed("good good good morning").unwrap();
        assert!(cosine_distance(&once, &thrice) > 1e-6);
    }
}
