//! Feature extraction: tone features, deterministic embeddings, semantic
//! features, and baseline normalization.

mod embed;
mod semantic;
mod tone;

pub use embed::{
    cosine_distance, cosine_similarity, EmbedError, Embedding, EmbeddingProvider, HashEmbedder,
    HttpEmbedder, DEFAULT_EMBEDDING_DIM,
};
pub use semantic::{
    canonical_reminder_text, content_tokens, expected_response_embedding, keyword_overlap,
    semantic_features, SemanticError, SemanticFeatures,
};
pub use tone::{is_positive_token, tone_features, ToneFeatures};

use serde::{Deserialize, Serialize};

/// Floor applied to standard deviations before any division.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Splits text into lowercase word tokens. Apostrophes are kept inside
/// tokens ("don't" is one token); everything else non-alphanumeric splits.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        let lower = ch.to_ascii_lowercase();
        if lower.is_alphanumeric() || lower == '\'' {
            current.push(lower);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    // Strip bare apostrophe runs produced by quoted text.
    tokens.retain(|t| t.chars().any(|c| c.is_alphanumeric()));
    tokens
}

/// Per-feature mean and standard deviation over a baseline window
/// (a user's first responses, presumed anomaly-free).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl BaselineStats {
    /// Population statistics over `rows` (each row one observation).
    pub fn from_rows(rows: &[Vec<f64>]) -> BaselineStats {
        assert!(!rows.is_empty(), "baseline requires at least one row");
        let dim = rows[0].len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; dim];
        for row in rows {
            for (m, x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; dim];
        for row in rows {
            for ((s, x), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (x - m) * (x - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
        }
        BaselineStats { means, stds }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }
}

/// Componentwise (x - mu) / max(sigma, 1e-6).
pub fn z_normalize(vector: &[f64], stats: &BaselineStats) -> Vec<f64> {
    assert_eq!(vector.len(), stats.dim(), "dimension mismatch");
    vector
        .iter()
        .zip(stats.means.iter().zip(&stats.stds))
        .map(|(x, (m, s))| (x - m) / s.max(SIGMA_FLOOR))
        .collect()
}

/// Scalar tracked by the tone-task control charts: the mean of the four
/// tone-feature z-scores against the user's baseline.
pub fn composite_tone_index(features: &ToneFeatures, stats: &BaselineStats) -> f64 {
    let z = z_normalize(&features.as_vec(), stats);
    z.iter().sum::<f64>() / z.len() as f64
}
