//! Semantic features for off-topic detection.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::embed::{cosine_distance, cosine_similarity, EmbedError, Embedding, EmbeddingProvider};
use super::tokenize;
use crate::simulator::{InteractionLog, ResponseRecord};

pub use crate::textgen::canonical_reminder_text;

const STOPWORDS_TXT: &str = include_str!("../../data/stopwords.txt");

/// Responses in a user's baseline period, presumed anomaly-free.
const BASELINE_RESPONSES: usize = 10;

#[derive(Debug, Error)]
pub enum SemanticError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("log has no acknowledged baseline responses")]
    NoBaseline,
    #[error("record is not acknowledged; semantic features need response text")]
    NotAcknowledged,
}

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS_TXT.lines().filter(|l| !l.is_empty()).collect())
}

/// Lowercased, stopword-filtered tokens.
pub fn content_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !stopwords().contains(t.as_str()))
        .collect()
}

/// Jaccard index over content-token sets. Zero when either side has no
/// content tokens.
pub fn keyword_overlap(a_text: &str, b_text: &str) -> f64 {
    let a: HashSet<String> = content_tokens(a_text).into_iter().collect();
    let b: HashSet<String> = content_tokens(b_text).into_iter().collect();
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let intersection = a.intersection(&b).count() as f64;
    let union = a.union(&b).count() as f64;
    intersection / union
}

/// Per-response semantic view consumed by the off-topic detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticFeatures {
    /// Cosine distance from the expected response embedding, in [0, 2].
    pub drift: f64,
    /// Cosine similarity to the event's prompt text, in [-1, 1].
    pub sim_prompt: f64,
    /// Cosine similarity to the canonical reminder text, in [-1, 1].
    pub sim_reminder: f64,
    /// Jaccard keyword overlap with the prompt, in [0, 1].
    pub keyword_overlap: f64,
}

impl SemanticFeatures {
    pub fn as_vec(&self) -> Vec<f64> {
        vec![
            self.drift,
            self.sim_prompt,
            self.sim_reminder,
            self.keyword_overlap,
        ]
    }

    pub const DIM: usize = 4;
}

/// The "expected response" for drift: the L2-normalized centroid of the
/// user's first-ten-responses embeddings, restricted to the record's
/// reminder type when the baseline contains any, otherwise over the whole
/// baseline.
pub fn expected_response_embedding(
    log: &InteractionLog,
    record: &ResponseRecord,
    provider: &dyn EmbeddingProvider,
) -> Result<Embedding, SemanticError> {
    let baseline: Vec<&ResponseRecord> = log.acknowledged().take(BASELINE_RESPONSES).collect();
    if baseline.is_empty() {
        return Err(SemanticError::NoBaseline);
    }
    let matching: Vec<&&ResponseRecord> = baseline
        .iter()
        .filter(|r| r.event.reminder_type == record.event.reminder_type)
        .collect();
    let chosen: Vec<&ResponseRecord> = if matching.is_empty() {
        baseline.clone()
    } else {
        matching.into_iter().copied().collect()
    };

    let dim = provider.dimension();
    let mut sum = vec![0.0; dim];
    for r in chosen {
        let text = r.response_text.as_deref().unwrap_or_default();
        let e = provider.embed(text)?;
        for (s, v) in sum.iter_mut().zip(&e.values) {
            *s += v;
        }
    }
    Ok(Embedding::from_values(sum).unwrap_or_else(|_| Embedding::empty_text(dim)))
}

/// Computes the four semantic features for an acknowledged record.
pub fn semantic_features(
    log: &InteractionLog,
    record: &ResponseRecord,
    provider: &dyn EmbeddingProvider,
) -> Result<SemanticFeatures, SemanticError> {
    let response = record
        .response_text
        .as_deref()
        .ok_or(SemanticError::NotAcknowledged)?;
    let response_embedding = provider.embed(response)?;
    let expected = expected_response_embedding(log, record, provider)?;
    let prompt_embedding = provider.embed(&record.event.prompt_text)?;
    let reminder_embedding =
        provider.embed(canonical_reminder_text(record.event.reminder_type))?;

    Ok(SemanticFeatures {
        drift: cosine_distance(&response_embedding, &expected),
        sim_prompt: cosine_similarity(&response_embedding, &prompt_embedding),
        sim_reminder: cosine_similarity(&response_embedding, &reminder_embedding),
        keyword_overlap: keyword_overlap(response, &record.event.prompt_text),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::HashEmbedder;
    use crate::persona::{builtin_personas, Modality, ReminderType};
    use crate::simulator::{EventSource, ReminderEvent};

    fn record(reminder_type: ReminderType, day: u32, text: Option<&str>) -> ResponseRecord {
        ResponseRecord {
            event: ReminderEvent {
                event_id: 0,
                day,
                t_reminder: day as u64 * 1440 + 540,
                reminder_type,
                location: "home".into(),
                prompt_text: canonical_reminder_text(reminder_type).into(),
                source: EventSource::Routine,
            },
            acknowledged: text.is_some(),
            t_ack: text.map(|_| day as f64 * 1440.0 + 545.0),
            response_text: text.map(|t| t.to_string()),
            modality: Modality::Typed,
            anomaly_label: None,
        }
    }

    fn log_of(records: Vec<ResponseRecord>) -> InteractionLog {
        InteractionLog {
            persona_id: 1,
            seed: 0,
            horizon_days: 60,
            anomaly_spec: None,
            warnings: vec![],
            records,
        }
    }

    #[test]
    fn keyword_overlap_cases() {
        assert_eq!(keyword_overlap("took my pills", "took my pills"), 1.0);
        assert_eq!(keyword_overlap("blue car outside", "took my pills"), 0.0);
        // {a,b,c} vs {b,c,d} as content tokens -> 2/4.
        assert_eq!(keyword_overlap("alpha beta gamma", "beta gamma delta"), 0.5);
        assert_eq!(keyword_overlap("", ""), 0.0);
        // Stopword-only text has no content tokens.
        assert_eq!(keyword_overlap("the of and", "the of and"), 0.0);
    }

    #[test]
    fn identical_baseline_gives_zero_drift() {
        let provider = HashEmbedder::default();
        let records: Vec<ResponseRecord> = (0..12)
            .map(|d| record(ReminderType::Medication, d, Some("done thanks")))
            .collect();
        let log = log_of(records);
        let f = semantic_features(&log, &log.records[11], &provider).unwrap();
        assert!(f.drift.abs() < 1e-9, "drift {}", f.drift);
    }

    #[test]
    fn response_equal_to_prompt_has_unit_similarity() {
        let provider = HashEmbedder::default();
        let mut r = record(
            ReminderType::Medication,
            0,
            Some("Time to take your medication."),
        );
        r.event.prompt_text = "Time to take your medication.".into();
        let log = log_of(vec![r]);
        let f = semantic_features(&log, &log.records[0], &provider).unwrap();
        assert!((f.sim_prompt - 1.0).abs() < 1e-9);
        assert!((f.sim_reminder - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_baseline_centroid_drift() {
        // Two baseline responses with orthogonal embeddings: the centroid is
        // the normalized sum, so drift to either is 1 - 1/sqrt(2).
        struct TwoVec;
        impl EmbeddingProvider for TwoVec {
            fn embed(&self, text: &str) -> Result<Embedding, EmbedError> {
                let v = match text {
                    "aaa" => vec![1.0, 0.0],
                    _ => vec![0.0, 1.0],
                };
                Embedding::from_values(v)
            }
            fn dimension(&self) -> usize {
                2
            }
        }
        let records = vec![
            record(ReminderType::Medication, 0, Some("aaa")),
            record(ReminderType::Medication, 0, Some("bbb")),
        ];
        let log = log_of(records);
        let expected =
            expected_response_embedding(&log, &log.records[0], &TwoVec).unwrap();
        let e_a = TwoVec.embed("aaa").unwrap();
        let drift = cosine_distance(&e_a, &expected);
        assert!((drift - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn baseline_falls_back_across_reminder_types() {
        let provider = HashEmbedder::default();
        let mut records: Vec<ResponseRecord> = (0..10)
            .map(|d| record(ReminderType::Medication, d, Some("done thanks")))
            .collect();
        records.push(record(ReminderType::Household, 20, Some("done thanks")));
        let log = log_of(records);
        // No household responses in the baseline: falls back to the whole
        // baseline, which embeds identically here.
        let f = semantic_features(&log, &log.records[10], &provider).unwrap();
        assert!(f.drift.abs() < 1e-9);
    }

    #[test]
    fn missing_baseline_is_an_error() {
        let provider = HashEmbedder::default();
        let log = log_of(vec![record(ReminderType::Medication, 0, None)]);
        let unacked = &log.records[0];
        assert!(matches!(
            expected_response_embedding(&log, unacked, &provider),
            Err(SemanticError::NoBaseline)
        ));
    }

    #[test]
    fn distractor_responses_have_zero_overlap() {
        let provider = HashEmbedder::default();
        let mut records: Vec<ResponseRecord> = (0..10)
            .map(|d| record(ReminderType::Medication, d, Some("took my medication thanks")))
            .collect();
        records.push(record(
            ReminderType::Medication,
            20,
            Some("the birds outside were very loud earlier"),
        ));
        let log = log_of(records);
        let f = semantic_features(&log, &log.records[10], &provider).unwrap();
        assert_eq!(f.keyword_overlap, 0.0);
        assert!(f.drift > 0.5, "distractor drift {}", f.drift);
    }
}
