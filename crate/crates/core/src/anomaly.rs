//! Progressive anomaly injection.
//!
//! Two anomaly kinds are supported: flattened sentiment (reduced emotional
//! tone and verbosity) and off-topic drift (responses wander away from the
//! prompt). An anomaly occupies a window of days; severity ramps from 1 to 3
//! across the window and drives both the probability and the strength of
//! each response modification. Ground truth is exact: a record carries a
//! label if and only if its text was rewritten.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{content_tokens, keyword_overlap, tokenize, tone_features};
use crate::persona::Modality;
use crate::simulator::InteractionLog;

/// Anomaly onset never lands before this day, keeping the detectors'
/// baseline period (a user's first responses) anomaly-free.
pub const MIN_ONSET_DAY: u32 = 10;

#[derive(Debug, Error)]
pub enum AnomalyError {
    #[error("horizon {horizon} days is too small for a {speed:?} window starting at day {min_onset} or later")]
    HorizonTooSmall {
        horizon: u32,
        speed: Speed,
        min_onset: u32,
    },
    #[error("window [{t_start}, {t_start}+{duration}) exceeds horizon {horizon}")]
    WindowInfeasible {
        t_start: u32,
        duration: u32,
        horizon: u32,
    },
    #[error("log already carries {0:?} labels overlapping the window")]
    AlreadyLabeled(AnomalyKind),
    #[error("invalid anomaly spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    FlattenedSentiment,
    OffTopic,
}

impl AnomalyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnomalyKind::FlattenedSentiment => "flattened_sentiment",
            AnomalyKind::OffTopic => "off_topic",
        }
    }
}

/// Progression speed classes and their window-length ranges in days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speed {
    Slow,
    Medium,
    Fast,
}

impl Speed {
    pub const ALL: [Speed; 3] = [Speed::Slow, Speed::Medium, Speed::Fast];

    /// Inclusive duration range in days.
    pub fn duration_range(self) -> (u32, u32) {
        match self {
            Speed::Slow => (15, 20),
            Speed::Medium => (10, 14),
            Speed::Fast => (6, 8),
        }
    }

    /// Severity ramp rate: 2 for slow, 5 for fast, 3 interpolated for medium.
    pub fn default_alpha(self) -> f64 {
        match self {
            Speed::Slow => 2.0,
            Speed::Medium => 3.0,
            Speed::Fast => 5.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Speed::Slow => "slow",
            Speed::Medium => "medium",
            Speed::Fast => "fast",
        }
    }
}

/// A concrete injected anomaly: kind, speed class, window, and ramp rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalySpec {
    pub anomaly_type: AnomalyKind,
    pub speed: Speed,
    pub t_start_day: u32,
    pub duration_days: u32,
    pub alpha: f64,
}

impl AnomalySpec {
    pub fn new(
        anomaly_type: AnomalyKind,
        speed: Speed,
        t_start_day: u32,
        duration_days: u32,
    ) -> AnomalySpec {
        AnomalySpec {
            anomaly_type,
            speed,
            t_start_day,
            duration_days,
            alpha: speed.default_alpha(),
        }
    }

    /// Stable identifier recorded on every label this spec produces.
    pub fn spec_id(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.anomaly_type.as_str(),
            self.speed.as_str(),
            self.t_start_day,
            self.duration_days
        )
    }

    pub fn end_day(&self) -> u32 {
        self.t_start_day + self.duration_days
    }

    pub fn validate(&self) -> Result<(), AnomalyError> {
        let (lo, hi) = self.speed.duration_range();
        if self.duration_days < lo || self.duration_days > hi {
            return Err(AnomalyError::InvalidSpec(format!(
                "{:?} duration must lie in [{lo}, {hi}], got {}",
                self.speed, self.duration_days
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(AnomalyError::InvalidSpec(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Ground-truth marker attached to each modified record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyLabel {
    pub anomaly_type: AnomalyKind,
    /// 1..=3.
    pub severity: u8,
    pub spec_ref: String,
}

/// Samples a window for the given speed: duration uniform over the speed's
/// range, onset uniform over [`MIN_ONSET_DAY`, horizon - duration].
pub fn sample_window<R: Rng + ?Sized>(
    speed: Speed,
    horizon_days: u32,
    rng: &mut R,
) -> Result<(u32, u32), AnomalyError> {
    let (lo, hi) = speed.duration_range();
    if horizon_days < MIN_ONSET_DAY + hi {
        return Err(AnomalyError::HorizonTooSmall {
            horizon: horizon_days,
            speed,
            min_onset: MIN_ONSET_DAY,
        });
    }
    let duration = rng.random_range(lo..=hi);
    let t_start = rng.random_range(MIN_ONSET_DAY..=horizon_days - duration);
    Ok((t_start, duration))
}

/// Severity ramp: 0 outside the window, otherwise
/// min(3, ceil(alpha * (t - t_start) / d) + 1).
pub fn severity_at(t_day: u32, spec: &AnomalySpec) -> u8 {
    if t_day < spec.t_start_day || t_day >= spec.end_day() {
        return 0;
    }
    let delta = (t_day - spec.t_start_day) as f64;
    let raw = (spec.alpha * delta / spec.duration_days as f64).ceil() + 1.0;
    raw.min(3.0) as u8
}

/// Probability that a response inside the window is modified at the given
/// severity. Monotone by construction.
pub fn modification_probability(severity: u8) -> f64 {
    match severity {
        1 => 0.4,
        2 => 0.7,
        3 => 0.95,
        other => panic!("severity must be 1..=3, got {other}"),
    }
}

/// Minimal neutral acknowledgments used at full flattening severity. None of
/// these tokens carries a sentiment-lexicon score.
const FLAT_POOL_VOICE: &[&str] = &[
    "done", "ok", "yes", "okay", "yeah", "mm", "done now", "all done", "fine",
];
const FLAT_POOL_TYPED: &[&str] = &[
    "Done.", "Ok.", "Yes.", "Okay.", "Yeah.", "Mm.", "Done now.", "All done.", "Fine.",
];

/// Unrelated-topic utterances for off-topic injection. The pool is built to
/// share no content token with any builtin reminder prompt, so full-severity
/// replacements have zero keyword overlap with the prompt.
const DISTRACTOR_POOL: &[&str] = &[
    "the birds outside were very loud earlier",
    "i saw a blue car parked across the street",
    "my sister used to grow roses in her garden",
    "there was an old film on the television",
    "the kettle has been whistling for ages",
    "we went fishing at the lake years ago",
    "that shop on the corner sells white bread",
    "the neighbours painted their fence last week",
    "i keep hearing the radio from next door",
    "somebody put a parcel by the gate",
    "the clouds looked like mountains yesterday",
    "my old coat still hangs in the hallway",
];

fn count_positive_tokens(text: &str) -> usize {
    tokenize(text)
        .iter()
        .filter(|t| crate::features::is_positive_token(t))
        .count()
}

/// Fraction of words kept at severities 1 and 2.
const FLATTEN_KEEP: [f64; 2] = [0.75, 0.5];
/// Per-token probability of dropping a positive-lexicon word.
const FLATTEN_DROP_POSITIVE: [f64; 2] = [0.5, 0.8];

/// Rewrites `text` with flattened affect. Guarantees, for any input: the
/// output never gains positive-lexicon tokens, never gains tokens, and never
/// increases compound sentiment; when a candidate rewrite would violate any
/// of these (already-flat or negative inputs), the input is returned
/// unchanged.
pub fn apply_flattening<R: Rng + ?Sized>(
    text: &str,
    severity: u8,
    modality: Modality,
    rng: &mut R,
) -> String {
    assert!((1..=3).contains(&severity), "severity must be 1..=3");
    let candidate = if severity == 3 {
        let pool = match modality {
            Modality::Typed => FLAT_POOL_TYPED,
            Modality::Voice => FLAT_POOL_VOICE,
        };
        pool[rng.random_range(0..pool.len())].to_string()
    } else {
        let idx = (severity - 1) as usize;
        let mut words: Vec<String> = text
            .split_whitespace()
            .map(|w| w.replace('!', ""))
            .filter(|w| !w.is_empty())
            .collect();
        words.retain(|w| {
            let tokens = tokenize(w);
            let positive = tokens.iter().any(|t| crate::features::is_positive_token(t));
            !(positive && rng.random::<f64>() < FLATTEN_DROP_POSITIVE[idx])
        });
        let keep = ((words.len() as f64 * FLATTEN_KEEP[idx]).round() as usize).max(1);
        words.truncate(keep);
        words.join(" ")
    };

    let ok = tone_features(&candidate).compound_sentiment
        <= tone_features(text).compound_sentiment
        && tokenize(&candidate).len() <= tokenize(text).len()
        && count_positive_tokens(&candidate) <= count_positive_tokens(text);
    if ok {
        candidate
    } else {
        text.to_string()
    }
}

/// Rewrites `text` with off-topic drift. Severity 1 blends the front half of
/// the original with half a distractor (retaining prompt overlap whenever
/// the original had any); severity 2 keeps only a stub of the original;
/// severity 3 is a pure distractor.
pub fn apply_offtopic<R: Rng + ?Sized>(
    text: &str,
    severity: u8,
    prompt_text: &str,
    rng: &mut R,
) -> String {
    assert!((1..=3).contains(&severity), "severity must be 1..=3");
    let distractor = DISTRACTOR_POOL[rng.random_range(0..DISTRACTOR_POOL.len())];
    if severity == 3 {
        return distractor.to_string();
    }

    let words: Vec<&str> = text.split_whitespace().collect();
    let d_words: Vec<&str> = distractor.split_whitespace().collect();
    let (orig_keep, dist_take) = if severity == 1 {
        (words.len().div_ceil(2), d_words.len().div_ceil(2))
    } else {
        (words.len().div_ceil(4), d_words.len())
    };
    let mut out: Vec<String> = words[..orig_keep.min(words.len())]
        .iter()
        .map(|w| w.to_string())
        .collect();
    out.extend(d_words[..dist_take].iter().map(|w| w.to_string()));

    if severity == 1 {
        // Mild drift retains partial topical relevance: if the original
        // shared content tokens with the prompt, the blend must too.
        let prompt_content = content_tokens(prompt_text);
        let overlapping = |s: &str| {
            content_tokens(s)
                .iter()
                .any(|t| prompt_content.contains(t))
        };
        if overlapping(text) && !overlapping(&out.join(" ")) {
            if let Some(w) = words.iter().find(|w| overlapping(w)) {
                out.push(w.to_string());
            }
        }
    }
    out.join(" ")
}

/// Applies `spec` to a copy of `log`: each acknowledged record in the window
/// is rewritten with probability `modification_probability(severity)`; the
/// label set is exactly the set of records whose text changed.
pub fn inject<R: Rng + ?Sized>(
    log: &InteractionLog,
    spec: &AnomalySpec,
    rng: &mut R,
) -> Result<InteractionLog, AnomalyError> {
    spec.validate()?;
    if spec.end_day() > log.horizon_days {
        return Err(AnomalyError::WindowInfeasible {
            t_start: spec.t_start_day,
            duration: spec.duration_days,
            horizon: log.horizon_days,
        });
    }
    let overlapping_label = log.records.iter().any(|r| {
        r.anomaly_label
            .as_ref()
            .is_some_and(|l| l.anomaly_type == spec.anomaly_type)
            && r.event.day >= spec.t_start_day
            && r.event.day < spec.end_day()
    });
    if overlapping_label {
        return Err(AnomalyError::AlreadyLabeled(spec.anomaly_type));
    }

    let mut out = log.clone();
    out.anomaly_spec = Some(spec.clone());
    for record in &mut out.records {
        if !record.acknowledged {
            continue;
        }
        let severity = severity_at(record.event.day, spec);
        if severity == 0 {
            continue;
        }
        if rng.random::<f64>() >= modification_probability(severity) {
            continue;
        }
        let original = record
            .response_text
            .clone()
            .expect("acknowledged records carry text");
        let rewritten = match spec.anomaly_type {
            AnomalyKind::FlattenedSentiment => {
                apply_flattening(&original, severity, record.modality, rng)
            }
            AnomalyKind::OffTopic => {
                apply_offtopic(&original, severity, &record.event.prompt_text, rng)
            }
        };
        if rewritten != original {
            record.response_text = Some(rewritten);
            record.anomaly_label = Some(AnomalyLabel {
                anomaly_type: spec.anomaly_type,
                severity,
                spec_ref: spec.spec_id(),
            });
        }
    }
    Ok(out)
}
