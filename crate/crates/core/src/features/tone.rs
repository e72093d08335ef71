//! Lexicon-based tone features.
//!
//! Scores come from lexicons bundled as TSV data files (`token<TAB>score`),
//! so the pipeline has no external NLP dependency and is bit-reproducible.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::tokenize;

const SENTIMENT_TSV: &str = include_str!("../../data/sentiment_lexicon.tsv");
const SUBJECTIVITY_TSV: &str = include_str!("../../data/subjectivity_lexicon.tsv");

/// Tokens that flip the sign of a sentiment score within the next three
/// tokens.
const NEGATIONS: &[&str] = &[
    "not", "no", "never", "none", "cannot", "can't", "cant", "don't", "dont", "didn't", "didnt",
    "doesn't", "doesnt", "won't", "wont", "isn't", "isnt", "wasn't", "wasnt", "aren't", "arent",
    "couldn't", "couldnt", "wouldn't", "wouldnt", "shouldn't", "shouldnt", "hasn't", "hasnt",
    "haven't", "havent", "ain't", "aint", "neither", "nor", "hardly", "barely", "scarcely",
];

/// Token-count cap for the normalized-length feature.
const LENGTH_CAP: f64 = 30.0;

fn parse_lexicon(tsv: &'static str) -> HashMap<&'static str, f64> {
    let mut map = HashMap::new();
    for (lineno, line) in tsv.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (token, score) = line
            .split_once('\t')
            .unwrap_or_else(|| panic!("lexicon line {} missing tab: {line:?}", lineno + 1));
        let score: f64 = score
            .parse()
            .unwrap_or_else(|_| panic!("lexicon line {} bad score: {line:?}", lineno + 1));
        assert!(
            (-1.0..=1.0).contains(&score),
            "lexicon score out of [-1,1]: {line:?}"
        );
        map.insert(token, score);
    }
    map
}

pub(crate) fn sentiment_lexicon() -> &'static HashMap<&'static str, f64> {
    static LEX: OnceLock<HashMap<&'static str, f64>> = OnceLock::new();
    LEX.get_or_init(|| parse_lexicon(SENTIMENT_TSV))
}

fn subjectivity_lexicon() -> &'static HashMap<&'static str, f64> {
    static LEX: OnceLock<HashMap<&'static str, f64>> = OnceLock::new();
    LEX.get_or_init(|| parse_lexicon(SUBJECTIVITY_TSV))
}

/// True when the token carries a positive sentiment score.
pub fn is_positive_token(token: &str) -> bool {
    sentiment_lexicon().get(token).is_some_and(|&s| s > 0.0)
}

/// Surface-level affective tone of one response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneFeatures {
    /// Squashed signed lexicon sum, in [-1, 1].
    pub compound_sentiment: f64,
    /// Mean signed lexicon score of matched tokens, in [-1, 1].
    pub polarity: f64,
    /// Fraction of tokens found in the subjectivity lexicon, in [0, 1].
    pub subjectivity: f64,
    /// min(1, tokens / 30).
    pub norm_length: f64,
}

impl ToneFeatures {
    /// Fixed feature order: compound, polarity, subjectivity, norm_length.
    pub fn as_vec(&self) -> Vec<f64> {
        vec![
            self.compound_sentiment,
            self.polarity,
            self.subjectivity,
            self.norm_length,
        ]
    }

    pub const DIM: usize = 4;
}

/// Computes the four tone features. Empty text yields all zeros.
pub fn tone_features(text: &str) -> ToneFeatures {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return ToneFeatures {
            compound_sentiment: 0.0,
            polarity: 0.0,
            subjectivity: 0.0,
            norm_length: 0.0,
        };
    }

    let lexicon = sentiment_lexicon();
    let mut sum = 0.0;
    let mut matched = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        if let Some(&score) = lexicon.get(token.as_str()) {
            let window = tokens[i.saturating_sub(3)..i].iter();
            let negated = window.rev().any(|t| NEGATIONS.contains(&t.as_str()));
            let signed = if negated { -score } else { score };
            sum += signed;
            matched.push(signed);
        }
    }

    let exclamations = text.chars().filter(|&c| c == '!').count();
    let boost = (0.1 * exclamations as f64).min(0.3);
    if sum > 0.0 {
        sum += boost;
    } else if sum < 0.0 {
        sum -= boost;
    }
    let compound = sum / (sum * sum + 15.0).sqrt();

    let polarity = if matched.is_empty() {
        0.0
    } else {
        matched.iter().sum::<f64>() / matched.len() as f64
    };

    let subj = subjectivity_lexicon();
    let subjective = tokens.iter().filter(|t| subj.contains_key(t.as_str())).count();
    let subjectivity = subjective as f64 / tokens.len() as f64;

    ToneFeatures {
        compound_sentiment: compound,
        polarity,
        subjectivity,
        norm_length: (tokens.len() as f64 / LENGTH_CAP).min(1.0),
    }
}
