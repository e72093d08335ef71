//! Persona profiles: communication traits, delay models, weekly schedules,
//! and the eight built-in personas.
//!
//! A [`Persona`] is immutable after load and drives every stage of the
//! simulation: which reminders fire, how quickly the user acknowledges them,
//! and what the generated responses sound like.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Likelihood applied when a location has no entry and the map carries no
/// `"default"` key.
pub const FALLBACK_RESPONSE_LIKELIHOOD: f64 = 0.85;

/// Reserved key in `response_likelihood` naming the configured default.
pub const DEFAULT_LIKELIHOOD_KEY: &str = "default";

/// Attempts at redrawing a negative normal delay before clamping to zero.
const NORMAL_TRUNCATION_RESAMPLES: usize = 8;

#[derive(Debug, Error)]
pub enum PersonaError {
    #[error("persona config is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("persona {persona}: field `{field}`: {message}")]
    Validation {
        persona: String,
        field: &'static str,
        message: String,
    },
}

impl PersonaError {
    fn invalid(persona: impl ToString, field: &'static str, message: impl ToString) -> Self {
        PersonaError::Validation {
            persona: persona.to_string(),
            field,
            message: message.to_string(),
        }
    }
}

/// Categories of reminder prompts a persona can receive.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum ReminderType {
    Medication,
    Hygiene,
    CheckIn,
    Appointment,
    Household,
}

impl ReminderType {
    pub const ALL: [ReminderType; 5] = [
        ReminderType::Medication,
        ReminderType::Hygiene,
        ReminderType::CheckIn,
        ReminderType::Appointment,
        ReminderType::Household,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReminderType::Medication => "medication",
            ReminderType::Hygiene => "hygiene",
            ReminderType::CheckIn => "check_in",
            ReminderType::Appointment => "appointment",
            ReminderType::Household => "household",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expressiveness {
    Low,
    Moderate,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Typed,
    Voice,
}

/// Days of the week; day 0 of a simulation is a Monday.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
        Weekday::Sun,
    ];

    /// Weekday of a simulation day (day 0 = Monday).
    pub fn of_day(day: u32) -> Weekday {
        Weekday::ALL[(day % 7) as usize]
    }
}

/// Response-delay distribution, in minutes past the reminder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayModel {
    Normal {
        mu_minutes: f64,
        sigma_minutes: f64,
    },
    /// `a` = lower bound, `b` = upper bound, `c` = mode; requires a <= c <= b.
    Triangular {
        a_minutes: f64,
        b_minutes: f64,
        c_minutes: f64,
    },
}

impl DelayModel {
    fn validate(&self, persona: &str) -> Result<(), PersonaError> {
        match *self {
            DelayModel::Normal { sigma_minutes, .. } => {
                if !(sigma_minutes > 0.0) {
                    return Err(PersonaError::invalid(
                        persona,
                        "delay_model.sigma_minutes",
                        format!("must be > 0, got {sigma_minutes}"),
                    ));
                }
            }
            DelayModel::Triangular {
                a_minutes,
                b_minutes,
                c_minutes,
            } => {
                if !(a_minutes <= c_minutes && c_minutes <= b_minutes) {
                    return Err(PersonaError::invalid(
                        persona,
                        "delay_model",
                        format!("requires a <= c <= b, got a={a_minutes} c={c_minutes} b={b_minutes}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Draws one acknowledgment delay in minutes.
///
/// Normal draws are truncated at zero: up to eight resamples, then a clamp,
/// so the rejection loop is bounded.
pub fn sample_delay<R: Rng + ?Sized>(model: &DelayModel, rng: &mut R) -> f64 {
    match *model {
        DelayModel::Normal {
            mu_minutes,
            sigma_minutes,
        } => {
            let dist = Normal::new(mu_minutes, sigma_minutes)
                .expect("sigma validated positive at load");
            let mut draw = dist.sample(rng);
            for _ in 0..NORMAL_TRUNCATION_RESAMPLES {
                if draw >= 0.0 {
                    break;
                }
                draw = dist.sample(rng);
            }
            draw.max(0.0)
        }
        DelayModel::Triangular {
            a_minutes: a,
            b_minutes: b,
            c_minutes: c,
        } => {
            // Inverse-CDF sampling; degenerate spans collapse to the mode.
            let span = b - a;
            if span <= f64::EPSILON {
                return c;
            }
            let u: f64 = rng.random();
            let fc = (c - a) / span;
            if u < fc {
                a + (u * span * (c - a)).sqrt()
            } else {
                b - ((1.0 - u) * span * (b - c)).sqrt()
            }
        }
    }
}

/// One recurring reminder in a persona's weekly routine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub reminder_type: ReminderType,
    /// Minutes into the day, in [0, 1440).
    pub time_of_day: u32,
    pub days_of_week: Vec<Weekday>,
    pub location: String,
}

impl ScheduleEntry {
    pub fn daily(reminder_type: ReminderType, time_of_day: u32, location: &str) -> Self {
        ScheduleEntry {
            reminder_type,
            time_of_day,
            days_of_week: Weekday::ALL.to_vec(),
            location: location.to_string(),
        }
    }

    pub fn on_days(
        reminder_type: ReminderType,
        time_of_day: u32,
        days: &[Weekday],
        location: &str,
    ) -> Self {
        ScheduleEntry {
            reminder_type,
            time_of_day,
            days_of_week: days.to_vec(),
            location: location.to_string(),
        }
    }
}

/// A synthetic user profile. Immutable after load; safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Persona {
    pub id: u32,
    pub tone_am: String,
    /// Equals `tone_am` when the persona has no time-of-day variability.
    pub tone_pm: String,
    pub style: String,
    pub expressiveness: Expressiveness,
    pub modality: Modality,
    pub schedule: Vec<ScheduleEntry>,
    pub delay_model: DelayModel,
    pub ack_window_minutes: u32,
    /// Location label -> probability of responding when acknowledged there.
    /// The reserved key `"default"` covers unmapped locations.
    pub response_likelihood: BTreeMap<String, f64>,
    pub event_rate_per_day: f64,
    pub event_type_weights: BTreeMap<ReminderType, f64>,
}

impl Persona {
    /// Probability that the persona responds to a reminder at `location`.
    pub fn ack_probability(&self, location: &str) -> f64 {
        self.response_likelihood
            .get(location)
            .or_else(|| self.response_likelihood.get(DEFAULT_LIKELIHOOD_KEY))
            .copied()
            .unwrap_or(FALLBACK_RESPONSE_LIKELIHOOD)
    }

    /// Tone label in effect at `minute_of_day` (AM/PM boundary at 12:00).
    pub fn tone_at(&self, minute_of_day: u32) -> &str {
        if minute_of_day < 12 * 60 {
            &self.tone_am
        } else {
            &self.tone_pm
        }
    }

    pub fn validate(&self) -> Result<(), PersonaError> {
        let id = self.id;
        self.delay_model.validate(&id.to_string())?;
        if self.ack_window_minutes == 0 {
            return Err(PersonaError::invalid(id, "ack_window_minutes", "must be positive"));
        }
        for (i, entry) in self.schedule.iter().enumerate() {
            if entry.time_of_day >= 24 * 60 {
                return Err(PersonaError::invalid(
                    id,
                    "schedule.time_of_day",
                    format!("entry {i}: must be in [0, 1440), got {}", entry.time_of_day),
                ));
            }
            if entry.days_of_week.is_empty() {
                return Err(PersonaError::invalid(
                    id,
                    "schedule.days_of_week",
                    format!("entry {i}: must be non-empty"),
                ));
            }
        }
        for (loc, p) in &self.response_likelihood {
            if !(0.0..=1.0).contains(p) {
                return Err(PersonaError::invalid(
                    id,
                    "response_likelihood",
                    format!("`{loc}` must be in [0,1], got {p}"),
                ));
            }
        }
        if !(self.event_rate_per_day >= 0.0) {
            return Err(PersonaError::invalid(
                id,
                "event_rate_per_day",
                format!("must be >= 0, got {}", self.event_rate_per_day),
            ));
        }
        let mut weight_sum = 0.0;
        for (ty, w) in &self.event_type_weights {
            if !(*w >= 0.0) {
                return Err(PersonaError::invalid(
                    id,
                    "event_type_weights",
                    format!("`{}` must be >= 0, got {w}", ty.as_str()),
                ));
            }
            weight_sum += w;
        }
        if self.event_type_weights.is_empty() || weight_sum <= 0.0 {
            return Err(PersonaError::invalid(
                id,
                "event_type_weights",
                "at least one weight must be positive",
            ));
        }
        Ok(())
    }
}

/// Loads personas from a JSON document (top-level array of persona objects).
/// With no document, returns the eight built-ins.
pub fn load_personas(config_document: Option<&str>) -> Result<Vec<Persona>, PersonaError> {
    let personas = match config_document {
        None => builtin_personas(),
        Some(doc) => serde_json::from_str::<Vec<Persona>>(doc)?,
    };
    for persona in &personas {
        persona.validate()?;
    }
    Ok(personas)
}

fn uniform_weights() -> BTreeMap<ReminderType, f64> {
    ReminderType::ALL.iter().map(|&t| (t, 1.0)).collect()
}

fn default_likelihoods() -> BTreeMap<String, f64> {
    let mut map = BTreeMap::new();
    map.insert("home".to_string(), 0.85);
    map.insert("away".to_string(), 0.6);
    map.insert(DEFAULT_LIKELIHOOD_KEY.to_string(), 0.85);
    map
}

/// The shared weekly routine, nudged by a few minutes per persona so logs
/// do not align across users.
fn builtin_schedule(id: u32) -> Vec<ScheduleEntry> {
    let nudge = (id - 1) * 5;
    vec![
        ScheduleEntry::daily(ReminderType::Hygiene, 8 * 60 + nudge, "home"),
        ScheduleEntry::daily(ReminderType::Medication, 9 * 60 + nudge, "home"),
        ScheduleEntry::daily(ReminderType::CheckIn, 18 * 60 + nudge, "home"),
        ScheduleEntry::on_days(
            ReminderType::Household,
            16 * 60 + nudge,
            &[Weekday::Tue, Weekday::Fri],
            "home",
        ),
        ScheduleEntry::on_days(
            ReminderType::Appointment,
            10 * 60 + 30 + nudge,
            &[Weekday::Wed],
            "away",
        ),
    ]
}

fn typed_delay() -> DelayModel {
    DelayModel::Normal {
        mu_minutes: 8.0,
        sigma_minutes: 3.0,
    }
}

fn voice_delay() -> DelayModel {
    DelayModel::Triangular {
        a_minutes: 1.0,
        b_minutes: 20.0,
        c_minutes: 5.0,
    }
}

fn builtin(
    id: u32,
    tone_am: &str,
    tone_pm: &str,
    style: &str,
    expressiveness: Expressiveness,
    modality: Modality,
) -> Persona {
    Persona {
        id,
        tone_am: tone_am.to_string(),
        tone_pm: tone_pm.to_string(),
        style: style.to_string(),
        expressiveness,
        modality,
        schedule: builtin_schedule(id),
        delay_model: match modality {
            Modality::Typed => typed_delay(),
            Modality::Voice => voice_delay(),
        },
        ack_window_minutes: 120,
        response_likelihood: default_likelihoods(),
        event_rate_per_day: 0.5,
        event_type_weights: uniform_weights(),
    }
}

/// The eight built-in personas. Tone, style, expressiveness, and modality
/// are the roster values; delay models, likelihoods, rates, and schedules
/// are documented defaults, overridable via config.
pub fn builtin_personas() -> Vec<Persona> {
    use Expressiveness::*;
    use Modality::*;
    vec![
        builtin(1, "Brief, polite", "Brief, polite", "Short, neutral", Low, Typed),
        builtin(
            2,
            "Concise, respectful",
            "Concise, respectful",
            "Short, routine-compliant",
            Low,
            Typed,
        ),
        builtin(
            3,
            "Kind, concise",
            "Hesitant, nervous",
            "AM: Short PM: Wordier responses",
            Moderate,
            Voice,
        ),
        builtin(4, "Warm, responsive", "Warm, responsive", "Short, affirmative", Moderate, Typed),
        builtin(5, "Calm, responsive", "Calm, responsive", "Short, friendly", Moderate, Voice),
        builtin(6, "Friendly, positive", "Friendly, positive", "Casual", High, Typed),
        builtin(7, "Indifferent, cold", "Indifferent, cold", "Short", Low, Voice),
        builtin(8, "Warm, polite", "Irritable, flat", "Short and simple", Moderate, Voice),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_roster_matches_table() {
        let personas = load_personas(None).unwrap();
        assert_eq!(personas.len(), 8);
        // (id, tone_am, tone_pm, style, expressiveness, modality)
        let expected = [
            (1, "Brief, polite", "Brief, polite", "Short, neutral", Expressiveness::Low, Modality::Typed),
            (2, "Concise, respectful", "Concise, respectful", "Short, routine-compliant", Expressiveness::Low, Modality::Typed),
            (3, "Kind, concise", "Hesitant, nervous", "AM: Short PM: Wordier responses", Expressiveness::Moderate, Modality::Voice),
            (4, "Warm, responsive", "Warm, responsive", "Short, affirmative", Expressiveness::Moderate, Modality::Typed),
            (5, "Calm, responsive", "Calm, responsive", "Short, friendly", Expressiveness::Moderate, Modality::Voice),
            (6, "Friendly, positive", "Friendly, positive", "Casual", Expressiveness::High, Modality::Typed),
            (7, "Indifferent, cold", "Indifferent, cold", "Short", Expressiveness::Low, Modality::Voice),
            (8, "Warm, polite", "Irritable, flat", "Short and simple", Expressiveness::Moderate, Modality::Voice),
        ];
        for (p, e) in personas.iter().zip(expected.iter()) {
            assert_eq!(p.id, e.0);
            assert_eq!(p.tone_am, e.1);
            assert_eq!(p.tone_pm, e.2);
            assert_eq!(p.style, e.3);
            assert_eq!(p.expressiveness, e.4);
            assert_eq!(p.modality, e.5);
        }
    }

    #[test]
    fn load_serialize_load_is_fixed_point() {
        let personas = builtin_personas();
        let doc = serde_json::to_string(&personas).unwrap();
        let reloaded = load_personas(Some(&doc)).unwrap();
        assert_eq!(personas, reloaded);
    }

    #[test]
    fn out_of_range_likelihood_is_rejected() {
        let mut personas = builtin_personas();
        personas[0]
            .response_likelihood
            .insert("home".to_string(), 1.2);
        let doc = serde_json::to_string(&personas).unwrap();
        let err = load_personas(Some(&doc)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("response_likelihood"), "{msg}");
        assert!(msg.contains("persona 1"), "{msg}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = r#"[{"id": 1, "nickname": "x"}]"#;
        assert!(load_personas(Some(doc)).is_err());
    }

    #[test]
    fn degenerate_triangular_returns_mode() {
        let model = DelayModel::Triangular {
            a_minutes: 5.0,
            b_minutes: 5.0,
            c_minutes: 5.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(sample_delay(&model, &mut rng), 5.0);
        }
    }

    #[test]
    fn triangular_mean_matches_closed_form() {
        // Closed-form mean (a+b+c)/3 = 5.0; variance (a²+b²+c²−ab−ac−bc)/18.
        let model = DelayModel::Triangular {
            a_minutes: 0.0,
            b_minutes: 10.0,
            c_minutes: 5.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let d = sample_delay(&model, &mut rng);
            assert!((0.0..=10.0).contains(&d));
            sum += d;
        }
        let mean = sum / n as f64;
        let variance = (0.0f64 + 100.0 + 25.0 - 0.0 - 0.0 - 50.0) / 18.0;
        let se = (variance / n as f64).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn normal_mean_matches_and_never_negative() {
        let model = DelayModel::Normal {
            mu_minutes: 10.0,
            sigma_minutes: 2.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let d = sample_delay(&model, &mut rng);
            assert!(d >= 0.0);
            sum += d;
        }
        let mean = sum / n as f64;
        let se = 2.0 / (n as f64).sqrt();
        // Truncation at 0 is negligible at mu = 5 sigma.
        assert!((mean - 10.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn ack_probability_lookup() {
        let mut p = builtin_personas().remove(0);
        p.response_likelihood.insert("garden".into(), 1.0);
        p.response_likelihood.insert("garage".into(), 0.0);
        assert_eq!(p.ack_probability("garden"), 1.0);
        assert_eq!(p.ack_probability("garage"), 0.0);
        // Unmapped location falls back to the configured default.
        p.response_likelihood
            .insert(DEFAULT_LIKELIHOOD_KEY.into(), 0.8);
        assert_eq!(p.ack_probability("nowhere"), 0.8);
        // Without a configured default, the fallback constant applies.
        p.response_likelihood.remove(DEFAULT_LIKELIHOOD_KEY);
        assert_eq!(p.ack_probability("nowhere"), FALLBACK_RESPONSE_LIKELIHOOD);
    }

    #[test]
    fn weekday_of_day_starts_monday() {
        assert_eq!(Weekday::of_day(0), Weekday::Mon);
        assert_eq!(Weekday::of_day(6), Weekday::Sun);
        assert_eq!(Weekday::of_day(7), Weekday::Mon);
    }
}
