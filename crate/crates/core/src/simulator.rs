//! Longitudinal interaction-log simulation.
//!
//! A run expands a persona's weekly schedule over the horizon, layers in
//! randomly injected events, simulates acknowledgment via the persona's
//! delay model and location likelihoods, and generates response text for
//! every acknowledged reminder. The whole run is a pure function of
//! (persona, horizon, seed): per-persona streams are derived from the run
//! seed, so multi-persona runs are order-independent.

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use crate::anomaly::AnomalyLabel;
use crate::persona::{sample_delay, Modality, Persona, ReminderType, Weekday};
use crate::seeding::{self, salt};
use crate::textgen::{
    canonical_reminder_text, prompt_pool, BuiltinGenerator, PersonaDescriptor, TextGenRequest,
    TextGenerator,
};

/// Random events land between 08:00 and 20:00.
const RANDOM_EVENT_WINDOW: std::ops::Range<u32> = 480..1200;

/// Daily random-event counts are capped here to bound runtime and log size.
pub const MAX_RANDOM_EVENTS_PER_DAY: u64 = 3;

/// Prior responses passed to external generators as few-shot context.
const FEW_SHOT_EXAMPLES: usize = 5;

const MINUTES_PER_DAY: u64 = 24 * 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventSource {
    Routine,
    Random,
}

/// One reminder delivered to the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReminderEvent {
    pub event_id: u64,
    pub day: u32,
    /// Minutes since simulation start; always within `day`.
    pub t_reminder: u64,
    pub reminder_type: ReminderType,
    pub location: String,
    pub prompt_text: String,
    pub source: EventSource,
}

/// A reminder together with its acknowledgment outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub event: ReminderEvent,
    pub acknowledged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_text: Option<String>,
    pub modality: Modality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anomaly_label: Option<AnomalyLabel>,
}

/// A full simulated log: records ordered strictly by reminder time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionLog {
    pub persona_id: u32,
    pub seed: u64,
    pub horizon_days: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anomaly_spec: Option<crate::anomaly::AnomalySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub records: Vec<ResponseRecord>,
}

impl InteractionLog {
    /// Acknowledged records, in time order.
    pub fn acknowledged(&self) -> impl Iterator<Item = &ResponseRecord> {
        self.records.iter().filter(|r| r.acknowledged)
    }
}

/// Outcome of one acknowledgment trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AckOutcome {
    Ack { t_ack: f64 },
    Missed,
}

/// Expands the persona's weekly schedule over the horizon. Deterministic
/// given the persona; one event per matching (day, entry).
pub fn build_schedule(persona: &Persona, horizon_days: u32) -> Vec<ReminderEvent> {
    let mut events = Vec::new();
    for day in 0..horizon_days {
        let weekday = Weekday::of_day(day);
        for entry in &persona.schedule {
            if !entry.days_of_week.contains(&weekday) {
                continue;
            }
            events.push(ReminderEvent {
                event_id: events.len() as u64,
                day,
                t_reminder: day as u64 * MINUTES_PER_DAY + entry.time_of_day as u64,
                reminder_type: entry.reminder_type,
                location: entry.location.clone(),
                prompt_text: canonical_reminder_text(entry.reminder_type).to_string(),
                source: EventSource::Routine,
            });
        }
    }
    events
}

/// Samples unscheduled reminders: per day a Poisson count (capped at
/// [`MAX_RANDOM_EVENTS_PER_DAY`]), types by weighted multinomial, times
/// uniform over the daytime window.
pub fn inject_random_events<R: Rng + ?Sized>(
    persona: &Persona,
    horizon_days: u32,
    rng: &mut R,
) -> Vec<ReminderEvent> {
    if persona.event_rate_per_day <= 0.0 {
        return Vec::new();
    }
    let poisson = Poisson::new(persona.event_rate_per_day).expect("rate validated non-negative");
    let types: Vec<ReminderType> = persona.event_type_weights.keys().copied().collect();
    let weights: Vec<f64> = persona.event_type_weights.values().copied().collect();
    let type_dist = WeightedIndex::new(&weights).expect("positive weight sum validated");
    let locations: Vec<&String> = persona
        .response_likelihood
        .keys()
        .filter(|k| k.as_str() != crate::persona::DEFAULT_LIKELIHOOD_KEY)
        .collect();

    let mut events = Vec::new();
    for day in 0..horizon_days {
        let count = (poisson.sample(rng) as u64).min(MAX_RANDOM_EVENTS_PER_DAY);
        for _ in 0..count {
            let reminder_type = types[type_dist.sample(rng)];
            let minute = rng.random_range(RANDOM_EVENT_WINDOW);
            let location = if locations.is_empty() {
                "home".to_string()
            } else {
                locations[rng.random_range(0..locations.len())].clone()
            };
            let pool = prompt_pool(reminder_type);
            let prompt_text = pool[rng.random_range(0..pool.len())].to_string();
            events.push(ReminderEvent {
                event_id: events.len() as u64,
                day,
                t_reminder: day as u64 * MINUTES_PER_DAY + minute as u64,
                reminder_type,
                location,
                prompt_text,
                source: EventSource::Random,
            });
        }
    }
    events
}

/// Draws a delay and runs the location Bernoulli trial. A delay beyond the
/// acknowledgment window is a miss before the trial happens.
pub fn simulate_acknowledgment<R: Rng + ?Sized>(
    event: &ReminderEvent,
    persona: &Persona,
    rng: &mut R,
) -> AckOutcome {
    let delay = sample_delay(&persona.delay_model, rng);
    if delay > persona.ack_window_minutes as f64 {
        return AckOutcome::Missed;
    }
    let p = persona.ack_probability(&event.location);
    if rng.random_bool(p) {
        AckOutcome::Ack {
            t_ack: event.t_reminder as f64 + delay,
        }
    } else {
        AckOutcome::Missed
    }
}

/// Generates response text for an acknowledged event. External generator
/// failures fall back to the builtin pools; the warning is returned for the
/// run metadata.
pub fn generate_response<R: Rng>(
    persona: &Persona,
    event: &ReminderEvent,
    generator: &dyn TextGenerator,
    few_shot_examples: Vec<String>,
    rng: &mut R,
) -> (String, Option<String>) {
    let minute_of_day = (event.t_reminder % MINUTES_PER_DAY) as u32;
    let request = TextGenRequest {
        persona: PersonaDescriptor {
            id: persona.id,
            tone: persona.tone_at(minute_of_day).to_string(),
            style: persona.style.clone(),
            expressiveness: persona.expressiveness,
            modality: persona.modality,
        },
        prompt_text: event.prompt_text.clone(),
        reminder_type: event.reminder_type,
        time_of_day: minute_of_day,
        few_shot_examples,
    };
    match generator.generate(&request, rng as &mut dyn rand::RngCore) {
        Ok(text) => (text, None),
        Err(err) => {
            let warning = format!(
                "event {}: external generator failed ({err}); used builtin",
                event.event_id
            );
            let text = BuiltinGenerator
                .generate(&request, rng as &mut dyn rand::RngCore)
                .expect("builtin generator is total");
            (text, Some(warning))
        }
    }
}

/// Runs a full simulation with the builtin text generator.
pub fn run_simulation(persona: &Persona, horizon_days: u32, seed: u64) -> InteractionLog {
    run_simulation_with(persona, horizon_days, seed, &BuiltinGenerator)
}

/// Runs a full simulation with an explicit text generator.
pub fn run_simulation_with(
    persona: &Persona,
    horizon_days: u32,
    seed: u64,
    generator: &dyn TextGenerator,
) -> InteractionLog {
    let mut rng = seeding::stream(seed, &[salt::SIMULATION, persona.id as u64]);

    let mut events = build_schedule(persona, horizon_days);
    events.extend(inject_random_events(persona, horizon_days, &mut rng));
    // Routine events win timestamp ties; random colliders shift to the
    // nearest free minute within their day so ordering stays strict.
    events.sort_by_key(|e| (e.t_reminder, e.source == EventSource::Random, e.event_id));
    let mut taken: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for event in &mut events {
        let day_start = event.day as u64 * MINUTES_PER_DAY;
        let day_end = day_start + MINUTES_PER_DAY;
        let mut t = event.t_reminder;
        while taken.contains(&t) && t + 1 < day_end {
            t += 1;
        }
        while taken.contains(&t) && t > day_start {
            t -= 1;
        }
        taken.insert(t);
        event.t_reminder = t;
    }
    events.sort_by_key(|e| e.t_reminder);
    for (i, event) in events.iter_mut().enumerate() {
        event.event_id = i as u64;
    }

    let mut warnings = Vec::new();
    let mut recent_responses: Vec<String> = Vec::new();
    let mut records = Vec::with_capacity(events.len());
    for event in events {
        let outcome = simulate_acknowledgment(&event, persona, &mut rng);
        let record = match outcome {
            AckOutcome::Ack { t_ack } => {
                let few_shot = recent_responses
                    .iter()
                    .rev()
                    .take(FEW_SHOT_EXAMPLES)
                    .rev()
                    .cloned()
                    .collect();
                let (text, warning) =
                    generate_response(persona, &event, generator, few_shot, &mut rng);
                if let Some(w) = warning {
                    warnings.push(w);
                }
                recent_responses.push(text.clone());
                ResponseRecord {
                    event,
                    acknowledged: true,
                    t_ack: Some(t_ack),
                    response_text: Some(text),
                    modality: persona.modality,
                    anomaly_label: None,
                }
            }
            AckOutcome::Missed => ResponseRecord {
                event,
                acknowledged: false,
                t_ack: None,
                response_text: None,
                modality: persona.modality,
                anomaly_label: None,
            },
        };
        records.push(record);
    }

    InteractionLog {
        persona_id: persona.id,
        seed,
        horizon_days,
        anomaly_spec: None,
        warnings,
        records,
    }
}
