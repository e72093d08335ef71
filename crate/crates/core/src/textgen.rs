//! Response text generation.
//!
//! The builtin generator composes responses from fixed template pools keyed
//! by (reminder type, expressiveness, modality, tone class), with seeded
//! choice, so simulated logs are deterministic and offline. An HTTP-backed
//! generator can replace it for fidelity studies; any failure there falls
//! back to the builtin and surfaces as a run warning.

use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::persona::{Expressiveness, Modality, Persona, ReminderType};

#[derive(Debug, Error)]
pub enum TextGenError {
    #[error("text generator request failed: {0}")]
    Provider(String),
    #[error("text generator returned empty text")]
    Empty,
}

/// Persona summary sent to external generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersonaDescriptor {
    pub id: u32,
    /// Tone label in effect at the event's time of day.
    pub tone: String,
    pub style: String,
    pub expressiveness: Expressiveness,
    pub modality: Modality,
}

/// One generation request. This is also the exact JSON body of the external
/// wire protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TextGenRequest {
    pub persona: PersonaDescriptor,
    pub prompt_text: String,
    pub reminder_type: ReminderType,
    /// Minutes into the day.
    pub time_of_day: u32,
    pub few_shot_examples: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
struct TextGenResponse {
    text: String,
}

pub trait TextGenerator: Send + Sync {
    fn generate(
        &self,
        request: &TextGenRequest,
        rng: &mut dyn rand::RngCore,
    ) -> Result<String, TextGenError>;
}

/// Tone classes the builtin pools are authored for. Free-text tone labels
/// map onto a class by keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToneClass {
    Warm,
    Neutral,
    Hesitant,
    Flat,
}

impl ToneClass {
    pub fn from_label(label: &str) -> ToneClass {
        let lower = label.to_ascii_lowercase();
        let has = |needle: &str| lower.contains(needle);
        if has("irritable") || has("flat") || has("indifferent") || has("cold") {
            ToneClass::Flat
        } else if has("hesitant") || has("nervous") || has("anxious") {
            ToneClass::Hesitant
        } else if has("warm")
            || has("friendly")
            || has("positive")
            || has("kind")
            || has("calm")
            || has("cheerful")
        {
            ToneClass::Warm
        } else {
            ToneClass::Neutral
        }
    }
}

/// Canonical reminder text per reminder type. Routine events use these
/// verbatim; they also serve as the reference text for prompt-similarity
/// features.
pub fn canonical_reminder_text(reminder_type: ReminderType) -> &'static str {
    PROMPT_POOLS[pool_index(reminder_type)][0]
}

/// Prompt variants per reminder type; randomly injected events draw from
/// these.
pub fn prompt_pool(reminder_type: ReminderType) -> &'static [&'static str] {
    PROMPT_POOLS[pool_index(reminder_type)]
}

fn pool_index(reminder_type: ReminderType) -> usize {
    match reminder_type {
        ReminderType::Medication => 0,
        ReminderType::Hygiene => 1,
        ReminderType::CheckIn => 2,
        ReminderType::Appointment => 3,
        ReminderType::Household => 4,
    }
}

const PROMPT_POOLS: [&[&str]; 5] = [
    &[
        "Time to take your medication.",
        "Please take your medication now.",
        "Reminder to take your medication.",
        "Your medication is due.",
    ],
    &[
        "Time to wash up and brush your teeth.",
        "Please wash up and brush your teeth.",
        "Reminder to wash up this morning.",
        "Time for your wash and brush.",
    ],
    &[
        "Just checking in, how are you feeling?",
        "How are you feeling right now?",
        "Checking in, how are you doing today?",
        "A quick check in, how are you?",
    ],
    &[
        "You have an appointment coming up.",
        "Reminder about your appointment today.",
        "Your appointment is scheduled soon.",
        "Don't forget your appointment.",
    ],
    &[
        "Time to do the dishes.",
        "Please tidy up the dishes.",
        "Reminder to do the laundry.",
        "Time for some tidying around the house.",
    ],
];

/// Task nouns substituted into the `{task}` slot, per reminder type.
fn task_nouns(reminder_type: ReminderType) -> &'static [&'static str] {
    match reminder_type {
        ReminderType::Medication => &["meds", "medication", "pills"],
        ReminderType::Hygiene => &["wash", "shower"],
        ReminderType::CheckIn => &["check in", "check"],
        ReminderType::Appointment => &["appointment"],
        ReminderType::Household => &["dishes", "chores", "laundry"],
    }
}

// Template patterns per (tone class, expressiveness, modality). Token-count
// bands are part of the benchmark contract: low <= 4 tokens, moderate 5-12,
// high 12-20, monotone in the mean within each (tone, modality) pair.
fn patterns(
    tone: ToneClass,
    expressiveness: Expressiveness,
    modality: Modality,
) -> &'static [&'static str] {
    use Expressiveness::*;
    use Modality::*;
    use ToneClass::*;
    match (tone, expressiveness, modality) {
        (Neutral, Low, Typed) => &[
            "Done, thanks.",
            "Ok, thank you.",
            "Yes, thanks.",
            "All set, thanks.",
            "Done, thank you.",
            "Will do, thanks.",
            "Ok, thanks.",
            "Yes, thank you.",
        ],
        (Neutral, Low, Voice) => &[
            "yes thanks",
            "done thanks",
            "ok thank you",
            "all set thanks",
            "yes thank you",
            "did it thanks",
            "ok thanks",
            "that's done thanks",
        ],
        (Neutral, Moderate, Typed) => &[
            "I took my {task}, thanks.",
            "Just finished the {task}, thank you.",
            "All done with the {task}, thanks.",
            "The {task} is done, thank you.",
            "Finished the {task} just now, thanks.",
            "I did the {task} already, thank you.",
            "That's the {task} done, thanks.",
            "Took care of the {task}, thanks.",
        ],
        (Neutral, Moderate, Voice) => &[
            "i took my {task} thanks",
            "just finished the {task} thank you",
            "all done with the {task} thanks",
            "the {task} is done thank you",
            "finished the {task} just now thanks",
            "i did the {task} already thank you",
            "that's the {task} done thanks",
            "took care of the {task} thanks",
        ],
        (Neutral, High, Typed) => &[
            "I have taken care of my {task} and everything is in order today, thank you for the reminder.",
            "The {task} is all done now and I appreciate you keeping me on schedule, thank you.",
            "Thank you for the note, I finished the {task} a moment ago and all is in order.",
            "I completed the {task} just as planned and I appreciate the reminder, thank you kindly.",
            "All done with the {task} now, and thank you again for keeping track of these things.",
            "The {task} is finished and noted, thank you for reminding me about it today.",
            "I went ahead and did the {task} right away, thank you for the helpful reminder.",
            "Everything is done with the {task} and I appreciate you checking on me, thank you.",
        ],
        (Neutral, High, Voice) => &[
            "i have taken care of my {task} and everything is in order today thank you",
            "the {task} is all done now and i appreciate you keeping me on schedule",
            "thank you for the note i finished the {task} a moment ago and all is in order",
            "i completed the {task} just as planned and i appreciate the reminder thank you",
            "all done with the {task} now and thank you again for keeping track of these things",
            "the {task} is finished and noted thank you for reminding me about it today",
            "i went ahead and did the {task} right away thank you for the helpful reminder",
            "everything is done with the {task} and i appreciate you checking on me thank you",
        ],
        (Warm, Low, Typed) => &[
            "Done, thanks so much!",
            "Yes, all good!",
            "Done, lovely!",
            "Great, all done!",
            "Thanks, done!",
            "Good, all set!",
            "Done, wonderful!",
            "Yes, thanks!",
        ],
        (Warm, Low, Voice) => &[
            "yeah all good",
            "done thanks dear",
            "good yes done",
            "yeah done thanks",
            "lovely all done",
            "all good thanks",
            "done feeling good",
            "great all done",
        ],
        (Warm, Moderate, Typed) => &[
            "Took my {task}, thanks so much!",
            "All done with the {task}, feeling good!",
            "Finished my {task}, thank you kindly!",
            "The {task} is done, have a lovely day!",
            "Done with the {task}, thanks a lot!",
            "Just did the {task}, all good here!",
            "That's the {task} sorted, thank you!",
            "Happy to say the {task} is done!",
        ],
        (Warm, Moderate, Voice) => &[
            "yeah i took my {task} thanks a lot",
            "all done with the {task} feeling good",
            "just finished the {task} thanks so much",
            "that's the {task} done all good",
            "did my {task} already thank you dear",
            "yeah the {task} is done lovely",
            "i did the {task} all good here",
            "done with the {task} thanks my dear",
        ],
        (Warm, High, Typed) => &[
            "Just finished my {task} and I feel absolutely great about it, thanks so much for checking in!",
            "The {task} is all done and it has been such a lovely day here, thank you kindly!",
            "Happy to report the {task} is done, I am feeling wonderful today, thanks a lot!",
            "All done with the {task} and everything is going so nicely today, thank you so much!",
            "I did the {task} right away and I am so glad you reminded me, you are wonderful!",
            "That's the {task} finished, what a good day it has been, thanks so much for the note!",
            "The {task} went perfectly and I am very happy with how today is going, thank you!",
            "Done with my {task} and smiling about it, such a nice reminder to get, thanks so much!",
        ],
        (Warm, High, Voice) => &[
            "just finished my {task} and i feel absolutely great about it thanks so much",
            "the {task} is all done and it has been such a lovely day here thank you",
            "happy to report the {task} is done i am feeling wonderful today thanks a lot",
            "all done with the {task} and everything is going so nicely today thank you",
            "i did the {task} right away and i am so glad you reminded me you are wonderful",
            "that's the {task} finished what a good day it has been thanks so much",
            "the {task} went perfectly and i am very happy with how today is going thank you",
            "done with my {task} and smiling about it such a nice reminder to get thanks",
        ],
        (Hesitant, Low, Typed) => &[
            "Um, done I think.",
            "Yes... I think so.",
            "Maybe, yes.",
            "I think it's done.",
            "Um, yes done.",
            "Done, I believe.",
            "I suppose so.",
            "Yes, probably done.",
        ],
        (Hesitant, Low, Voice) => &[
            "um done i think",
            "yes i think so",
            "maybe yes",
            "i think it's done",
            "um yes done",
            "done i believe",
            "i suppose so",
            "yes probably done",
        ],
        (Hesitant, Moderate, Typed) => &[
            "Um, I think I did the {task}, yes I think so.",
            "Well, I believe the {task} is done now, maybe.",
            "I suppose I took care of the {task}, yes I did.",
            "Um, the {task} should be done, I think it is.",
            "I did the {task}, I believe, um, yes I did.",
            "Maybe I finished the {task} already, I think so anyway.",
            "Um, yes, I think the {task} is all done now.",
            "Well, I did my {task}, at least I think I did.",
        ],
        (Hesitant, Moderate, Voice) => &[
            "um i think i did the {task} yes i think so",
            "well i believe the {task} is done now maybe",
            "i suppose i took care of the {task} yes i did",
            "um the {task} should be done i think it is",
            "i did the {task} i believe um yes i did",
            "maybe i finished the {task} already i think so anyway",
            "um yes i think the {task} is all done now",
            "well i did my {task} at least i think i did",
        ],
        (Hesitant, High, Typed) => &[
            "Um, I think I did the {task} earlier, or maybe it was just before, I believe it is done now.",
            "Well, I suppose the {task} is taken care of, I did it I think, yes I am fairly certain now.",
            "I believe I finished the {task}, um, it was sometime earlier I think, yes it should be done.",
            "Maybe I already did the {task}, I think I did, um, yes I believe everything is done now.",
            "Um, the {task}, yes, I think that is done, I did it earlier I believe, probably before lunch.",
            "Well, I think the {task} is done, I remember doing it, um, at least I believe I remember.",
            "I suppose I took care of the {task} already, um, I think so, yes I am mostly certain of it.",
            "Um, yes, I did the {task} I think, it seemed done when I looked, I believe it is fine now.",
        ],
        (Hesitant, High, Voice) => &[
            "um i think i did the {task} earlier or maybe it was just before i believe it is done now",
            "well i suppose the {task} is taken care of i did it i think yes i am fairly certain now",
            "i believe i finished the {task} um it was sometime earlier i think yes it should be done",
            "maybe i already did the {task} i think i did um yes i believe everything is done now",
            "um the {task} yes i think that is done i did it earlier i believe probably before lunch",
            "well i think the {task} is done i remember doing it um at least i believe i remember",
            "i suppose i took care of the {task} already um i think so yes i am mostly certain of it",
            "um yes i did the {task} i think it seemed done when i looked i believe it is fine now",
        ],
        (Flat, Low, Typed) => &[
            "Done.",
            "Ok.",
            "Yes.",
            "Did it.",
            "Fine.",
            "Yeah.",
            "Done already.",
            "Ok done.",
        ],
        (Flat, Low, Voice) => &[
            "yeah",
            "did it",
            "done",
            "yeah done",
            "ok",
            "fine",
            "yes",
            "mm done",
        ],
        (Flat, Moderate, Typed) => &[
            "Yeah, I did it already.",
            "The {task} is done, ok.",
            "Did the {task} like I said.",
            "It's done, I already told you.",
            "Yeah, the {task} again, it is done.",
            "I know, I did it already.",
            "The {task}, yes, done.",
            "Already did the {task} today.",
        ],
        (Flat, Moderate, Voice) => &[
            "yeah i did it already",
            "the {task} is done ok",
            "did the {task} like i said",
            "it's done i already told you",
            "yeah the {task} again it is done",
            "i know i did it already",
            "the {task} yes done",
            "already did the {task} today",
        ],
        (Flat, High, Typed) => &[
            "Yes, I did the {task} already, the same as I do it every single day, you can stop asking.",
            "The {task} is done, it was done earlier, and it will be done again tomorrow, same as always.",
            "I already told you the {task} is handled, it is the same routine every day, nothing has changed.",
            "Yeah, the {task}, it is done, same as yesterday and the day before that, you do not need to ask.",
            "It is done, I did the {task} when I always do it, there is nothing more to say about it.",
            "The {task} is finished, like it always is, and I do not see why it needs repeating every day.",
            "I did it, the {task} is done, same answer as every other day, you can note it down.",
            "Yes, done, the {task} is handled the way it is handled every day, nothing new to report here.",
        ],
        (Flat, High, Voice) => &[
            "yes i did the {task} already the same as i do it every single day you can stop asking",
            "the {task} is done it was done earlier and it will be done again tomorrow same as always",
            "i already told you the {task} is handled it is the same routine every day nothing has changed",
            "yeah the {task} it is done same as yesterday and the day before that you do not need to ask",
            "it is done i did the {task} when i always do it there is nothing more to say about it",
            "the {task} is finished like it always is and i do not see why it needs repeating every day",
            "i did it the {task} is done same answer as every other day you can note it down",
            "yes done the {task} is handled the way it is handled every day nothing new to report here",
        ],
    }
}

/// Materialized template pool for one cell. Pools always hold at least
/// eight entries.
pub fn template_pool(
    reminder_type: ReminderType,
    expressiveness: Expressiveness,
    modality: Modality,
    tone: ToneClass,
) -> Vec<String> {
    let nouns = task_nouns(reminder_type);
    patterns(tone, expressiveness, modality)
        .iter()
        .enumerate()
        .map(|(i, pattern)| pattern.replace("{task}", nouns[i % nouns.len()]))
        .collect()
}

/// Deterministic builtin generator over the template pools.
#[derive(Debug, Default, Clone)]
pub struct BuiltinGenerator;

impl TextGenerator for BuiltinGenerator {
    fn generate(
        &self,
        request: &TextGenRequest,
        rng: &mut dyn rand::RngCore,
    ) -> Result<String, TextGenError> {
        let tone = ToneClass::from_label(&request.persona.tone);
        let pool = template_pool(
            request.reminder_type,
            request.persona.expressiveness,
            request.persona.modality,
            tone,
        );
        let index = rng.random_range(0..pool.len());
        Ok(pool[index].clone())
    }
}

/// External generator speaking the HTTP wire protocol: a POST of the
/// [`TextGenRequest`] JSON returning `{"text": string}`. Non-success
/// responses and transport errors are reported as [`TextGenError`]; the
/// simulator falls back to the builtin.
pub struct HttpTextGenerator {
    agent: ureq::Agent,
    url: String,
}

impl HttpTextGenerator {
    pub fn new(url: &str, timeout: Duration) -> HttpTextGenerator {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTextGenerator {
            agent,
            url: url.to_string(),
        }
    }
}

impl TextGenerator for HttpTextGenerator {
    fn generate(
        &self,
        request: &TextGenRequest,
        _rng: &mut dyn rand::RngCore,
    ) -> Result<String, TextGenError> {
        let payload = serde_json::to_string(request)
            .map_err(|e| TextGenError::Provider(e.to_string()))?;
        let mut http_response = self
            .agent
            .post(&self.url)
            .header("content-type", "application/json")
            .send(&payload)
            .map_err(|e| TextGenError::Provider(e.to_string()))?;
        let body = http_response
            .body_mut()
            .read_to_string()
            .map_err(|e| TextGenError::Provider(e.to_string()))?;
        let response: TextGenResponse =
            serde_json::from_str(&body).map_err(|e| TextGenError::Provider(e.to_string()))?;
        if response.text.trim().is_empty() {
            return Err(TextGenError::Empty);
        }
        Ok(response.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::tokenize;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_cells() -> Vec<(ReminderType, Expressiveness, Modality, ToneClass)> {
        let mut cells = Vec::new();
        for &ty in &ReminderType::ALL {
            for &ex in &[
                Expressiveness::Low,
                Expressiveness::Moderate,
                Expressiveness::High,
            ] {
                for &m in &[Modality::Typed, Modality::Voice] {
                    for &t in &[
                        ToneClass::Warm,
                        ToneClass::Neutral,
                        ToneClass::Hesitant,
                        ToneClass::Flat,
                    ] {
                        cells.push((ty, ex, m, t));
                    }
                }
            }
        }
        cells
    }

    #[test]
    fn every_pool_has_at_least_eight_templates() {
        for (ty, ex, m, t) in all_cells() {
            let pool = template_pool(ty, ex, m, t);
            assert!(pool.len() >= 8, "{ty:?} {ex:?} {m:?} {t:?}");
            assert!(pool.iter().all(|s| !tokenize(s).is_empty()));
        }
    }

    #[test]
    fn low_expressiveness_templates_stay_short() {
        for &ty in &ReminderType::ALL {
            for &m in &[Modality::Typed, Modality::Voice] {
                for &t in &[
                    ToneClass::Warm,
                    ToneClass::Neutral,
                    ToneClass::Hesitant,
                    ToneClass::Flat,
                ] {
                    for s in template_pool(ty, Expressiveness::Low, m, t) {
                        assert!(
                            tokenize(&s).len() <= 4,
                            "low template too long: {s:?} ({ty:?} {m:?} {t:?})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn mean_length_is_monotone_in_expressiveness() {
        let mean_tokens = |ex| {
            let mut total = 0usize;
            let mut count = 0usize;
            for &ty in &ReminderType::ALL {
                for &m in &[Modality::Typed, Modality::Voice] {
                    for &t in &[
                        ToneClass::Warm,
                        ToneClass::Neutral,
                        ToneClass::Hesitant,
                        ToneClass::Flat,
                    ] {
                        for s in template_pool(ty, ex, m, t) {
                            total += tokenize(&s).len();
                            count += 1;
                        }
                    }
                }
            }
            total as f64 / count as f64
        };
        let low = mean_tokens(Expressiveness::Low);
        let moderate = mean_tokens(Expressiveness::Moderate);
        let high = mean_tokens(Expressiveness::High);
        assert!(low < moderate && moderate < high, "{low} {moderate} {high}");
        // Holds within every (tone, modality) pair too.
        for &m in &[Modality::Typed, Modality::Voice] {
            for &t in &[
                ToneClass::Warm,
                ToneClass::Neutral,
                ToneClass::Hesitant,
                ToneClass::Flat,
            ] {
                let mean = |ex| {
                    let mut total = 0usize;
                    let mut count = 0usize;
                    for &ty in &ReminderType::ALL {
                        for s in template_pool(ty, ex, m, t) {
                            total += tokenize(&s).len();
                            count += 1;
                        }
                    }
                    total as f64 / count as f64
                };
                let (l, mo, h) = (
                    mean(Expressiveness::Low),
                    mean(Expressiveness::Moderate),
                    mean(Expressiveness::High),
                );
                assert!(l < mo && mo < h, "{t:?} {m:?}: {l} {mo} {h}");
            }
        }
    }

    #[test]
    fn tone_labels_map_to_expected_classes() {
        assert_eq!(ToneClass::from_label("Brief, polite"), ToneClass::Neutral);
        assert_eq!(ToneClass::from_label("Warm, responsive"), ToneClass::Warm);
        assert_eq!(ToneClass::from_label("Calm, responsive"), ToneClass::Warm);
        assert_eq!(ToneClass::from_label("Friendly, positive"), ToneClass::Warm);
        assert_eq!(ToneClass::from_label("Hesitant, nervous"), ToneClass::Hesitant);
        assert_eq!(ToneClass::from_label("Indifferent, cold"), ToneClass::Flat);
        assert_eq!(ToneClass::from_label("Irritable, flat"), ToneClass::Flat);
        assert_eq!(ToneClass::from_label("something else"), ToneClass::Neutral);
    }

    #[test]
    fn builtin_generation_is_deterministic() {
        let request = TextGenRequest {
            persona: PersonaDescriptor {
                id: 1,
                tone: "Brief, polite".into(),
                style: "Short, neutral".into(),
                expressiveness: Expressiveness::Low,
                modality: Modality::Typed,
            },
            prompt_text: "Time to take your medication.".into(),
            reminder_type: ReminderType::Medication,
            time_of_day: 540,
            few_shot_examples: vec![],
        };
        let gen = BuiltinGenerator;
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            assert_eq!(
                gen.generate(&request, &mut a).unwrap(),
                gen.generate(&request, &mut b).unwrap()
            );
        }
    }

    #[test]
    fn flat_pool_tokens_never_carry_positive_sentiment() {
        use crate::features::is_positive_token;
        for &ty in &ReminderType::ALL {
            for &m in &[Modality::Typed, Modality::Voice] {
                for s in template_pool(ty, Expressiveness::Low, m, ToneClass::Flat) {
                    for token in tokenize(&s) {
                        assert!(!is_positive_token(&token), "{token:?} in {s:?}");
                    }
                }
            }
        }
    }
}
