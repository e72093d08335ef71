//! Synthetic benchmark toolkit for temporal communication-drift detection.
//!
//! The crate simulates longitudinal reminder–response logs for a roster of
//! caregiver-informed personas, injects progressive communication anomalies
//! (flattened sentiment, off-topic drift) with ground-truth labels, and
//! evaluates a suite of statistical and learned detectors under a seeded,
//! fully deterministic protocol.
//!
//! Pipeline stages map onto modules:
//!
//! - [`persona`] — persona profiles, delay models, weekly schedules, and the
//!   eight built-in personas.
//! - [`simulator`] — 60-day interaction logs: scheduled reminders, random
//!   events, acknowledgment outcomes, generated response text.
//! - [`textgen`] — response text generation (deterministic builtin template
//!   pools plus an HTTP-backed external generator).
//! - [`anomaly`] — progressive anomaly injection with severity schedules.
//! - [`features`] — tone and semantic feature extraction over a pluggable
//!   embedding provider.
//! - [`detectors`] — CUSUM (both chart forms), EWMA, one-class SVM, GRU
//!   sequence predictor, logistic classifiers.
//! - [`evaluation`] — F1 / detection-delay / ROC-AUC metrics and the
//!   benchmark orchestration (per-persona, per-speed, personalized vs
//!   generalized).
//! - [`logfile`] — JSONL serialization of interaction logs.

pub mod anomaly;
pub mod detectors;
pub mod evaluation;
pub mod features;
pub mod logfile;
pub mod persona;
pub mod seeding;
pub mod simulator;
pub mod textgen;

pub use anomaly::{AnomalyKind, AnomalyLabel, AnomalySpec, Speed};
pub use persona::{DelayModel, Expressiveness, Modality, Persona, ReminderType, ScheduleEntry};
pub use simulator::{InteractionLog, ReminderEvent, ResponseRecord};
