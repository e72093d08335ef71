//! Evaluation metrics and benchmark orchestration.

mod benchmark;
mod metrics;

pub use benchmark::{
    generalized_eval, personalized_eval, run_flatten_benchmark, run_offtopic_benchmark,
    BenchmarkConfig, BenchmarkError, CellKey, CellMetrics, DetectorOverrides, EvaluationReport,
    FlattenMethod, OfftopicMethod, ReportMetadata, SupervisedMetrics, Task,
};
pub use metrics::{
    detection_delay, f1, roc_auc, ConfusionCounts, DelayStats, MetricsError,
};
