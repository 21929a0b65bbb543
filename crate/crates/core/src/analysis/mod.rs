//! Quantitative analysis procedures over training outcomes.

pub mod binomial;
pub mod cosine;
pub mod gradients;
pub mod kmeans;
pub mod runs;
pub mod sensitivity;

pub use binomial::{binomial_above_chance, binomial_tail_ln};
pub use cosine::{histogram, pairwise_cosine, GradientSet, HistBin, DEFAULT_COSINE_BINS};
pub use gradients::{read_gradients, read_gradients_csv, write_gradients, GRADIENT_MAGIC};
pub use kmeans::{kmeans_1d, kmeans_1d_restarts, KMeans1d};
pub use runs::{read_runs_csv, read_runs_jsonl, HpValue, RunRecord, Split};
pub use sensitivity::{
    hp_sensitivity, hp_sensitivity_values, mean_accuracy_summary, AccuracySummary, PerK, SensitivityOptions,
    SensitivityReport,
};
