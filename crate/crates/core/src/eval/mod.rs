//! Classification metrics, Flat-Hit@K, stratified folds and experiment drivers.

mod experiment;
mod hits;
mod kfold;
mod metrics;

pub use experiment::{
    run_supervised_experiment, run_zsl_experiment, FoldCell, PooledData, Setting, SplitSize, SupervisedConfig,
    SupervisedReport, ZslCell, ZslConfig, ZslReport, ZslSummaryRow,
};
pub use hits::{flat_hit_at_k, HitReport, DEFAULT_KS};
pub use kfold::{stratified_kfold, Fold};
pub use metrics::{accuracy, classification_metrics, metrics_from_counts, Averaging, ConfusionCounts, LabelCounts, MetricsReport};
