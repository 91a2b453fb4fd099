//! Evaluation protocol: ranking of known important variables, a
//! local-linear baseline, significance tests and the experiment runner.

mod baseline;
mod experiment;
mod rank;
mod stats;

pub use baseline::{baseline_local_linear, BaselineConfig};
pub use experiment::{
    prepare_data, render_text, run_experiment, write_report, CennetScore, Comparison, DataSummary, DatasetConfig,
    EvalConfig, Experiment, ExperimentConfig, ExperimentReport, MethodReport, ModelSummary, PreparedData, RatioSpec,
    Timings, REPORT_JSON, REPORT_TEXT, TIMINGS_JSON,
};
pub use rank::{competition_rank, rank_combo, rank_single, RankResult};
pub use stats::{mcnemar, welch_t, WelchResult};
