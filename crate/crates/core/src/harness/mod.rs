//! Experiment driver: training with early stopping, evaluation, multi-seed
//! statistics, the ablation grid, reports and config files.

mod data;
mod early_stop;
mod evaluate;
mod experiment;
pub mod files;
mod gradcheck;
mod grid;
mod report;
mod stats;
mod train;

pub use data::{dialog_ranges, gold_contexts, Encoder};
pub use early_stop::{run_with_early_stopping, EarlyStopping, EpochRunner, TrainRecord, Verdict};
pub use evaluate::{evaluate, predict_dialogs, Evaluation};
pub use experiment::{
    check_unique_names, load_pretrained_rows, run_experiment, run_on_splits, ExperimentResult,
    ExperimentSpec, RunOutcome, DEFAULT_SEEDS,
};
pub use files::{load_config, load_experiments, parse_config, parse_experiments, RunConfig};
pub use gradcheck::check_config;
pub use grid::{
    paper_grid, run_grid, GridOptions, GridPlan, CHAR_WINDOWS, WINDOW_SWEEP, WORD_WINDOWS,
};
pub use report::{
    emit_report, format_value, render_report, report_rows, ReportFormat, ReportRow, COLUMNS,
};
pub use stats::RunStatistics;
pub use train::{bundle, train};
