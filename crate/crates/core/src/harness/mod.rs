//! Experiment orchestration: single runs, parameter sweeps and ratio
//! studies, plus their CSV / JSON-lines writers.

pub mod exec;
mod ratio;
mod report;
mod sweep;

pub use ratio::{
    ratio_study, summarize, write_ratio_csv, RatioRow, RatioStudyConfig, RatioSummary,
    RATIO_CSV_HEADER,
};
pub use report::{
    offline_report, ratio, run_against, run_once, OnlineAlgorithm, RunReport, TimedOffline, OFFLINE,
};
pub use sweep::{
    mean_stddev, run_sweep, write_runs_jsonl, write_sweep_csv, SweepConfig, SweepParameter,
    SweepResult, SweepRow, SWEEP_CSV_HEADER, TIME_METRIC,
};
