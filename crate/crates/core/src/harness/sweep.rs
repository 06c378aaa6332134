//! Parameter sweeps over synthetic instances.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::rng::derive_seed;
use crate::generator::{gen_synthetic, random_order, SyntheticConfig};

use super::exec::par_map;
use super::report::{
    offline_report, run_against, OnlineAlgorithm, RunReport, TimedOffline, OFFLINE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    NWorkers,
    NParcels,
    /// Upper end of the capacity range.
    Capacity,
    HoursMean,
    HoursStd,
    /// Number of parcels, at scale.
    Scalability,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 6] = [
        SweepParameter::NWorkers,
        SweepParameter::NParcels,
        SweepParameter::Capacity,
        SweepParameter::HoursMean,
        SweepParameter::HoursStd,
        SweepParameter::Scalability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::NWorkers => "n_workers",
            SweepParameter::NParcels => "n_parcels",
            SweepParameter::Capacity => "capacity",
            SweepParameter::HoursMean => "hours_mean",
            SweepParameter::HoursStd => "hours_std",
            SweepParameter::Scalability => "scalability",
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &SyntheticConfig, value: f64) -> Result<SyntheticConfig> {
        let count = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!(
                    "{} needs a positive integer, got {value}",
                    self.name()
                )))
            }
        };
        let mut cfg = base.clone();
        match self {
            SweepParameter::NWorkers => cfg.n_workers = count()?,
            SweepParameter::NParcels | SweepParameter::Scalability => cfg.n_parcels = count()?,
            SweepParameter::Capacity => {
                let hi = count()? as u32;
                cfg.capacity_range = [cfg.capacity_range[0].min(hi), hi];
            }
            SweepParameter::HoursMean => cfg.hours_mean = value,
            SweepParameter::HoursStd => cfg.hours_std = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub trials: usize,
    pub orders_per_trial: usize,
    pub base: SyntheticConfig,
    pub algorithms: Vec<OnlineAlgorithm>,
    /// The offline oracle only runs on instances with at most this many
    /// (parcel, worker) cells.
    pub offline_max_cells: usize,
}

impl SweepConfig {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> Self {
        let mut base = SyntheticConfig::default();
        if parameter == SweepParameter::Scalability {
            base.n_workers = 200;
        }
        SweepConfig {
            parameter,
            values,
            trials: 1,
            orders_per_trial: 1,
            base,
            algorithms: vec![OnlineAlgorithm::GREEDY, OnlineAlgorithm::PRIMAL_DUAL],
            offline_max_cells: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.trials == 0 || self.orders_per_trial == 0 {
            return Err(Error::Config(
                "trials and orders per trial must be >= 1".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("sweep needs at least one algorithm".into()));
        }
        for &v in &self.values {
            self.parameter.apply(&self.base, v)?;
        }
        Ok(())
    }

    /// Instance seed of a trial; independent of the swept value.
    pub fn instance_seed(&self, trial: usize) -> u64 {
        derive_seed(self.base.seed, trial as u64)
    }

    pub fn order_seed(&self, trial: usize, order: usize) -> u64 {
        derive_seed(
            derive_seed(self.base.seed ^ ORDER_STREAM, trial as u64),
            order as u64,
        )
    }
}

const ORDER_STREAM: u64 = 0x6f72_6465_7273;

/// Aggregate of one metric over all runs at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub algorithm: String,
    pub metric: String,
    pub mean: f64,
    pub stddev: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub runs: Vec<RunReport>,
}

pub const TIME_METRIC: &str = "time_ms";

/// Runs every algorithm over `trials` instances per value and
/// `orders_per_trial` arrival orders per instance; trials run in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> = (0..config.values.len())
        .flat_map(|v| (0..config.trials).map(move |t| (v, t)))
        .collect();
    let outputs = par_map(&tasks, |&(v, t)| run_point(config, v, t));
    let mut runs = Vec::new();
    for out in outputs {
        runs.extend(out?);
    }
    Ok(SweepResult {
        rows: aggregate(config, &runs),
        runs,
    })
}

fn point_label(config: &SweepConfig, value: f64, trial: usize) -> String {
    format!("{}={}/trial={}", config.parameter, value, trial)
}

fn run_point(config: &SweepConfig, v: usize, trial: usize) -> Result<Vec<RunReport>> {
    let value = config.values[v];
    let mut cfg = config.parameter.apply(&config.base, value)?;
    cfg.seed = config.instance_seed(trial);
    let instance = gen_synthetic(&cfg)?;
    let label = point_label(config, value, trial);
    let offline = (instance.n_parcels() * instance.n_workers() <= config.offline_max_cells)
        .then(|| TimedOffline::solve(&instance));

    let mut runs = Vec::new();
    for o in 0..config.orders_per_trial {
        let seed = config.order_seed(trial, o);
        let order = random_order(instance.n_workers(), seed);
        for &alg in &config.algorithms {
            let (report, _) =
                run_against(&instance, &label, alg, &order, Some(seed), offline.as_ref())?;
            runs.push(report);
        }
    }
    if let Some(off) = &offline {
        runs.push(offline_report(&instance, &label, off));
    }
    Ok(runs)
}

/// Mean and sample standard deviation.
pub fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn aggregate(config: &SweepConfig, runs: &[RunReport]) -> Vec<SweepRow> {
    let mut names: Vec<&str> = config.algorithms.iter().map(|a| a.name()).collect();
    names.push(OFFLINE);
    let mut rows = Vec::new();
    for &value in &config.values {
        let prefix = format!("{}={}/", config.parameter, value);
        for &alg in &names {
            let group: Vec<&RunReport> = runs
                .iter()
                .filter(|r| r.algorithm == alg && r.instance_label.starts_with(&prefix))
                .collect();
            if group.is_empty() {
                continue;
            }
            let mut metrics: Vec<(&str, Vec<f64>)> =
                vec![("utility", group.iter().map(|r| r.online_utility).collect())];
            if alg == OFFLINE {
                let exact = group
                    .iter()
                    .map(|r| f64::from(u8::from(r.offline_exact == Some(true))));
                metrics.push(("exact", exact.collect()));
            } else if group.iter().all(|r| r.ratio.is_some()) {
                metrics.push(("ratio", group.iter().filter_map(|r| r.ratio).collect()));
            }
            metrics.push((TIME_METRIC, group.iter().map(|r| r.wall_time_ms).collect()));
            metrics.push((
                "memory_bytes",
                group.iter().map(|r| r.peak_memory_bytes as f64).collect(),
            ));
            for (metric, xs) in metrics {
                let (mean, stddev) = mean_stddev(&xs);
                rows.push(SweepRow {
                    param: config.parameter.name().to_owned(),
                    value,
                    algorithm: alg.to_owned(),
                    metric: metric.to_owned(),
                    mean,
                    stddev,
                    trials: xs.len(),
                });
            }
        }
    }
    rows
}

pub const SWEEP_CSV_HEADER: &str = "param,value,algorithm,metric,mean,stddev,trials";

/// Writes aggregated rows as CSV; `time_ms` rows are dropped unless
/// `include_timing` is set.
pub fn write_sweep_csv(
    mut out: impl Write,
    rows: &[SweepRow],
    include_timing: bool,
) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        if !include_timing && r.metric == TIME_METRIC {
            continue;
        }
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{}",
            r.param, r.value, r.algorithm, r.metric, r.mean, r.stddev, r.trials
        )?;
    }
    Ok(())
}

/// Writes one JSON object per run.
pub fn write_runs_jsonl(
    mut out: impl Write,
    runs: &[RunReport],
    include_timing: bool,
) -> std::io::Result<()> {
    for r in runs {
        let r = if include_timing {
            r.clone()
        } else {
            r.clone().without_timings()
        };
        serde_json::to_writer(&mut out, &r)?;
        writeln!(out)?;
    }
    Ok(())
}
