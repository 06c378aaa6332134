use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, WorkerId, TOLERANCE};
use crate::offline::{flow_memory_estimate, solve_offline, OfflineMethod, OfflineSolution};
use crate::online::{greedy_run, primal_dual_run, BundleMode, DualUpdate, OnlineRun};

/// An online algorithm together with its variant switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OnlineAlgorithm {
    Greedy(BundleMode),
    PrimalDual(DualUpdate),
}

impl OnlineAlgorithm {
    pub const GREEDY: Self = OnlineAlgorithm::Greedy(BundleMode::PaperGreedy);
    pub const PRIMAL_DUAL: Self = OnlineAlgorithm::PrimalDual(DualUpdate::Additive);

    pub fn name(self) -> &'static str {
        match self {
            OnlineAlgorithm::Greedy(BundleMode::PaperGreedy) => "greedy",
            OnlineAlgorithm::Greedy(BundleMode::ExactKnapsack) => "greedy-exact",
            OnlineAlgorithm::PrimalDual(DualUpdate::Additive) => "primal-dual",
            OnlineAlgorithm::PrimalDual(DualUpdate::Literal) => "primal-dual-literal",
        }
    }

    pub fn run(self, instance: &Instance, order: &[WorkerId]) -> Result<OnlineRun> {
        match self {
            OnlineAlgorithm::Greedy(mode) => greedy_run(instance, order, mode),
            OnlineAlgorithm::PrimalDual(update) => primal_dual_run(instance, order, update),
        }
    }
}

impl fmt::Display for OnlineAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OnlineAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            OnlineAlgorithm::GREEDY,
            OnlineAlgorithm::Greedy(BundleMode::ExactKnapsack),
            OnlineAlgorithm::PRIMAL_DUAL,
            OnlineAlgorithm::PrimalDual(DualUpdate::Literal),
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Name used for offline-oracle rows in reports.
pub const OFFLINE: &str = "offline";

/// Measurements of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub instance_label: String,
    pub arrival_order_seed: Option<u64>,
    pub online_utility: f64,
    pub assigned: usize,
    pub offline_utility: Option<f64>,
    pub offline_method: Option<OfflineMethod>,
    pub offline_exact: Option<bool>,
    pub ratio: Option<f64>,
    pub wall_time_ms: f64,
    pub offline_wall_time_ms: Option<f64>,
    pub peak_memory_bytes: usize,
}

impl RunReport {
    /// Zeroes every wall-clock field, leaving only reproducible values.
    pub fn without_timings(mut self) -> Self {
        self.wall_time_ms = 0.0;
        self.offline_wall_time_ms = self.offline_wall_time_ms.map(|_| 0.0);
        self
    }
}

/// `online / offline`, or 1 when the offline optimum is zero.
pub fn ratio(online: f64, offline: f64) -> f64 {
    if offline > TOLERANCE {
        online / offline
    } else {
        1.0
    }
}

/// An offline solution and the time it took.
#[derive(Debug, Clone)]
pub struct TimedOffline {
    pub solution: OfflineSolution,
    pub wall_time_ms: f64,
}

impl TimedOffline {
    pub fn solve(instance: &Instance) -> Self {
        let (solution, wall_time_ms) = timed(|| solve_offline(instance));
        TimedOffline {
            solution,
            wall_time_ms,
        }
    }
}

pub(crate) fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// Runs `algorithm` once and compares against the offline optimum.
/// Only the online phase counts towards `wall_time_ms`.
pub fn run_once(
    instance: &Instance,
    label: &str,
    algorithm: OnlineAlgorithm,
    order: &[WorkerId],
    order_seed: Option<u64>,
) -> Result<RunReport> {
    let offline = TimedOffline::solve(instance);
    run_against(
        instance,
        label,
        algorithm,
        order,
        order_seed,
        Some(&offline),
    )
    .map(|(r, _)| r)
}

/// Runs `algorithm` and, if given, compares against a precomputed offline
/// solution.
pub fn run_against(
    instance: &Instance,
    label: &str,
    algorithm: OnlineAlgorithm,
    order: &[WorkerId],
    order_seed: Option<u64>,
    offline: Option<&TimedOffline>,
) -> Result<(RunReport, OnlineRun)> {
    let (run, wall_time_ms) = timed(|| algorithm.run(instance, order));
    let run = run?;
    let online_utility = run.allocation.total_utility();
    let report = RunReport {
        algorithm: algorithm.name().to_owned(),
        instance_label: label.to_owned(),
        arrival_order_seed: order_seed,
        online_utility,
        assigned: run.allocation.len(),
        offline_utility: offline.map(|o| o.solution.utility()),
        offline_method: offline.map(|o| o.solution.method),
        offline_exact: offline.map(|o| o.solution.exact()),
        ratio: offline.map(|o| ratio(online_utility, o.solution.utility())),
        wall_time_ms,
        offline_wall_time_ms: offline.map(|o| o.wall_time_ms),
        peak_memory_bytes: instance.heap_bytes() + run.peak_bytes,
    };
    Ok((report, run))
}

/// Report row for the offline oracle itself.
pub fn offline_report(instance: &Instance, label: &str, offline: &TimedOffline) -> RunReport {
    let u = offline.solution.utility();
    let net_bytes = flow_memory_estimate(instance.n_parcels(), instance.n_workers());
    RunReport {
        algorithm: OFFLINE.to_owned(),
        instance_label: label.to_owned(),
        arrival_order_seed: None,
        online_utility: u,
        assigned: offline.solution.allocation.len(),
        offline_utility: Some(u),
        offline_method: Some(offline.solution.method),
        offline_exact: Some(offline.solution.exact()),
        ratio: Some(1.0),
        wall_time_ms: offline.wall_time_ms,
        offline_wall_time_ms: Some(offline.wall_time_ms),
        peak_memory_bytes: instance.heap_bytes() + net_bytes,
    }
}
