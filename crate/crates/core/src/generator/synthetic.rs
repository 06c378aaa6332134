use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Worker};

use super::rng::{derive_seed, Sampler};

/// Parameters of the synthetic workload.
///
/// Defaults: 200 parcels, 40 workers, capacities uniform on `[1, 6]`,
/// working hours `N(5, 5)`, utilities uniform on `[10, 20)` and delivery
/// times uniform on `[0.5, 2.0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_parcels: usize,
    pub n_workers: usize,
    pub capacity_range: [u32; 2],
    pub hours_mean: f64,
    pub hours_std: f64,
    pub utility_range: [f64; 2],
    pub time_range: [f64; 2],
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_parcels: 200,
            n_workers: 40,
            capacity_range: [1, 6],
            hours_mean: 5.0,
            hours_std: 5.0,
            utility_range: [10.0, 20.0],
            time_range: [0.5, 2.0],
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_parcels == 0 || self.n_workers == 0 {
            return fail("n_parcels and n_workers must be at least 1".into());
        }
        let [cmin, cmax] = self.capacity_range;
        if cmin < 1 || cmin > cmax {
            return fail(format!(
                "capacity_range [{cmin}, {cmax}] must satisfy 1 <= lo <= hi"
            ));
        }
        if !(self.hours_mean.is_finite() && self.hours_std.is_finite() && self.hours_std >= 0.0) {
            return fail("hours_mean must be finite and hours_std finite and >= 0".into());
        }
        for (name, [lo, hi]) in [
            ("utility_range", self.utility_range),
            ("time_range", self.time_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
                return fail(format!("{name} [{lo}, {hi}] must satisfy 0 <= lo < hi"));
            }
        }
        Ok(())
    }
}

/// Generates a synthetic instance.
///
/// Worker `j` draws from its own stream `derive_seed(seed, j)`: capacity,
/// then working hours (a negative draw is redrawn once, then clamped at 0),
/// then `(p_ij, t_ij)` for parcels `0..n` in order. An instance with fewer
/// parcels or workers under the same seed is therefore the top-left corner
/// of a larger one.
pub fn gen_synthetic(config: &SyntheticConfig) -> Result<Instance> {
    config.validate()?;
    let n = config.n_parcels;
    let m = config.n_workers;
    let mut workers = Vec::with_capacity(m);
    let mut utility = Vec::with_capacity(n * m);
    let mut time = Vec::with_capacity(n * m);
    for j in 0..m {
        let mut rng = Sampler::new(derive_seed(config.seed, j as u64));
        let [cmin, cmax] = config.capacity_range;
        let capacity = rng.int_inclusive(cmin as u64, cmax as u64) as u32;
        let mut hours = rng.normal(config.hours_mean, config.hours_std);
        if hours < 0.0 {
            hours = rng.normal(config.hours_mean, config.hours_std).max(0.0);
        }
        workers.push(Worker::new(capacity, hours));
        for _ in 0..n {
            utility.push(rng.uniform(config.utility_range[0], config.utility_range[1]));
            time.push(rng.uniform(config.time_range[0], config.time_range[1]));
        }
    }
    Instance::from_worker_major(n, workers, utility, time)
}

/// Small instances satisfying `t_ij <= T_j <= mu * t_ij` for every pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundedConfig {
    pub n_parcels: usize,
    pub n_workers: usize,
    pub mu: f64,
    pub capacity_range: [u32; 2],
    pub budget_range: [f64; 2],
    pub utility_range: [f64; 2],
    pub seed: u64,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        BoundedConfig {
            n_parcels: 8,
            n_workers: 3,
            mu: 4.0,
            capacity_range: [1, 4],
            budget_range: [1.0, 10.0],
            utility_range: [10.0, 20.0],
            seed: 0,
        }
    }
}

/// Draws `T_j` uniformly on `budget_range`, then `t_ij = T_j / r` with `r`
/// uniform on `[1, mu]`, so every ratio `T_j / t_ij` lies in `[1, mu]`.
pub fn gen_bounded(config: &BoundedConfig) -> Result<Instance> {
    let [cmin, cmax] = config.capacity_range;
    let [blo, bhi] = config.budget_range;
    if config.n_workers == 0 || cmin < 1 || cmin > cmax {
        return Err(Error::Config(
            "need workers >= 1 and 1 <= capacity lo <= hi".into(),
        ));
    }
    if !(config.mu >= 1.0 && config.mu.is_finite()) {
        return Err(Error::InvalidMu(config.mu));
    }
    if !(blo > 0.0 && blo <= bhi && bhi.is_finite()) {
        return Err(Error::Config(format!(
            "budget_range [{blo}, {bhi}] must satisfy 0 < lo <= hi"
        )));
    }
    let [ulo, uhi] = config.utility_range;
    if !(ulo >= 0.0 && ulo <= uhi && uhi.is_finite()) {
        return Err(Error::Config(format!(
            "utility_range [{ulo}, {uhi}] must satisfy 0 <= lo <= hi"
        )));
    }
    let n = config.n_parcels;
    let mut workers = Vec::new();
    let mut utility = Vec::new();
    let mut time = Vec::new();
    for j in 0..config.n_workers {
        let mut rng = Sampler::new(derive_seed(config.seed, j as u64));
        let capacity = rng.int_inclusive(cmin as u64, cmax as u64) as u32;
        let budget = rng.uniform(blo, bhi);
        workers.push(Worker::new(capacity, budget));
        for _ in 0..n {
            utility.push(rng.uniform(ulo, uhi));
            // keep the ratio inside [1, mu] after rounding
            let t = (budget / rng.uniform(1.0, config.mu)).clamp(budget / config.mu, budget);
            time.push(t);
        }
    }
    Instance::from_worker_major(n, workers, utility, time)
}
