//! Empirical competitive ratios against the exact offline optimum.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::generator::random_order;
use crate::generator::rng::derive_seed;
use crate::model::{compute_mu, Instance};
use crate::offline::{solve_exhaustive_with, ExhaustiveLimits};
use crate::online::competitive_bound;

use super::exec::par_map;
use super::report::{ratio, OnlineAlgorithm};

#[derive(Debug, Clone)]
pub struct RatioStudyConfig {
    pub orders_per_instance: usize,
    pub seed: u64,
    pub algorithm: OnlineAlgorithm,
    pub limits: ExhaustiveLimits,
}

impl Default for RatioStudyConfig {
    fn default() -> Self {
        RatioStudyConfig {
            orders_per_instance: 20,
            seed: 0,
            algorithm: OnlineAlgorithm::PRIMAL_DUAL,
            limits: ExhaustiveLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub instance: String,
    pub n_parcels: usize,
    pub n_workers: usize,
    pub mu: f64,
    pub bound: f64,
    pub algorithm: String,
    pub orders: usize,
    pub opt: Option<f64>,
    pub min_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub bound_respected: Option<bool>,
    /// `ok`, or why the instance was skipped.
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSummary {
    pub evaluated: usize,
    pub skipped: usize,
    pub respected: usize,
}

impl RatioSummary {
    pub fn fraction_respected(&self) -> f64 {
        if self.evaluated == 0 {
            return 1.0;
        }
        self.respected as f64 / self.evaluated as f64
    }
}

pub fn summarize(rows: &[RatioRow]) -> RatioSummary {
    RatioSummary {
        evaluated: rows.iter().filter(|r| r.bound_respected.is_some()).count(),
        skipped: rows.iter().filter(|r| r.bound_respected.is_none()).count(),
        respected: rows
            .iter()
            .filter(|r| r.bound_respected == Some(true))
            .count(),
    }
}

/// For each instance: min and mean ratio over random arrival orders, `mu`,
/// the bound `1 / (2 (1 + floor(log2 mu)))`, and whether the mean clears it.
/// Instances beyond the exhaustive oracle's limits get a skipped row.
/// Instances are processed in parallel.
pub fn ratio_study(instances: &[(String, Instance)], config: &RatioStudyConfig) -> Vec<RatioRow> {
    let indexed: Vec<(usize, &(String, Instance))> = instances.iter().enumerate().collect();
    par_map(&indexed, |&(k, (label, inst))| {
        study_one(k, label, inst, config)
    })
}

fn study_one(k: usize, label: &str, inst: &Instance, config: &RatioStudyConfig) -> RatioRow {
    let mu = compute_mu(inst);
    let bound = competitive_bound(mu).expect("mu >= 1");
    let mut row = RatioRow {
        instance: label.to_owned(),
        n_parcels: inst.n_parcels(),
        n_workers: inst.n_workers(),
        mu,
        bound,
        algorithm: config.algorithm.name().to_owned(),
        orders: config.orders_per_instance,
        opt: None,
        min_ratio: None,
        mean_ratio: None,
        bound_respected: None,
        status: "ok".into(),
    };
    let opt = match solve_exhaustive_with(inst, config.limits) {
        Ok(a) => a.total_utility(),
        Err(e) => {
            row.status = format!("skipped: {e}");
            return row;
        }
    };
    let instance_seed = derive_seed(config.seed, k as u64);
    let mut ratios = Vec::with_capacity(config.orders_per_instance);
    for o in 0..config.orders_per_instance {
        let order = random_order(inst.n_workers(), derive_seed(instance_seed, o as u64));
        match config.algorithm.run(inst, &order) {
            Ok(run) => ratios.push(ratio(run.allocation.total_utility(), opt)),
            Err(e) => {
                row.status = format!("skipped: {e}");
                return row;
            }
        }
    }
    if ratios.is_empty() {
        row.status = "skipped: no orders".into();
        return row;
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    row.opt = Some(opt);
    row.min_ratio = Some(ratios.iter().copied().fold(f64::INFINITY, f64::min));
    row.mean_ratio = Some(mean);
    row.bound_respected = Some(mean >= bound);
    row
}

pub const RATIO_CSV_HEADER: &str =
    "instance,n_parcels,n_workers,mu,bound,algorithm,orders,opt,min_ratio,mean_ratio,bound_respected,status";

pub fn write_ratio_csv(mut out: impl Write, rows: &[RatioRow]) -> std::io::Result<()> {
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.6}"));
    writeln!(out, "{RATIO_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{},{},{},{},{},{},{}",
            r.instance,
            r.n_parcels,
            r.n_workers,
            r.mu,
            r.bound,
            r.algorithm,
            r.orders,
            opt(r.opt),
            opt(r.min_ratio),
            opt(r.mean_ratio),
            r.bound_respected.map_or(String::new(), |b| b.to_string()),
            r.status.replace(',', ";"),
        )?;
    }
    Ok(())
}
