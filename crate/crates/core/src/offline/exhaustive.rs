use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, Pair, ParcelId, WorkerId, TOLERANCE};

/// Size guard for [`solve_exhaustive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveLimits {
    pub max_parcels: usize,
    pub max_workers: usize,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        ExhaustiveLimits {
            max_parcels: 12,
            max_workers: 4,
        }
    }
}

impl ExhaustiveLimits {
    pub fn admits(&self, instance: &Instance) -> bool {
        instance.n_parcels() <= self.max_parcels && instance.n_workers() <= self.max_workers
    }
}

pub fn solve_exhaustive(instance: &Instance) -> Result<Allocation> {
    solve_exhaustive_with(instance, ExhaustiveLimits::default())
}

/// Exact optimum over every assignment of parcels to workers or to nobody,
/// honoring capacities and time budgets. Among optima (within tolerance)
/// the lexicographically smallest sorted pair list wins.
pub fn solve_exhaustive_with(instance: &Instance, limits: ExhaustiveLimits) -> Result<Allocation> {
    if !limits.admits(instance) {
        return Err(Error::OracleSizeGuard {
            n_parcels: instance.n_parcels(),
            n_workers: instance.n_workers(),
            max_parcels: limits.max_parcels,
            max_workers: limits.max_workers,
        });
    }
    let n = instance.n_parcels();
    let mut suffix_bound = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let best = instance
            .worker_ids()
            .map(|j| instance.utility(ParcelId(i), j))
            .fold(0.0, f64::max);
        suffix_bound[i] = suffix_bound[i + 1] + best;
    }
    let mut search = Search {
        instance,
        suffix_bound,
        count: vec![0; instance.n_workers()],
        used: vec![0.0; instance.n_workers()],
        current: Vec::with_capacity(n),
        best_pairs: Vec::new(),
        best_utility: 0.0,
    };
    search.visit(0, 0.0);
    Allocation::from_pairs(instance, search.best_pairs)
}

struct Search<'a> {
    instance: &'a Instance,
    suffix_bound: Vec<f64>,
    count: Vec<u32>,
    used: Vec<f64>,
    current: Vec<Pair>,
    best_pairs: Vec<Pair>,
    best_utility: f64,
}

impl Search<'_> {
    fn visit(&mut self, i: usize, utility: f64) {
        if utility + self.suffix_bound[i] < self.best_utility - TOLERANCE {
            return;
        }
        if i == self.instance.n_parcels() {
            let better = utility > self.best_utility + TOLERANCE;
            let tied = (utility - self.best_utility).abs() <= TOLERANCE;
            if better || (tied && self.current < self.best_pairs) {
                self.best_utility = utility;
                self.best_pairs.clone_from(&self.current);
            }
            return;
        }
        let parcel = ParcelId(i);
        for j in self.instance.worker_ids() {
            let w = self.instance.worker(j);
            let t = self.instance.delivery_time(parcel, j);
            if self.count[j.0] >= w.capacity || self.used[j.0] + t > w.time_budget + TOLERANCE {
                continue;
            }
            self.count[j.0] += 1;
            self.used[j.0] += t;
            self.current.push((parcel, j));
            self.visit(i + 1, utility + self.instance.utility(parcel, j));
            self.current.pop();
            self.used[j.0] -= t;
            self.count[j.0] -= 1;
        }
        self.visit(i + 1, utility);
    }
}

/// All optimal pair sets (sorted), for small instances. Test support.
#[doc(hidden)]
pub fn enumerate_optima(instance: &Instance) -> (f64, Vec<Vec<Pair>>) {
    let n = instance.n_parcels();
    let m = instance.n_workers();
    let mut best = 0.0;
    let mut optima: Vec<Vec<Pair>> = vec![Vec::new()];
    let total = (m + 1).pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let mut pairs = Vec::new();
        for i in 0..n {
            let choice = rest % (m + 1);
            rest /= m + 1;
            if choice < m {
                pairs.push((ParcelId(i), WorkerId(choice)));
            }
        }
        let alloc = match Allocation::from_pairs(instance, pairs) {
            Ok(a) => a,
            Err(_) => continue,
        };
        if !crate::model::check_feasible(instance, &alloc).unwrap_or(false) {
            continue;
        }
        let u = alloc.total_utility();
        if u > best + TOLERANCE {
            best = u;
            optima = vec![alloc.sorted_pairs()];
        } else if (u - best).abs() <= TOLERANCE {
            optima.push(alloc.sorted_pairs());
        }
    }
    optima.sort();
    (best, optima)
}
