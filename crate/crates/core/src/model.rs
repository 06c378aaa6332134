//! Problem data model: parcels, workers, the utility and delivery-time
//! matrices, and allocations with their feasibility rules.
//!
//! An allocation is feasible when
//!
//! * every parcel is assigned to at most one worker,
//! * worker `j` holds at most `c_j` parcels, and
//! * the delivery times of worker `j`'s parcels sum to at most `T_j`.
//!
//! All instance types are immutable once built and can be shared freely
//! between threads.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every floating comparison in the crate.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParcelId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WorkerId(pub usize);

impl fmt::Display for ParcelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Display for WorkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// A crowd worker: carries at most `capacity` parcels within `time_budget`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Worker {
    pub capacity: u32,
    pub time_budget: f64,
}

impl Worker {
    pub fn new(capacity: u32, time_budget: f64) -> Self {
        Worker {
            capacity,
            time_budget,
        }
    }

    fn validate(&self, id: usize) -> Result<()> {
        if self.capacity < 1 {
            return Err(Error::InvalidWorker {
                worker: id,
                reason: "capacity must be at least 1".into(),
            });
        }
        if !(self.time_budget.is_finite() && self.time_budget >= 0.0) {
            return Err(Error::InvalidWorker {
                worker: id,
                reason: format!("time budget {} must be finite and >= 0", self.time_budget),
            });
        }
        Ok(())
    }
}

/// A full problem instance.
///
/// Matrices are stored worker-major (`[j * n + i]`) since every algorithm
/// here scans all parcels for one worker at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n_parcels: usize,
    workers: Vec<Worker>,
    utility: Vec<f64>,
    delivery_time: Vec<f64>,
}

impl Instance {
    /// Builds an instance from parcel-major (`n` rows of `m` entries) matrices.
    pub fn new(
        n_parcels: usize,
        workers: Vec<Worker>,
        utility: &[Vec<f64>],
        delivery_time: &[Vec<f64>],
    ) -> Result<Self> {
        let m = workers.len();
        let utility = transpose("utility", n_parcels, m, utility)?;
        let delivery_time = transpose("delivery_time", n_parcels, m, delivery_time)?;
        Self::from_worker_major(n_parcels, workers, utility, delivery_time)
    }

    /// Builds an instance from flat worker-major matrices (`[j * n + i]`).
    pub fn from_worker_major(
        n_parcels: usize,
        workers: Vec<Worker>,
        utility: Vec<f64>,
        delivery_time: Vec<f64>,
    ) -> Result<Self> {
        let m = workers.len();
        for (j, w) in workers.iter().enumerate() {
            w.validate(j)?;
        }
        for (name, data) in [("utility", &utility), ("delivery_time", &delivery_time)] {
            if data.len() != n_parcels * m {
                return Err(Error::Dimension {
                    matrix: name,
                    axis: "entries",
                    expected: n_parcels * m,
                    found: data.len(),
                });
            }
            if let Some(k) = data.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidEntry {
                    matrix: name,
                    row: k % n_parcels.max(1),
                    col: k / n_parcels.max(1),
                    value: data[k],
                });
            }
        }
        Ok(Instance {
            n_parcels,
            workers,
            utility,
            delivery_time,
        })
    }

    pub fn n_parcels(&self) -> usize {
        self.n_parcels
    }

    pub fn n_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn workers(&self) -> &[Worker] {
        &self.workers
    }

    pub fn worker(&self, j: WorkerId) -> &Worker {
        &self.workers[j.0]
    }

    pub fn parcels(&self) -> impl ExactSizeIterator<Item = ParcelId> {
        (0..self.n_parcels).map(ParcelId)
    }

    pub fn worker_ids(&self) -> impl ExactSizeIterator<Item = WorkerId> {
        (0..self.workers.len()).map(WorkerId)
    }

    #[inline]
    pub fn utility(&self, i: ParcelId, j: WorkerId) -> f64 {
        self.utility[j.0 * self.n_parcels + i.0]
    }

    #[inline]
    pub fn delivery_time(&self, i: ParcelId, j: WorkerId) -> f64 {
        self.delivery_time[j.0 * self.n_parcels + i.0]
    }

    /// Utilities of every parcel for worker `j`, indexed by parcel id.
    pub fn utility_column(&self, j: WorkerId) -> &[f64] {
        &self.utility[j.0 * self.n_parcels..(j.0 + 1) * self.n_parcels]
    }

    /// Delivery times of every parcel for worker `j`, indexed by parcel id.
    pub fn time_column(&self, j: WorkerId) -> &[f64] {
        &self.delivery_time[j.0 * self.n_parcels..(j.0 + 1) * self.n_parcels]
    }

    /// Parcel-major copy of the utility matrix.
    pub fn utility_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.utility, self.n_parcels, self.n_workers())
    }

    /// Parcel-major copy of the delivery-time matrix.
    pub fn time_rows(&self) -> Vec<Vec<f64>> {
        rows(&self.delivery_time, self.n_parcels, self.n_workers())
    }

    pub fn max_utility(&self) -> f64 {
        self.utility.iter().copied().fold(0.0, f64::max)
    }

    /// True when worker `j` can carry any `c_j` parcels within its budget,
    /// i.e. `T_j` is at least the sum of its `c_j` largest delivery times.
    pub fn budget_non_binding(&self, j: WorkerId) -> bool {
        let w = self.worker(j);
        let mut times = self.time_column(j).to_vec();
        let k = (w.capacity as usize).min(times.len());
        if k == 0 {
            return true;
        }
        if k < times.len() {
            times.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        }
        let worst: f64 = times[..k].iter().sum();
        worst <= w.time_budget + TOLERANCE
    }

    pub fn budgets_non_binding(&self) -> bool {
        self.worker_ids().all(|j| self.budget_non_binding(j))
    }

    /// Approximate heap footprint of the instance in bytes.
    pub fn heap_bytes(&self) -> usize {
        std::mem::size_of_val(self.workers.as_slice())
            + std::mem::size_of_val(self.utility.as_slice())
            + std::mem::size_of_val(self.delivery_time.as_slice())
    }
}

fn transpose(name: &'static str, n: usize, m: usize, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    if rows.len() != n {
        return Err(Error::Dimension {
            matrix: name,
            axis: "rows",
            expected: n,
            found: rows.len(),
        });
    }
    let mut out = vec![0.0; n * m];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::RowLength {
                matrix: name,
                row: i,
                expected: m,
                found: row.len(),
            });
        }
        for (j, v) in row.iter().enumerate() {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidEntry {
                    matrix: name,
                    row: i,
                    col: j,
                    value: *v,
                });
            }
            out[j * n + i] = *v;
        }
    }
    Ok(out)
}

fn rows(data: &[f64], n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..m).map(|j| data[j * n + i]).collect())
        .collect()
}

/// A (parcel, worker) assignment.
pub type Pair = (ParcelId, WorkerId);

/// A set of assignments together with its total utility.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pairs: Vec<Pair>,
    total_utility: f64,
}

impl Allocation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds an allocation from pairs, computing its utility. Fails on ids
    /// outside the instance; does not check feasibility.
    pub fn from_pairs(instance: &Instance, pairs: Vec<Pair>) -> Result<Self> {
        let total_utility = allocation_utility(instance, &pairs)?;
        Ok(Allocation {
            pairs,
            total_utility,
        })
    }

    /// Builds an allocation with a caller-supplied utility, which may be wrong.
    pub fn with_claimed_utility(pairs: Vec<Pair>, total_utility: f64) -> Self {
        Allocation {
            pairs,
            total_utility,
        }
    }

    pub(crate) fn push(&mut self, instance: &Instance, pair: Pair) {
        self.total_utility += instance.utility(pair.0, pair.1);
        self.pairs.push(pair);
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_utility(&self) -> f64 {
        self.total_utility
    }

    /// Pairs sorted by (parcel, worker).
    pub fn sorted_pairs(&self) -> Vec<Pair> {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        pairs
    }

    /// Parcels held by each worker, in assignment order.
    pub fn by_worker(&self, n_workers: usize) -> Vec<Vec<ParcelId>> {
        let mut out = vec![Vec::new(); n_workers];
        for &(i, j) in &self.pairs {
            out[j.0].push(i);
        }
        out
    }

    pub fn worker_of(&self, parcel: ParcelId) -> Option<WorkerId> {
        self.pairs
            .iter()
            .find(|(i, _)| *i == parcel)
            .map(|&(_, j)| j)
    }
}

fn check_ids(instance: &Instance, pairs: &[Pair]) -> Result<()> {
    for &(i, j) in pairs {
        if i.0 >= instance.n_parcels() {
            return Err(Error::UnknownParcel {
                parcel: i.0,
                n_parcels: instance.n_parcels(),
            });
        }
        if j.0 >= instance.n_workers() {
            return Err(Error::UnknownWorker {
                worker: j.0,
                n_workers: instance.n_workers(),
            });
        }
    }
    Ok(())
}

/// Sum of `p_ij` over the given pairs.
pub fn allocation_utility(instance: &Instance, pairs: &[Pair]) -> Result<f64> {
    check_ids(instance, pairs)?;
    Ok(pairs.iter().map(|&(i, j)| instance.utility(i, j)).sum())
}

/// True iff the allocation respects the one-worker-per-parcel, capacity and
/// time-budget constraints and its recorded utility matches its pairs.
pub fn check_feasible(instance: &Instance, allocation: &Allocation) -> Result<bool> {
    let pairs = allocation.pairs();
    let utility = allocation_utility(instance, pairs)?;

    let mut seen = vec![false; instance.n_parcels()];
    let mut count = vec![0u32; instance.n_workers()];
    let mut time = vec![0.0f64; instance.n_workers()];
    for &(i, j) in pairs {
        if std::mem::replace(&mut seen[i.0], true) {
            return Ok(false);
        }
        count[j.0] += 1;
        time[j.0] += instance.delivery_time(i, j);
    }
    let within_limits = instance
        .workers()
        .iter()
        .enumerate()
        .all(|(j, w)| count[j] <= w.capacity && time[j] <= w.time_budget + TOLERANCE);
    Ok(within_limits && (utility - allocation.total_utility()).abs() <= TOLERANCE)
}

/// Largest `T_j / t_ij` over pairs with `0 < t_ij <= T_j`; 1 when there is none.
pub fn compute_mu(instance: &Instance) -> f64 {
    let mut mu: Option<f64> = None;
    for j in instance.worker_ids() {
        let budget = instance.worker(j).time_budget;
        for &t in instance.time_column(j) {
            if t > 0.0 && t <= budget {
                let ratio = budget / t;
                mu = Some(mu.map_or(ratio, |m| m.max(ratio)));
            }
        }
    }
    mu.unwrap_or(1.0)
}
