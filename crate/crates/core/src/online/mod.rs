//! Online allocation: workers arrive one at a time and each takes an
//! irrevocable bundle of the still-unassigned parcels.

mod bundle;
mod greedy;
mod primal_dual;

pub use bundle::{
    select_bundle, select_bundle_traced, Bundle, BundleMethod, BundleMode, MAX_TIME_BUCKETS,
};
pub use greedy::{greedy_run, greedy_run_observed};
pub use primal_dual::{
    competitive_bound, primal_dual_run, primal_dual_run_observed, DualState, DualUpdate,
};

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, ParcelId, WorkerId};

/// Result of one online pass.
#[derive(Debug, Clone)]
pub struct OnlineRun {
    pub allocation: Allocation,
    pub duals: Option<DualState>,
    /// Analytic peak of the run's working memory, in bytes.
    pub peak_bytes: usize,
}

/// Mutable state of an online pass.
#[derive(Debug, Clone)]
pub struct OnlineState {
    unassigned: Vec<ParcelId>,
    owner: Vec<Option<WorkerId>>,
    per_worker: Vec<Vec<ParcelId>>,
    committed: Allocation,
}

impl OnlineState {
    pub fn new(instance: &Instance) -> Self {
        OnlineState {
            unassigned: instance.parcels().collect(),
            owner: vec![None; instance.n_parcels()],
            per_worker: vec![Vec::new(); instance.n_workers()],
            committed: Allocation::empty(),
        }
    }

    /// Unassigned parcels, ascending by id.
    pub fn unassigned(&self) -> &[ParcelId] {
        &self.unassigned
    }

    pub fn bundle_of(&self, worker: WorkerId) -> &[ParcelId] {
        &self.per_worker[worker.0]
    }

    pub fn owner(&self, parcel: ParcelId) -> Option<WorkerId> {
        self.owner[parcel.0]
    }

    pub fn committed(&self) -> &Allocation {
        &self.committed
    }

    pub fn into_allocation(self) -> Allocation {
        self.committed
    }

    /// Assigns `bundle` to `worker`. Every parcel must still be unassigned.
    pub fn commit(&mut self, instance: &Instance, worker: WorkerId, bundle: &[ParcelId]) {
        if bundle.is_empty() {
            return;
        }
        for &p in bundle {
            assert!(self.owner[p.0].is_none(), "{p} already assigned");
            self.owner[p.0] = Some(worker);
            self.per_worker[worker.0].push(p);
            self.committed.push(instance, (p, worker));
        }
        let owner = &self.owner;
        self.unassigned.retain(|p| owner[p.0].is_none());
    }

    pub fn heap_bytes(&self) -> usize {
        self.unassigned.capacity() * std::mem::size_of::<ParcelId>()
            + self.owner.capacity() * std::mem::size_of::<Option<WorkerId>>()
            + self
                .per_worker
                .iter()
                .map(|v| v.capacity() * std::mem::size_of::<ParcelId>())
                .sum::<usize>()
            + self.committed.len() * std::mem::size_of::<(ParcelId, WorkerId)>()
    }
}

/// Fails unless `order` is a permutation of the instance's worker ids.
pub fn validate_order(instance: &Instance, order: &[WorkerId]) -> Result<()> {
    let m = instance.n_workers();
    if order.len() != m {
        return Err(Error::InvalidOrder(format!(
            "expected {m} workers, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; m];
    for &j in order {
        if j.0 >= m {
            return Err(Error::InvalidOrder(format!("unknown worker {}", j.0)));
        }
        if std::mem::replace(&mut seen[j.0], true) {
            return Err(Error::InvalidOrder(format!("worker {} appears twice", j.0)));
        }
    }
    Ok(())
}
