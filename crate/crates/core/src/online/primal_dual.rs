//! Primal-dual online allocation.
//!
//! Dual program: minimize `sum_i a_i (T_j + c_j) + sum_j b_j` subject to
//! `a_i (T_j + c_j) + b_j >= p_ij` and `a, b >= 0`. An arriving worker only
//! considers parcels whose dual constraint is still slack, takes the
//! utility-maximal feasible bundle among them, and then raises the duals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, ParcelId, WorkerId};

use super::bundle::{select_bundle_traced, BundleMode};
use super::{validate_order, OnlineRun, OnlineState};

/// Dual update applied after each arrival.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualUpdate {
    /// `a_i += t_ij / T_j` for each assigned parcel, then
    /// `b_j += max(0, max over unassigned i of p_ij - a_i (T_j + c_j))`.
    #[default]
    Additive,
    /// Assignment-style rule evaluated after `x_ij = 1`:
    /// `a_i = t_ij (1 - x_ij) = 0`, `b_j = p_ij (1 - x_ij) + x_ij = 1`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualState {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl DualState {
    pub fn zeros(n_parcels: usize, n_workers: usize) -> Self {
        DualState {
            alpha: vec![0.0; n_parcels],
            beta: vec![0.0; n_workers],
        }
    }

    pub fn is_non_negative(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|v| *v >= 0.0)
    }

    /// `p_ij - a_i (T_j + c_j) - b_j`.
    pub fn reduced_utility(&self, instance: &Instance, i: ParcelId, j: WorkerId) -> f64 {
        let w = instance.worker(j);
        instance.utility(i, j)
            - self.alpha[i.0] * (w.time_budget + w.capacity as f64)
            - self.beta[j.0]
    }
}

pub fn primal_dual_run(
    instance: &Instance,
    order: &[WorkerId],
    update: DualUpdate,
) -> Result<OnlineRun> {
    primal_dual_run_observed(instance, order, update, |_, _, _| {})
}

/// Like [`primal_dual_run`], calling `observe` after every arrival's dual update.
pub fn primal_dual_run_observed(
    instance: &Instance,
    order: &[WorkerId],
    update: DualUpdate,
    mut observe: impl FnMut(WorkerId, &OnlineState, &DualState),
) -> Result<OnlineRun> {
    validate_order(instance, order)?;
    let mut state = OnlineState::new(instance);
    let mut duals = DualState::zeros(instance.n_parcels(), instance.n_workers());
    let dual_bytes = (duals.alpha.len() + duals.beta.len()) * std::mem::size_of::<f64>();
    let mut peak = state.heap_bytes() + dual_bytes;
    let mut candidates = Vec::with_capacity(instance.n_parcels());

    for &worker in order {
        if state.unassigned().is_empty() {
            break;
        }
        candidates.clear();
        candidates.extend(
            state
                .unassigned()
                .iter()
                .copied()
                .filter(|&i| duals.reduced_utility(instance, i, worker) > 0.0),
        );
        let bundle = select_bundle_traced(instance, worker, &candidates, BundleMode::ExactKnapsack);
        peak = peak.max(
            state.heap_bytes()
                + dual_bytes
                + candidates.capacity() * std::mem::size_of::<ParcelId>()
                + bundle.scratch_bytes,
        );
        state.commit(instance, worker, &bundle.parcels);
        if !bundle.parcels.is_empty() {
            update_duals(
                instance,
                &state,
                &mut duals,
                worker,
                &bundle.parcels,
                update,
            );
        }
        observe(worker, &state, &duals);
    }
    peak = peak.max(state.heap_bytes() + dual_bytes);
    Ok(OnlineRun {
        allocation: state.into_allocation(),
        duals: Some(duals),
        peak_bytes: peak,
    })
}

fn update_duals(
    instance: &Instance,
    state: &OnlineState,
    duals: &mut DualState,
    worker: WorkerId,
    assigned: &[ParcelId],
    update: DualUpdate,
) {
    let w = instance.worker(worker);
    match update {
        DualUpdate::Additive => {
            for &i in assigned {
                if w.time_budget > 0.0 {
                    duals.alpha[i.0] += instance.delivery_time(i, worker) / w.time_budget;
                }
            }
            let weight = w.time_budget + w.capacity as f64;
            let slack = state
                .unassigned()
                .iter()
                .map(|&i| instance.utility(i, worker) - duals.alpha[i.0] * weight)
                .fold(0.0, f64::max);
            duals.beta[worker.0] += slack;
        }
        DualUpdate::Literal => {
            for &i in assigned {
                duals.alpha[i.0] = 0.0;
            }
            duals.beta[worker.0] = 1.0;
        }
    }
}

/// Worst-case competitive ratio `1 / (2 (1 + floor(log2 mu)))`.
pub fn competitive_bound(mu: f64) -> Result<f64> {
    if !mu.is_finite() || mu < 1.0 {
        return Err(Error::InvalidMu(mu));
    }
    // log2 can round up just below a power of two; correct against exact powers
    let mut s = mu.log2().floor() as i32;
    while 2f64.powi(s + 1) <= mu {
        s += 1;
    }
    while 2f64.powi(s) > mu {
        s -= 1;
    }
    Ok(1.0 / (2.0 * (1.0 + s as f64)))
}
