use crate::error::Result;
use crate::model::{Instance, WorkerId};

use super::bundle::{select_bundle_traced, BundleMode};
use super::{validate_order, OnlineRun, OnlineState};

/// Greedy baseline: each arriving worker takes its best bundle of the
/// parcels still unassigned; stops once every parcel is gone.
pub fn greedy_run(instance: &Instance, order: &[WorkerId], mode: BundleMode) -> Result<OnlineRun> {
    greedy_run_observed(instance, order, mode, |_, _| {})
}

/// Like [`greedy_run`], calling `observe` after every processed arrival.
pub fn greedy_run_observed(
    instance: &Instance,
    order: &[WorkerId],
    mode: BundleMode,
    mut observe: impl FnMut(WorkerId, &OnlineState),
) -> Result<OnlineRun> {
    validate_order(instance, order)?;
    let mut state = OnlineState::new(instance);
    let mut peak = state.heap_bytes();
    for &worker in order {
        if state.unassigned().is_empty() {
            break;
        }
        let bundle = select_bundle_traced(instance, worker, state.unassigned(), mode);
        peak = peak.max(state.heap_bytes() + bundle.scratch_bytes);
        state.commit(instance, worker, &bundle.parcels);
        observe(worker, &state);
    }
    peak = peak.max(state.heap_bytes());
    Ok(OnlineRun {
        allocation: state.into_allocation(),
        duals: None,
        peak_bytes: peak,
    })
}
