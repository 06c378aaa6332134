#![allow(dead_code)]

use parcel_alloc::{Instance, ParcelId, Worker, WorkerId};
use proptest::prelude::*;

/// Small instances on a coarse grid: utilities in tenths, times in halves.
pub fn grid_instance(max_parcels: usize, max_workers: usize) -> impl Strategy<Value = Instance> {
    (0..=max_parcels, 1..=max_workers).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec((1u32..=4, 0u32..=8), m),
            prop::collection::vec(0u32..=10, n * m),
            prop::collection::vec(1u32..=6, n * m),
        )
            .prop_map(move |(ws, u, t)| {
                let workers = ws
                    .into_iter()
                    .map(|(c, b)| Worker::new(c, f64::from(b) / 2.0))
                    .collect();
                Instance::from_worker_major(
                    n,
                    workers,
                    u.into_iter().map(|x| f64::from(x) / 10.0).collect(),
                    t.into_iter().map(|x| f64::from(x) / 2.0).collect(),
                )
                .unwrap()
            })
    })
}

/// Small instances with arbitrary real entries.
pub fn real_instance(max_parcels: usize, max_workers: usize) -> impl Strategy<Value = Instance> {
    (0..=max_parcels, 1..=max_workers).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec((1u32..=5, 0.0f64..6.0), m),
            prop::collection::vec(0.0f64..20.0, n * m),
            prop::collection::vec(0.05f64..3.0, n * m),
        )
            .prop_map(move |(ws, u, t)| {
                let workers = ws.into_iter().map(|(c, b)| Worker::new(c, b)).collect();
                Instance::from_worker_major(n, workers, u, t).unwrap()
            })
    })
}

/// Same as [`grid_instance`] but every budget covers the worker's slowest
/// `capacity` parcels, so budgets never bind.
pub fn unbound_instance(max_parcels: usize, max_workers: usize) -> impl Strategy<Value = Instance> {
    grid_instance(max_parcels, max_workers).prop_map(|inst| {
        let n = inst.n_parcels();
        let workers = inst
            .worker_ids()
            .map(|j| {
                let w = inst.worker(j);
                let mut times = inst.time_column(j).to_vec();
                times.sort_by(|a, b| b.total_cmp(a));
                let need: f64 = times.iter().take(w.capacity as usize).sum();
                Worker::new(w.capacity, need)
            })
            .collect();
        let flat = |rows: Vec<Vec<f64>>| -> Vec<f64> {
            let m = rows.first().map_or(0, Vec::len);
            (0..m)
                .flat_map(|j| rows.iter().map(move |r| r[j]))
                .collect()
        };
        Instance::from_worker_major(
            n,
            workers,
            flat(inst.utility_rows()),
            flat(inst.time_rows()),
        )
        .unwrap()
    })
}

/// Instance plus a permutation of its workers.
pub fn with_order(
    inst: impl Strategy<Value = Instance>,
) -> impl Strategy<Value = (Instance, Vec<WorkerId>)> {
    inst.prop_flat_map(|inst| {
        let ids: Vec<WorkerId> = inst.worker_ids().collect();
        (Just(inst), Just(ids).prop_shuffle())
    })
}

/// Reference optimum by full enumeration of parcel-to-worker maps.
pub fn brute_force_opt(inst: &Instance) -> f64 {
    let n = inst.n_parcels();
    let m = inst.n_workers();
    let mut choice = vec![0; n];
    let mut best = 0.0f64;
    loop {
        let mut load = vec![0u32; m];
        let mut used = vec![0.0f64; m];
        let mut total = 0.0;
        let mut ok = true;
        for (i, &j) in choice.iter().enumerate() {
            if j == m {
                continue;
            }
            load[j] += 1;
            used[j] += inst.delivery_time(ParcelId(i), WorkerId(j));
            total += inst.utility(ParcelId(i), WorkerId(j));
        }
        for j in 0..m {
            let w = inst.worker(WorkerId(j));
            if load[j] > w.capacity || used[j] > w.time_budget + 1e-9 {
                ok = false;
            }
        }
        if ok {
            best = best.max(total);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            choice[k] += 1;
            if choice[k] <= m {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Reference best bundle utility by subset enumeration.
pub fn brute_force_bundle(inst: &Instance, worker: WorkerId, available: &[ParcelId]) -> f64 {
    let w = inst.worker(worker);
    let k = available.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() > w.capacity {
            continue;
        }
        let (mut u, mut t) = (0.0, 0.0);
        for (b, &i) in available.iter().enumerate() {
            if mask >> b & 1 == 1 {
                u += inst.utility(i, worker);
                t += inst.delivery_time(i, worker);
            }
        }
        if t <= w.time_budget + 1e-9 {
            best = best.max(u);
        }
    }
    best
}

pub fn bundle_totals(inst: &Instance, worker: WorkerId, bundle: &[ParcelId]) -> (f64, f64) {
    bundle.iter().fold((0.0, 0.0), |(u, t), &i| {
        (
            u + inst.utility(i, worker),
            t + inst.delivery_time(i, worker),
        )
    })
}
