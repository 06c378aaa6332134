//! Per-arrival bundle selection: which unassigned parcels a worker takes.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, ParcelId, WorkerId, TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BundleMode {
    /// Scan parcels by descending utility, taking each one that still fits.
    PaperGreedy,
    /// Utility-maximal subset under capacity and time budget.
    ExactKnapsack,
}

impl BundleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BundleMode::PaperGreedy => "paper",
            BundleMode::ExactKnapsack => "exact",
        }
    }
}

/// How an exact bundle was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleMethod {
    Greedy,
    /// Budget cannot bind over the candidates: top-`c` by utility.
    TopK,
    Dp,
    Subsets,
    /// Neither the DP nor subset search applied; greedy scan used instead.
    GreedyFallback,
}

/// Largest number of time buckets the knapsack DP will allocate.
pub const MAX_TIME_BUCKETS: u64 = 10_000;
const MAX_SCALE_EXPONENT: i32 = 4;
const MAX_SUBSET_ITEMS: usize = 20;
const MAX_DP_CELLS: usize = 1 << 28;

#[derive(Debug, Clone)]
pub struct Bundle {
    /// Chosen parcels, ascending by id.
    pub parcels: Vec<ParcelId>,
    pub method: BundleMethod,
    /// Peak bytes of scratch space used while selecting.
    pub scratch_bytes: usize,
}

pub fn select_bundle(
    instance: &Instance,
    worker: WorkerId,
    available: &[ParcelId],
    mode: BundleMode,
) -> Vec<ParcelId> {
    select_bundle_traced(instance, worker, available, mode).parcels
}

pub fn select_bundle_traced(
    instance: &Instance,
    worker: WorkerId,
    available: &[ParcelId],
    mode: BundleMode,
) -> Bundle {
    let w = instance.worker(worker);
    let items = Items {
        utility: instance.utility_column(worker),
        time: instance.time_column(worker),
        capacity: w.capacity as usize,
        budget: w.time_budget,
    };
    let mut bundle = match mode {
        BundleMode::PaperGreedy => {
            let (parcels, scratch_bytes) = items.greedy(available);
            Bundle {
                parcels,
                method: BundleMethod::Greedy,
                scratch_bytes,
            }
        }
        BundleMode::ExactKnapsack => items.exact(available),
    };
    bundle.parcels.sort_unstable();
    bundle
}

struct Items<'a> {
    utility: &'a [f64],
    time: &'a [f64],
    capacity: usize,
    budget: f64,
}

impl Items<'_> {
    /// Descending utility, ties to the lower parcel id.
    fn by_utility(&self, a: &ParcelId, b: &ParcelId) -> Ordering {
        self.utility[b.0]
            .total_cmp(&self.utility[a.0])
            .then(a.0.cmp(&b.0))
    }

    fn fits(&self, p: ParcelId) -> bool {
        self.time[p.0] <= self.budget + TOLERANCE
    }

    /// Sorts lazily in doubling chunks; the scan order equals a full sort.
    fn greedy(&self, available: &[ParcelId]) -> (Vec<ParcelId>, usize) {
        let mut cands: Vec<ParcelId> = available
            .iter()
            .copied()
            .filter(|&p| self.fits(p))
            .collect();
        let scratch = cands.capacity() * std::mem::size_of::<ParcelId>();
        let min_time = cands
            .iter()
            .map(|p| self.time[p.0])
            .fold(f64::INFINITY, f64::min);
        let mut chosen = Vec::new();
        let mut used = 0.0;
        let mut chunk = (4 * self.capacity).max(32);
        let mut start = 0;
        while start < cands.len()
            && chosen.len() < self.capacity
            && used + min_time <= self.budget + TOLERANCE
        {
            let rest = &mut cands[start..];
            let end = if rest.len() > chunk {
                rest.select_nth_unstable_by(chunk - 1, |a, b| self.by_utility(a, b));
                rest[..chunk].sort_unstable_by(|a, b| self.by_utility(a, b));
                start + chunk
            } else {
                rest.sort_unstable_by(|a, b| self.by_utility(a, b));
                cands.len()
            };
            for &p in &cands[start..end] {
                let t = self.time[p.0];
                if used + t <= self.budget + TOLERANCE {
                    used += t;
                    chosen.push(p);
                    if chosen.len() == self.capacity {
                        break;
                    }
                }
            }
            start = end;
            chunk *= 2;
        }
        (chosen, scratch)
    }

    fn exact(&self, available: &[ParcelId]) -> Bundle {
        let mut cands: Vec<ParcelId> = available
            .iter()
            .copied()
            .filter(|&p| self.fits(p) && self.utility[p.0] > 0.0)
            .collect();
        let mut scratch = cands.capacity() * std::mem::size_of::<ParcelId>();

        if self.cannot_bind(&mut cands) {
            cands.sort_unstable_by(|a, b| self.by_utility(a, b));
            cands.truncate(self.capacity);
            return Bundle {
                parcels: cands,
                method: BundleMethod::TopK,
                scratch_bytes: scratch,
            };
        }

        let kept = self.undominated(&cands);
        scratch += kept.capacity() * std::mem::size_of::<ParcelId>();

        if let Some((parcels, bytes)) = self.dp(&kept) {
            return Bundle {
                parcels,
                method: BundleMethod::Dp,
                scratch_bytes: scratch + bytes,
            };
        }
        if kept.len() <= MAX_SUBSET_ITEMS {
            return Bundle {
                parcels: self.subsets(&kept),
                method: BundleMethod::Subsets,
                scratch_bytes: scratch,
            };
        }
        let (parcels, bytes) = self.greedy(available);
        Bundle {
            parcels,
            method: BundleMethod::GreedyFallback,
            scratch_bytes: scratch.max(bytes),
        }
    }

    /// True when every subset of at most `capacity` candidates fits the budget.
    fn cannot_bind(&self, cands: &mut [ParcelId]) -> bool {
        let k = self.capacity.min(cands.len());
        if k == 0 {
            return true;
        }
        let by_time = |a: &ParcelId, b: &ParcelId| self.time[b.0].total_cmp(&self.time[a.0]);
        if k < cands.len() {
            cands.select_nth_unstable_by(k - 1, by_time);
        }
        let worst: f64 = cands[..k].iter().map(|p| self.time[p.0]).sum();
        worst <= self.budget + TOLERANCE
    }

    /// Drops every candidate weakly dominated (no more time, no less utility)
    /// by at least `capacity` others; such a parcel can always be swapped out
    /// of an optimal bundle without loss. Result is ascending by id.
    fn undominated(&self, cands: &[ParcelId]) -> Vec<ParcelId> {
        let mut order = cands.to_vec();
        order.sort_unstable_by(|a, b| {
            self.time[a.0]
                .total_cmp(&self.time[b.0])
                .then(self.utility[b.0].total_cmp(&self.utility[a.0]))
                .then(a.0.cmp(&b.0))
        });
        let mut top: BinaryHeap<Reverse<TotalF64>> = BinaryHeap::with_capacity(self.capacity + 1);
        let mut kept = Vec::new();
        for p in order {
            let u = self.utility[p.0];
            let dominated = top.len() >= self.capacity && top.peek().is_some_and(|r| r.0 .0 >= u);
            if !dominated {
                kept.push(p);
            }
            top.push(Reverse(TotalF64(u)));
            if top.len() > self.capacity {
                top.pop();
            }
        }
        kept.sort_unstable();
        kept
    }

    /// Smallest power of ten (up to 10^4) that makes every time integral,
    /// provided the scaled budget stays within [`MAX_TIME_BUCKETS`].
    fn time_scale(&self, items: &[ParcelId]) -> Option<(f64, u64)> {
        let integral = |x: f64| (x - x.round()).abs() <= TOLERANCE * x.abs().max(1.0);
        for exp in 0..=MAX_SCALE_EXPONENT {
            let scale = 10f64.powi(exp);
            let budget = self.budget * scale;
            if budget.floor() > MAX_TIME_BUCKETS as f64 {
                return None;
            }
            if integral(budget) && items.iter().all(|p| integral(self.time[p.0] * scale)) {
                return Some((scale, budget.round() as u64));
            }
        }
        None
    }

    /// 0/1 knapsack with a cardinality limit: `best[k][b]` is the top utility
    /// using at most `k` items and at most `b` time buckets.
    fn dp(&self, items: &[ParcelId]) -> Option<(Vec<ParcelId>, usize)> {
        let (scale, budget) = self.time_scale(items)?;
        let budget = budget as usize;
        let cap = self.capacity.min(items.len());
        let width = budget + 1;
        let layer = (cap + 1) * width;
        let cells = items.len().checked_mul(layer)?;
        if cells > MAX_DP_CELLS {
            return None;
        }
        let weights: Vec<usize> = items
            .iter()
            .map(|p| (self.time[p.0] * scale).round() as usize)
            .collect();
        let mut best = vec![0.0f64; layer];
        let mut take = vec![0u64; cells.div_ceil(64)];
        for (idx, (&p, &w)) in items.iter().zip(&weights).enumerate() {
            if w > budget {
                continue;
            }
            let u = self.utility[p.0];
            for k in (1..=cap).rev() {
                for b in (w..=budget).rev() {
                    let cand = best[(k - 1) * width + b - w] + u;
                    if cand > best[k * width + b] + 1e-12 {
                        best[k * width + b] = cand;
                        let bit = idx * layer + k * width + b;
                        take[bit / 64] |= 1 << (bit % 64);
                    }
                }
            }
        }
        let mut chosen = Vec::new();
        let (mut k, mut b) = (cap, budget);
        for idx in (0..items.len()).rev() {
            if k == 0 {
                break;
            }
            let bit = idx * layer + k * width + b;
            if take[bit / 64] >> (bit % 64) & 1 == 1 {
                chosen.push(items[idx]);
                k -= 1;
                b -= weights[idx];
            }
        }
        let bytes = best.len() * std::mem::size_of::<f64>() + take.len() * 8;
        Some((chosen, bytes))
    }

    /// Depth-first search over subsets of at most `capacity` items, best
    /// utility first, pruned by the utility of the next free slots.
    fn subsets(&self, items: &[ParcelId]) -> Vec<ParcelId> {
        let mut order = items.to_vec();
        order.sort_unstable_by(|a, b| self.by_utility(a, b));
        let mut search = SubsetSearch {
            items: self,
            order: &order,
            current: Vec::with_capacity(self.capacity),
            best: Vec::new(),
            best_utility: 0.0,
        };
        search.descend(0, 0.0, 0.0);
        let mut best = search.best;
        best.sort_unstable();
        best
    }
}

struct SubsetSearch<'a> {
    items: &'a Items<'a>,
    order: &'a [ParcelId],
    current: Vec<ParcelId>,
    best: Vec<ParcelId>,
    best_utility: f64,
}

impl SubsetSearch<'_> {
    fn descend(&mut self, from: usize, utility: f64, time: f64) {
        if utility > self.best_utility + 1e-12 {
            self.best_utility = utility;
            self.best.clone_from(&self.current);
        }
        let slots = self.items.capacity - self.current.len();
        if slots == 0 {
            return;
        }
        for k in from..self.order.len() {
            // `order` is sorted by utility, so the next `slots` items bound the rest
            let bound: f64 = self.order[k..]
                .iter()
                .take(slots)
                .map(|p| self.items.utility[p.0])
                .sum();
            if utility + bound <= self.best_utility + 1e-12 {
                return;
            }
            let p = self.order[k];
            let t = time + self.items.time[p.0];
            if t > self.items.budget + TOLERANCE {
                continue;
            }
            self.current.push(p);
            self.descend(k + 1, utility + self.items.utility[p.0], t);
            self.current.pop();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TotalF64(f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
