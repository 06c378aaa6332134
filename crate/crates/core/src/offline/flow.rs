//! Offline optimum through min-cost flow.
//!
//! Network layout: source `s`, sink `t`, one node per parcel and one per
//! worker. Arcs `s -> p_i` (capacity 1, cost 0), `p_i -> w_j` (capacity 1,
//! cost `rho - p_ij`) and `w_j -> t` (capacity `c_j`, cost 0), where
//! `rho = max p_ij + 1` keeps every middle arc strictly positive. A minimum
//! cost maximum flow then maximizes total utility subject to the
//! one-worker-per-parcel and capacity constraints. Time budgets are not
//! representable in this network.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::model::{Allocation, Instance, ParcelId, WorkerId};

pub const SOURCE: usize = 0;
pub const SINK: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: u32,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    n_parcels: usize,
    n_workers: usize,
    rho: f64,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn n_parcels(&self) -> usize {
        self.n_parcels
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn node_count(&self) -> usize {
        2 + self.n_parcels + self.n_workers
    }

    pub fn parcel_node(&self, i: ParcelId) -> usize {
        2 + i.0
    }

    pub fn worker_node(&self, j: WorkerId) -> usize {
        2 + self.n_parcels + j.0
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Arcs in construction order: source arcs, then parcel-worker arcs in
    /// (parcel, worker) order, then sink arcs.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn middle_arc(&self, i: ParcelId, j: WorkerId) -> &Arc {
        &self.arcs[self.n_parcels + i.0 * self.n_workers + j.0]
    }

    /// Residual-graph footprint of a solve, in bytes.
    pub fn solver_bytes(&self) -> usize {
        flow_memory_estimate(self.n_parcels, self.n_workers)
    }
}

/// Network plus residual-graph footprint for an `n x m` instance, in bytes.
pub fn flow_memory_estimate(n_parcels: usize, n_workers: usize) -> usize {
    let v = 2 + n_parcels + n_workers;
    let e = n_parcels + n_parcels * n_workers + n_workers;
    e * std::mem::size_of::<Arc>()
        + 2 * e * (std::mem::size_of::<ResidualArc>() + std::mem::size_of::<usize>())
        + v * (2 * std::mem::size_of::<f64>() + std::mem::size_of::<usize>())
}

pub fn build_flow_network(instance: &Instance) -> FlowNetwork {
    let n = instance.n_parcels();
    let m = instance.n_workers();
    let rho = instance.max_utility() + 1.0;
    let mut arcs = Vec::with_capacity(n + n * m + m);
    for i in 0..n {
        arcs.push(Arc {
            from: SOURCE,
            to: 2 + i,
            capacity: 1,
            cost: 0.0,
        });
    }
    for i in instance.parcels() {
        for j in instance.worker_ids() {
            arcs.push(Arc {
                from: 2 + i.0,
                to: 2 + n + j.0,
                capacity: 1,
                cost: rho - instance.utility(i, j),
            });
        }
    }
    for (j, w) in instance.workers().iter().enumerate() {
        arcs.push(Arc {
            from: 2 + n + j,
            to: SINK,
            capacity: w.capacity,
            cost: 0.0,
        });
    }
    FlowNetwork {
        n_parcels: n,
        n_workers: m,
        rho,
        arcs,
    }
}

#[derive(Debug, Clone, Copy)]
struct ResidualArc {
    to: usize,
    residual: u32,
    cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // min-heap on (dist, node)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Successive shortest augmenting paths with Johnson potentials.
///
/// All arc costs start non-negative, so zero potentials are valid and no
/// Bellman-Ford pass is needed. Every augmenting path carries one unit
/// (source arcs have capacity 1).
struct Solver {
    adj: Vec<Vec<usize>>,
    arcs: Vec<ResidualArc>,
    potential: Vec<f64>,
    dist: Vec<f64>,
    parent: Vec<usize>,
}

impl Solver {
    fn new(network: &FlowNetwork) -> Self {
        let v = network.node_count();
        let mut adj = vec![Vec::new(); v];
        let mut arcs = Vec::with_capacity(2 * network.arcs.len());
        for a in &network.arcs {
            adj[a.from].push(arcs.len());
            arcs.push(ResidualArc {
                to: a.to,
                residual: a.capacity,
                cost: a.cost,
            });
            adj[a.to].push(arcs.len());
            arcs.push(ResidualArc {
                to: a.from,
                residual: 0,
                cost: -a.cost,
            });
        }
        Solver {
            adj,
            arcs,
            potential: vec![0.0; v],
            dist: vec![f64::INFINITY; v],
            parent: vec![usize::MAX; v],
        }
    }

    fn shortest_path(&mut self) -> bool {
        self.dist.fill(f64::INFINITY);
        self.parent.fill(usize::MAX);
        self.dist[SOURCE] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry {
            dist: 0.0,
            node: SOURCE,
        });
        while let Some(HeapEntry { dist, node }) = heap.pop() {
            if dist > self.dist[node] {
                continue;
            }
            for &e in &self.adj[node] {
                let arc = self.arcs[e];
                if arc.residual == 0 {
                    continue;
                }
                // Reduced costs are non-negative up to rounding.
                let reduced = (arc.cost + self.potential[node] - self.potential[arc.to]).max(0.0);
                let next = dist + reduced;
                if next < self.dist[arc.to] {
                    self.dist[arc.to] = next;
                    self.parent[arc.to] = e;
                    heap.push(HeapEntry {
                        dist: next,
                        node: arc.to,
                    });
                }
            }
        }
        if !self.dist[SINK].is_finite() {
            return false;
        }
        for (p, d) in self.potential.iter_mut().zip(&self.dist) {
            if d.is_finite() {
                *p += d;
            }
        }
        true
    }

    fn augment(&mut self) {
        let mut node = SINK;
        while node != SOURCE {
            let e = self.parent[node];
            self.arcs[e].residual -= 1;
            self.arcs[e ^ 1].residual += 1;
            node = self.arcs[e ^ 1].to;
        }
    }

    fn run(mut self) -> Self {
        while self.shortest_path() {
            self.augment();
        }
        self
    }
}

/// Solves the network to a maximum flow of minimum cost and reads the
/// allocation off the saturated parcel-worker arcs.
///
/// The allocation's utility is `sum(rho - cost)` over those arcs.
pub fn solve_min_cost_flow(network: &FlowNetwork) -> Allocation {
    let solver = Solver::new(network).run();
    let n = network.n_parcels;
    let m = network.n_workers;
    let mut pairs = Vec::new();
    let mut utility = 0.0;
    for i in 0..n {
        for j in 0..m {
            let k = n + i * m + j;
            // forward arc of network arc k sits at 2k
            if solver.arcs[2 * k].residual == 0 {
                pairs.push((ParcelId(i), WorkerId(j)));
                utility += network.rho - network.arcs[k].cost;
            }
        }
    }
    Allocation::with_claimed_utility(pairs, utility)
}
