//! Instance sources: synthetic workloads, the dyadic stress family, and
//! instance files.

mod adversarial;
mod ingest;
pub mod rng;
mod synthetic;

pub use adversarial::{
    adversarial_group, adversarial_group_sizes, gen_adversarial, MAX_ADVERSARIAL_K,
};
pub use ingest::{
    load_instance, load_instance_with_order, read_order_file, save_instance_csv,
    save_instance_json, TIME_CSV, UTILITY_CSV, WORKERS_CSV,
};
pub use synthetic::{gen_bounded, gen_synthetic, BoundedConfig, SyntheticConfig};

use crate::model::WorkerId;

/// Uniformly random arrival order of `n_workers` workers.
pub fn random_order(n_workers: usize, seed: u64) -> Vec<WorkerId> {
    let mut order: Vec<WorkerId> = (0..n_workers).map(WorkerId).collect();
    rng::Sampler::new(seed).shuffle(&mut order);
    order
}
