use crate::error::{Error, Result};
use crate::model::{Instance, Worker};

pub const MAX_ADVERSARIAL_K: u32 = 16;

/// Group of each parcel: group `g` holds parcels `2^g - 1 ..= 2^(g+1) - 2`.
pub fn adversarial_group(parcel: usize) -> u32 {
    (parcel + 1).ilog2()
}

pub fn adversarial_group_sizes(k: u32) -> Vec<usize> {
    (0..k).map(|g| 1usize << g).collect()
}

/// Dyadic stress family: `2^k - 1` parcels in `k` groups, group `g` holding
/// `2^g` parcels of delivery time `base_time * 2^g`.
///
/// There are `k` identical workers with budget `base_time * 2^(k-1)` and
/// capacity `2^(k-1)`, so `mu = 2^(k-1)`. Utility is `1 + g / k`: longer
/// parcels pay slightly more but exhaust a budget faster, which lures a
/// utility-first scan into filling budgets with few parcels.
pub fn gen_adversarial(k: u32, base_time: f64) -> Result<Instance> {
    if k == 0 || k > MAX_ADVERSARIAL_K {
        return Err(Error::SizeGuard(format!(
            "adversarial k must be in 1..={MAX_ADVERSARIAL_K}, got {k}"
        )));
    }
    if !(base_time > 0.0 && base_time.is_finite()) {
        return Err(Error::Config(format!(
            "base_time must be positive, got {base_time}"
        )));
    }
    let n = (1usize << k) - 1;
    let m = k as usize;
    let budget = base_time * (1u64 << (k - 1)) as f64;
    let workers = vec![Worker::new(1 << (k - 1), budget); m];
    let mut utility = Vec::with_capacity(n * m);
    let mut time = Vec::with_capacity(n * m);
    for _ in 0..m {
        for i in 0..n {
            let g = adversarial_group(i);
            utility.push(1.0 + g as f64 / k as f64);
            time.push(base_time * (1u64 << g) as f64);
        }
    }
    Instance::from_worker_major(n, workers, utility, time)
}
