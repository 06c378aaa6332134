//! Seeded sampling with every transform pinned down, so instances can be
//! regenerated bit-for-bit from a seed in other languages.
//!
//! * Generator: xoshiro256++, state filled from the 64-bit seed by
//!   SplitMix64 (the reference seeding procedure).
//! * `unit()`: `(next_u64 >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `uniform(lo, hi)`: `lo + (hi - lo) * unit()`.
//! * `int_inclusive(lo, hi)`: `lo + min(floor(unit() * (hi - lo + 1)), hi - lo)`.
//! * `normal(mean, sd)`: Box-Muller, cosine branch only:
//!   `u1 = 1 - unit()`, `u2 = unit()`,
//!   `mean + sd * sqrt(-2 ln u1) * cos(2 pi u2)`.
//! * `shuffle`: Fisher-Yates from the back, `j = int_inclusive(0, i)`.
//! * Sub-streams: `derive_seed(seed, k) = splitmix64(seed + k * 0x9E3779B97F4A7C15)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for sub-stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed.wrapping_add(stream.wrapping_mul(GOLDEN_GAMMA)))
}

pub struct Sampler {
    rng: Xoshiro256PlusPlus,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn int_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        let span = hi - lo;
        let k = (self.unit() * (span as f64 + 1.0)) as u64;
        lo + k.min(span)
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        mean + sd * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.int_inclusive(0, i as u64) as usize;
            items.swap(i, j);
        }
    }
}
