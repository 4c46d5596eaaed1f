//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use pcentral::{Builder, QuotientGroup, Result, Shape, TruncSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// N^Z_k(p, n) built without a cache.
pub fn nz(p: u32, n: usize, k: usize) -> Result<Arc<QuotientGroup>> {
    Builder::new().nz(p, n, k)
}

/// Pairs of random element indices, fixed by `seed`.
pub fn random_pairs(g: &QuotientGroup, count: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = g.order() as u32;
    (0..count).map(|_| (rng.gen_range(0..order), rng.gen_range(0..order))).collect()
}

/// 1 + x_1 + x_2 x_1 in the degree-`m` truncation over F_p.
pub fn sample_series(p: u32, n: usize, m: usize) -> Result<TruncSeries> {
    let shape = Shape::new(p, n, m)?;
    TruncSeries::from_terms(shape, &[(&[], 1), (&[1], 1), (&[2, 1], 1)])
}
