//! Seeded random streams and the sample distributions shared by the
//! estimators.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, index)`,
//! so results do not depend on the order in which samples are evaluated.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::norm::NormSpec;
use crate::vector::Vector;

/// The random stream for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A standard Gaussian vector of dimension `dim`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_raw((0..dim).map(|_| rng.sample(StandardNormal)).collect())
}

/// A random direction normalized to unit length in `norm`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, norm: &NormSpec) -> Vector {
    loop {
        let g = gaussian(rng, norm.dim());
        let n = norm.value(&g);
        if n > 1e-8 {
            return g.scale(1.0 / n);
        }
    }
}

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    debug_assert!(0.0 < lo && lo <= hi);
    if lo == hi {
        return lo;
    }
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Points `0, 1, ...` of the Halton sequence in `[0, 1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    (0..dim)
        .map(|d| {
            let base = PRIMES[d % PRIMES.len()] + 2 * (d / PRIMES.len()) as u64 * 59;
            radical_inverse(index + 1, base)
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}
