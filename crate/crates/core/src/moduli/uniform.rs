//! Sampled uniform convexity and smoothness constants.
//!
//! ```text
//! A |e - f|^p <= 2 - |e + f|                      (|e| = |f| = 1)
//! |x + y| + |x - y| - 2|x| <= B |y|^q / |x|^(q-1)
//! ```
//!
//! `A` is estimated as an infimum and `B` as a supremum. Both are
//! approached as the pair degenerates, so half of the samples are drawn
//! at log-uniform small separations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModuliError;
use crate::moduli::estimate::Witness;
use crate::norm::NormSpec;
use crate::sampling::{gaussian, log_uniform, sample_rng, unit_vector};

/// Smallest separation sampled for `A` and `B`. Below this the numerators
/// lose too many digits to cancellation.
pub const MIN_SEPARATION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConstants {
    /// Convexity exponent.
    pub p: f64,
    /// Smoothness exponent.
    pub q: f64,
    pub a_hat: f64,
    pub a_witness: Witness,
    pub b_hat: f64,
    pub b_witness: Witness,
    pub samples: usize,
}

fn separation<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        log_uniform(rng, MIN_SEPARATION, 2.0)
    } else {
        rng.gen_range(MIN_SEPARATION..=2.0)
    }
}

/// `(2 - |e + f|) / |e - f|^p`, or `None` when `e` and `f` nearly agree.
pub fn convexity_ratio(norm: &NormSpec, e: &[f64], f: &[f64], p: f64) -> Option<f64> {
    let sum: Vec<f64> = e.iter().zip(f).map(|(a, b)| a + b).collect();
    let diff: Vec<f64> = e.iter().zip(f).map(|(a, b)| a - b).collect();
    let d = norm.value(&diff);
    if d < 0.5 * MIN_SEPARATION {
        return None;
    }
    Some((2.0 - norm.value(&sum)) / d.powf(p))
}

/// `(|x + y| + |x - y| - 2) / |y|^q` for unit `x`.
pub fn smoothness_ratio(norm: &NormSpec, x: &[f64], y: &[f64], q: f64) -> Option<f64> {
    let ny = norm.value(y);
    if ny < 0.5 * MIN_SEPARATION {
        return None;
    }
    let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    Some((norm.value(&plus) + norm.value(&minus) - 2.0) / ny.powf(q))
}

/// Estimates `A` (for exponent `p`) and `B` (for exponent `q`).
pub fn estimate_uniform_constants(
    norm: &NormSpec,
    p: f64,
    q: f64,
    samples: usize,
    seed: u64,
) -> Result<UniformConstants, ModuliError> {
    if !(q > 1.0 && q <= p && p.is_finite()) {
        return Err(ModuliError::InvalidExponents { p, q });
    }
    if samples == 0 {
        return Err(ModuliError::NoSamples);
    }
    let mut a: Option<Witness> = None;
    let mut b: Option<Witness> = None;
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, i);
        let e = unit_vector(&mut rng, norm);
        let g = gaussian(&mut rng, norm.dim());
        let s = separation(&mut rng);

        // A: a second unit vector at distance roughly s from e
        let ng = norm.value(&g).max(1e-300);
        let raw = e.axpy(s / ng, &g);
        let nr = norm.value(&raw);
        if nr > 1e-12 {
            let f = raw.scale(1.0 / nr);
            if let Some(r) = convexity_ratio(norm, &e, &f, p) {
                if a.as_ref().map_or(true, |w| r < w.ratio) {
                    a = Some(Witness {
                        x: e.clone(),
                        y: f,
                        ratio: r,
                        sample: i,
                    });
                }
            }
        }

        // B: a displacement of length s in the direction of g
        let y = g.scale(s / ng);
        if let Some(r) = smoothness_ratio(norm, &e, &y, q) {
            if b.as_ref().map_or(true, |w| r > w.ratio) {
                b = Some(Witness {
                    x: e,
                    y,
                    ratio: r,
                    sample: i,
                });
            }
        }
    }
    let a = a.ok_or(ModuliError::NoInformativeSamples)?;
    let b = b.ok_or(ModuliError::NoInformativeSamples)?;
    Ok(UniformConstants {
        p,
        q,
        a_hat: a.ratio,
        a_witness: a,
        b_hat: b.ratio,
        b_witness: b,
        samples,
    })
}
