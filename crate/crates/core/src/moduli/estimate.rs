//! Sampled estimates of the geometric-convexity, doubling and balanced
//! constants, in full space or restricted to the tangent plane.
//!
//! | constant | inequality                          | estimate   |
//! |----------|-------------------------------------|------------|
//! | Lambda   | `L h(x,x+y) <= h(x,x+2y)`           | inf ratio  |
//! | T        | `h(x,x+2y) <= T h(x,x+y)`           | sup ratio  |
//! | K        | `h(x,x+y) <= K h(x,x-y)`            | sup ratio  |
//!
//! Samples take `|x| = 1` and `|y|` log-uniform in `[1e-4 r, r]`. Ratios
//! whose denominator falls below `1e-12 (1 + |x|)` are skipped, which
//! removes the `0/0` cases along the ray through `x`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModuliError;
use crate::norm::{decompose_unchecked, NormSpec};
use crate::sampling::{gaussian, log_uniform, sample_rng, unit_vector};
use crate::vector::Vector;

/// Smallest sampled `|y|`, as a fraction of the radius.
pub const MIN_RADIUS_FRACTION: f64 = 1e-4;

/// Ratios whose denominator `h` is at most this (times `1 + |x|`) are
/// not informative.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Any `y` with `|y| <= r |x|`.
    Full,
    /// Only `y` with `<y, N(x)> = 0`.
    Tangent,
}

impl std::str::FromStr for SampleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(SampleMode::Full),
            "tangent" => Ok(SampleMode::Tangent),
            other => Err(format!("unknown sample mode {other:?}")),
        }
    }
}

/// The sample attaining an extremal ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vector,
    pub y: Vector,
    pub ratio: f64,
    pub sample: u64,
}

/// An extremal ratio over the informative samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub value: f64,
    pub witness: Witness,
    pub samples: usize,
    pub informative: usize,
    pub radius: f64,
    pub mode: SampleMode,
}

#[derive(Clone, Copy)]
enum Extremum {
    Inf,
    Sup,
}

/// Draws sample `index`: a unit `x` and a `y` with `|y| <= radius`.
///
/// In full mode half of the directions are isotropic and half mix
/// `+-x` with a tangent vector at a log-uniform slope, so that nearly
/// radial and nearly tangent `y` are both well represented.
pub fn draw_pair(
    norm: &NormSpec,
    radius: f64,
    mode: SampleMode,
    seed: u64,
    index: u64,
) -> Option<(Vector, Vector)> {
    let mut rng = sample_rng(seed, index);
    let x = unit_vector(&mut rng, norm);
    let n = norm.normal(&x)?;
    let g = gaussian(&mut rng, norm.dim());
    let tangent = decompose_unchecked(norm, &x, &n, &g).x_perp;
    let dir = match mode {
        SampleMode::Tangent => tangent?,
        SampleMode::Full => {
            if rng.gen_bool(0.5) {
                g
            } else {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let slope = log_uniform(&mut rng, 1e-3, 1e3);
                match tangent {
                    Some(w) => x.scale(sign).axpy(slope, &w),
                    None => x.scale(sign),
                }
            }
        }
    };
    let nd = norm.value(&dir);
    if nd < 1e-12 {
        return None;
    }
    let s = log_uniform(&mut rng, MIN_RADIUS_FRACTION * radius, radius);
    Some((x, dir.scale(s / nd)))
}

fn estimate<F>(
    norm: &NormSpec,
    radius: f64,
    mode: SampleMode,
    samples: usize,
    seed: u64,
    extremum: Extremum,
    ratio: F,
) -> Result<RatioEstimate, ModuliError>
where
    F: Fn(&Vector, &[f64], &Vector) -> Option<f64>,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ModuliError::InvalidRadius(radius));
    }
    if samples == 0 {
        return Err(ModuliError::NoSamples);
    }
    let mut best: Option<Witness> = None;
    let mut informative = 0;
    for i in 0..samples as u64 {
        let Some((x, y)) = draw_pair(norm, radius, mode, seed, i) else {
            continue;
        };
        let n = norm.normal(&x).expect("unit vector");
        let Some(r) = ratio(&x, &n, &y) else {
            continue;
        };
        informative += 1;
        let better = match (&best, extremum) {
            (None, _) => true,
            (Some(b), Extremum::Inf) => r < b.ratio,
            (Some(b), Extremum::Sup) => r > b.ratio,
        };
        if better {
            best = Some(Witness {
                x,
                y,
                ratio: r,
                sample: i,
            });
        }
    }
    let witness = best.ok_or(ModuliError::NoInformativeSamples)?;
    Ok(RatioEstimate {
        value: witness.ratio,
        witness,
        samples,
        informative,
        radius,
        mode,
    })
}

fn shifted(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| xi + a * yi).collect()
}

/// `h(x, x+2y) / h(x, x+y)`, or `None` below the floor.
pub fn doubling_ratio(norm: &NormSpec, x: &[f64], n: &[f64], y: &[f64]) -> Option<f64> {
    let floor = DENOMINATOR_FLOOR * (1.0 + norm.value(x));
    let one = norm.gap_with_normal(n, &shifted(x, 1.0, y));
    if one <= floor {
        return None;
    }
    Some(norm.gap_with_normal(n, &shifted(x, 2.0, y)) / one)
}

/// `h(x, x+y) / h(x, x-y)`, or `None` below the floor.
pub fn balance_ratio(norm: &NormSpec, x: &[f64], n: &[f64], y: &[f64]) -> Option<f64> {
    let floor = DENOMINATOR_FLOOR * (1.0 + norm.value(x));
    let minus = norm.gap_with_normal(n, &shifted(x, -1.0, y));
    if minus <= floor {
        return None;
    }
    Some(norm.gap_with_normal(n, &shifted(x, 1.0, y)) / minus)
}

/// Infimum of `h(x,x+2y) / h(x,x+y)` over `|y| <= r |x|`.
pub fn estimate_lambda(
    norm: &NormSpec,
    r: f64,
    mode: SampleMode,
    samples: usize,
    seed: u64,
) -> Result<RatioEstimate, ModuliError> {
    estimate(norm, r, mode, samples, seed, Extremum::Inf, |x, n, y| {
        doubling_ratio(norm, x, n, y)
    })
}

/// Supremum of `h(x,x+2y) / h(x,x+y)` over `|y| <= r |x|`.
pub fn estimate_doubling(
    norm: &NormSpec,
    r: f64,
    mode: SampleMode,
    samples: usize,
    seed: u64,
) -> Result<RatioEstimate, ModuliError> {
    estimate(norm, r, mode, samples, seed, Extremum::Sup, |x, n, y| {
        doubling_ratio(norm, x, n, y)
    })
}

/// Supremum of `h(x,x+y) / h(x,x-y)` over `|y| <= bound |x|`.
pub fn estimate_balanced(
    norm: &NormSpec,
    bound: f64,
    mode: SampleMode,
    samples: usize,
    seed: u64,
) -> Result<RatioEstimate, ModuliError> {
    estimate(
        norm,
        bound,
        mode,
        samples,
        seed,
        Extremum::Sup,
        |x, n, y| balance_ratio(norm, x, n, y),
    )
}

/// One doubling of the admissible radius: constants `(r, L)` become
/// `(2r, 3 - 2/L)`.
pub fn extend_constants(r: f64, lambda: f64) -> Result<(f64, f64), ModuliError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(ModuliError::InvalidRadius(r));
    }
    if !(lambda > 2.0) {
        return Err(ModuliError::LambdaTooSmall(lambda));
    }
    Ok((2.0 * r, 3.0 - 2.0 / lambda))
}

/// Constants after repeated doublings until the radius reaches `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedConstants {
    pub r: f64,
    pub lambda: f64,
    pub doublings: u32,
}

pub fn extend_to_radius(
    r: f64,
    lambda: f64,
    target: f64,
) -> Result<ExtendedConstants, ModuliError> {
    let (mut r, mut lambda) = (r, lambda);
    extend_constants(r, lambda)?;
    let mut doublings = 0;
    while r < target {
        (r, lambda) = extend_constants(r, lambda)?;
        doublings += 1;
    }
    Ok(ExtendedConstants {
        r,
        lambda,
        doublings,
    })
}

/// `max(0, h(x,z) - L/(L-2) h(z,x))` for `|z - x| <= 2r|x|`.
pub fn duality_residual(
    norm: &NormSpec,
    x: &Vector,
    z: &Vector,
    lambda: f64,
    r: f64,
) -> Result<f64, ModuliError> {
    norm.check(x)?;
    norm.check(z)?;
    if !(lambda > 2.0) {
        return Err(ModuliError::LambdaTooSmall(lambda));
    }
    if !(r > 0.0) {
        return Err(ModuliError::InvalidRadius(r));
    }
    let distance = norm.value(&(z - x));
    let limit = 2.0 * r * norm.value(x);
    if distance > limit * (1.0 + 1e-12) {
        return Err(ModuliError::RadiusViolated { distance, limit });
    }
    let lhs = norm.gap(x, z);
    let rhs = lambda / (lambda - 2.0) * norm.gap(z, x);
    Ok((lhs - rhs).max(0.0))
}
