//! From tangent-plane constants to full constants.
//!
//! Write `y = a x + e w` with `|x| = 1`, `<w, N(x)> = 0`, `|w| = 1`, and
//! let `L = (T^2 - 1)/2`. Then
//!
//! ```text
//! h(x,x+2y) / h(x,x+y) >= Lam (1+2a)/(1+a) (1-4L|a|)/(1+2L|a|)   2|y| <= min(k, (1-2k) r)
//! h(x,x+2y) / h(x,x+y) <= T   (1+2a)/(1+a) (1+4L|a|)/(1-2L|a|)   |a| <= min(1/4, 1/(2L))
//! h(x,x+y)  / h(x,x-y) <= K   (1+a)/(1-a)  (1+2L|a|)/(1-2L|a|)   |a| <= min(1/4, 1/(2L))
//! ```
//!
//! The derivation uses the tangent inequalities only at a few specific
//! points determined by the sample (for instance doubling at
//! `e w / (1+2a)` and `g(4) <= T^2`, where `g(s)` is the tangent gap at
//! `s e w` normalized by the one at `e w`). Estimated constants are
//! sample extrema, so those hypotheses can fail at fresh points; such
//! samples are counted as hypothesis misses, not as violations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModuliError;
use crate::norm::{decompose_unchecked, NormSpec};
use crate::sampling::{gaussian, log_uniform, sample_rng, unit_vector};
use crate::vector::Vector;

/// Relative slack on every bound, on top of a rounding allowance.
pub const TRANSFER_TOLERANCE: f64 = 1e-9;

/// Tangent-plane constants: convexity `(lambda, r)`, doubling `t` and
/// balance `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentConstants {
    pub lambda: f64,
    pub r: f64,
    pub t: f64,
    pub k: f64,
}

/// `L = (T^2 - 1)/2`, a Lipschitz constant for the normalized tangent gap
/// on `[0, 2]`.
pub fn lipschitz_constant(t: f64) -> f64 {
    (t * t - 1.0) / 2.0
}

/// The admissible `|a|` for the doubling and balanced bounds.
pub fn alpha_window(t: f64) -> f64 {
    let l = lipschitz_constant(t);
    if l <= 0.0 {
        0.25
    } else {
        0.25f64.min(1.0 / (2.0 * l))
    }
}

/// Predicted full-space bounds at `a = <y, N(x)>` (unit `x`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferBounds {
    /// Lower bound for `h(x,x+2y)/h(x,x+y)`.
    pub convexity: f64,
    /// Upper bound for `h(x,x+2y)/h(x,x+y)`.
    pub doubling: f64,
    /// Upper bound for `h(x,x+y)/h(x,x-y)`.
    pub balanced: f64,
}

pub fn transfer_bounds(c: &TangentConstants, alpha: f64) -> TransferBounds {
    let l = lipschitz_constant(c.t);
    let a = alpha.abs();
    let lin = (1.0 + 2.0 * alpha) / (1.0 + alpha);
    TransferBounds {
        convexity: c.lambda * lin * (1.0 - 4.0 * l * a) / (1.0 + 2.0 * l * a),
        doubling: c.t * lin * (1.0 + 4.0 * l * a) / (1.0 - 2.0 * l * a),
        balanced: c.k * (1.0 + alpha) / (1.0 - alpha) * (1.0 + 2.0 * l * a) / (1.0 - 2.0 * l * a),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferOptions {
    /// The `k` of the convexity window. Defaults to `min(1/4, 1/(40 L))`,
    /// which keeps the uniform convexity bound near `lambda`.
    pub kappa: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            kappa: None,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// A sample at which a bound was tested, with the observed ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferWitness {
    pub x: Vector,
    pub y: Vector,
    pub alpha: f64,
    pub ratio: f64,
    pub bound: f64,
    pub sample: u64,
}

/// Outcome for one of the three bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Samples with informative denominators whose hypotheses held.
    pub tested: usize,
    /// Samples where a tangent hypothesis used by the derivation failed
    /// for the given constants.
    pub hypothesis_misses: usize,
    pub violations: usize,
    /// Largest `ratio / bound` (upper bounds) or `bound / ratio` (lower
    /// bound) over tested samples; at most 1 when nothing is violated.
    pub worst_margin: f64,
    pub witness: Option<TransferWitness>,
}

impl BoundCheck {
    fn new() -> Self {
        Self {
            tested: 0,
            hypothesis_misses: 0,
            violations: 0,
            worst_margin: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, w: TransferWitness, margin: f64, violated: bool) {
        self.tested += 1;
        if violated {
            self.violations += 1;
        }
        if margin > self.worst_margin {
            self.worst_margin = margin;
            self.witness = Some(w);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub constants: TangentConstants,
    pub lipschitz: f64,
    pub kappa: f64,
    /// Largest `|y|` sampled for the convexity bound.
    pub convexity_radius: f64,
    /// Largest `|a|` sampled for the doubling and balanced bounds.
    pub alpha_window: f64,
    /// The convexity bound at `|a| = kappa`, valid uniformly on the window.
    pub convexity_floor: f64,
    pub convexity: BoundCheck,
    pub doubling: BoundCheck,
    pub balanced: BoundCheck,
}

impl TransferReport {
    pub fn violations(&self) -> usize {
        self.convexity.violations + self.doubling.violations + self.balanced.violations
    }
}

/// Tangent gap `|x + v| - 1` for unit `x` and tangent `v`, written through
/// the gap function so the Euclidean case stays cancellation free.
fn tgap(norm: &NormSpec, x: &[f64], n: &[f64], v: &[f64]) -> f64 {
    let w: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + b).collect();
    norm.gap_with_normal(n, &w)
}

fn shifted(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| xi + a * yi).collect()
}

/// Absolute slack for a ratio with the given denominator: the relative
/// tolerance plus a rounding allowance of a few ulps on each gap value.
fn slack(bound: f64, den: f64) -> f64 {
    TRANSFER_TOLERANCE * (1.0 + bound.abs()) + 16.0 * f64::EPSILON / den * (1.0 + bound.abs())
}

struct Sample {
    x: Vector,
    n: Vector,
    y: Vector,
    alpha: f64,
    eps: f64,
    w: Vector,
}

fn draw<R: Rng>(rng: &mut R, norm: &NormSpec, alpha_max: f64, eps_max: f64) -> Option<Sample> {
    let x = unit_vector(rng, norm);
    let n = norm.normal(&x)?;
    let g = gaussian(rng, norm.dim());
    let w = decompose_unchecked(norm, &x, &n, &g).x_perp?;
    let mag = if rng.gen_bool(0.5) {
        log_uniform(rng, 1e-6 * alpha_max, alpha_max)
    } else {
        rng.gen_range(0.0..=alpha_max)
    };
    let alpha = if rng.gen_bool(0.5) { mag } else { -mag };
    let eps = log_uniform(rng, 1e-3 * eps_max, eps_max);
    let y = x.scale(alpha).axpy(eps, &w);
    Some(Sample {
        x,
        n,
        y,
        alpha,
        eps,
        w,
    })
}

/// `g(4) <= T^2` in direction `sign * w`, the input to the Lipschitz bound.
fn lipschitz_hypothesis(norm: &NormSpec, s: &Sample, sign: f64, t: f64) -> bool {
    let one = tgap(norm, &s.x, &s.n, &s.w.scale(sign * s.eps));
    let four = tgap(norm, &s.x, &s.n, &s.w.scale(4.0 * sign * s.eps));
    one > 0.0 && four <= t * t * one + slack(t * t, one) * one
}

/// Samples the three bounds at admissible pairs.
pub fn transfer_check(
    norm: &NormSpec,
    constants: &TangentConstants,
    opts: &TransferOptions,
) -> Result<TransferReport, ModuliError> {
    let c = *constants;
    if !(c.lambda > 2.0) {
        return Err(ModuliError::LambdaTooSmall(c.lambda));
    }
    if !(c.r > 0.0 && c.r.is_finite()) {
        return Err(ModuliError::InvalidRadius(c.r));
    }
    if !(c.t >= 1.0 && c.t.is_finite() && c.k > 0.0 && c.k.is_finite()) {
        return Err(ModuliError::EmptyWindow(format!(
            "doubling constant T = {} must be at least 1 and K = {} positive",
            c.t, c.k
        )));
    }
    if opts.samples == 0 {
        return Err(ModuliError::NoSamples);
    }
    let l = lipschitz_constant(c.t);
    let kappa = opts.kappa.unwrap_or_else(|| {
        if l > 0.0 {
            0.25f64.min(1.0 / (40.0 * l))
        } else {
            0.25
        }
    });
    if !(kappa > 0.0 && kappa <= 0.25) {
        return Err(ModuliError::EmptyWindow(format!(
            "kappa = {kappa} must lie in (0, 1/4]"
        )));
    }
    let convexity_radius = kappa.min((1.0 - 2.0 * kappa) * c.r) / 2.0;
    let window = alpha_window(c.t);
    let floor = transfer_bounds(&c, kappa).convexity;

    let mut conv = BoundCheck::new();
    let mut doub = BoundCheck::new();
    let mut bal = BoundCheck::new();

    for i in 0..opts.samples as u64 {
        let mut rng = sample_rng(opts.seed, i);

        // Convexity: |y| <= convexity_radius, so |a| <= kappa and e <= (1-2k) r.
        if let Some(mut s) = draw(&mut rng, norm, 1.0, 1.0) {
            let ny = norm.value(&s.y);
            let target = log_uniform(&mut rng, 1e-3 * convexity_radius, convexity_radius);
            let scale = target / ny;
            s.y = s.y.scale(scale);
            s.alpha *= scale;
            s.eps *= scale;
            conv_sample(norm, &c, &s, i, &mut conv);
        }

        // Doubling and balance: |a| <= window, any tangent size.
        if let Some(s) = draw(&mut rng, norm, window, c.r.min(1.0)) {
            doub_bal_sample(norm, &c, &s, i, &mut doub, &mut bal);
        }
    }

    Ok(TransferReport {
        constants: c,
        lipschitz: l,
        kappa,
        convexity_radius,
        alpha_window: window,
        convexity_floor: floor,
        convexity: conv,
        doubling: doub,
        balanced: bal,
    })
}

fn conv_sample(norm: &NormSpec, c: &TangentConstants, s: &Sample, i: u64, out: &mut BoundCheck) {
    if s.eps <= 0.0 {
        return;
    }
    let floor = 1e-12 * 2.0;
    let one = norm.gap_with_normal(&s.n, &shifted(&s.x, 1.0, &s.y));
    if one <= floor {
        return;
    }
    // Hypotheses: tangent convexity at v = e w / (1+2a), with |v| <= r,
    // and g(4) <= T^2.
    let v = s.w.scale(s.eps / (1.0 + 2.0 * s.alpha));
    let hv = tgap(norm, &s.x, &s.n, &v);
    let h2v = tgap(norm, &s.x, &s.n, &v.scale(2.0));
    let convex_here = norm.value(&v) <= c.r && h2v + slack(c.lambda, hv) * hv >= c.lambda * hv;
    if !(convex_here && lipschitz_hypothesis(norm, s, 1.0, c.t)) {
        out.hypothesis_misses += 1;
        return;
    }
    let two = norm.gap_with_normal(&s.n, &shifted(&s.x, 2.0, &s.y));
    let ratio = two / one;
    let bound = transfer_bounds(c, s.alpha).convexity;
    let violated = ratio < bound - slack(bound, one);
    out.record(witness(s, ratio, bound, i), bound / ratio, violated);
}

fn doub_bal_sample(
    norm: &NormSpec,
    c: &TangentConstants,
    s: &Sample,
    i: u64,
    doub: &mut BoundCheck,
    bal: &mut BoundCheck,
) {
    if s.eps <= 0.0 {
        return;
    }
    let floor = 1e-12 * 2.0;
    let bounds = transfer_bounds(c, s.alpha);
    let lip_plus = lipschitz_hypothesis(norm, s, 1.0, c.t);

    let one = norm.gap_with_normal(&s.n, &shifted(&s.x, 1.0, &s.y));
    if one > floor {
        // Hypotheses: tangent doubling at v = e w / (1+2a), and g(4) <= T^2.
        let v = s.w.scale(s.eps / (1.0 + 2.0 * s.alpha));
        let hv = tgap(norm, &s.x, &s.n, &v);
        let h2v = tgap(norm, &s.x, &s.n, &v.scale(2.0));
        if lip_plus && hv > 0.0 && h2v <= c.t * hv + slack(c.t, hv) * hv {
            let two = norm.gap_with_normal(&s.n, &shifted(&s.x, 2.0, &s.y));
            let ratio = two / one;
            let violated = ratio > bounds.doubling + slack(bounds.doubling, one);
            doub.record(
                witness(s, ratio, bounds.doubling, i),
                ratio / bounds.doubling,
                violated,
            );
        } else {
            doub.hypothesis_misses += 1;
        }
    }

    let minus = norm.gap_with_normal(&s.n, &shifted(&s.x, -1.0, &s.y));
    if minus > floor {
        // Hypotheses: tangent balance at e w, and g(4) <= T^2 along +-w.
        let hp = tgap(norm, &s.x, &s.n, &s.w.scale(s.eps));
        let hm = tgap(norm, &s.x, &s.n, &s.w.scale(-s.eps));
        let balanced_here = hm > 0.0 && hp <= c.k * hm + slack(c.k, hm) * hm;
        if balanced_here && lip_plus && lipschitz_hypothesis(norm, s, -1.0, c.t) {
            let ratio = one / minus;
            let violated = ratio > bounds.balanced + slack(bounds.balanced, minus);
            bal.record(
                witness(s, ratio, bounds.balanced, i),
                ratio / bounds.balanced,
                violated,
            );
        } else {
            bal.hypothesis_misses += 1;
        }
    }
}

fn witness(s: &Sample, ratio: f64, bound: f64, sample: u64) -> TransferWitness {
    TransferWitness {
        x: s.x.clone(),
        y: s.y.clone(),
        alpha: s.alpha,
        ratio,
        bound,
        sample,
    }
}
