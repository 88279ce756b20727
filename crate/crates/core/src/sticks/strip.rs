//! Strip confinement of the far ends.
//!
//! Let unit sticks `l`, `m` (directions `e`, `f`) satisfy the two sticks
//! condition, both meet the closed ball `B(x0, delta)`, and have their
//! ends of `l` outside `B(x0, rho)`. With `kappa >= 4/(rho - 3 delta)`,
//! `sigma(e, kappa delta) <= sigma(f, kappa delta)`, and a norm that is
//! geometrically convex with constants `(1, Lambda)`,
//!
//! ```text
//! h(f, m1 - l0) + h(f, l1 - m0) <= Lambda/(Lambda-2) sigma(f, kappa delta).
//! ```
//!
//! If the norm is also balanced with `(R, K)` and `|l1 - m1| <= R`, then
//! for a maximizer `y` of `sigma(f, w)` with `w = K Lambda^2/(Lambda-2) kappa delta <= 1`,
//!
//! ```text
//! -w <= <l1 - m1, N(y)> <= w,      -w <= <f, N(y)> <= 0.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::StickError;
use crate::moduli::modulus::{modulus, ModulusOptions};
use crate::norm::NormSpec;
use crate::sticks::{require_pair, Stick, BOUND_TOLERANCE};
use crate::vector::Vector;

/// The width `K Lambda^2/(Lambda-2) kappa delta` of the strip.
pub fn strip_bound(k_const: f64, lambda: f64, kappa: f64, delta: f64) -> f64 {
    k_const * lambda * lambda / (lambda - 2.0) * kappa * delta
}

/// The smallest admissible `kappa`, `4/(rho - 3 delta)`.
pub fn min_kappa(rho: f64, delta: f64) -> f64 {
    4.0 / (rho - 3.0 * delta)
}

/// Index of the stick whose direction maximizes `sigma(e, radius)`.
/// Values within a relative `1e-9` of the best count as ties, which go to
/// the lowest index.
pub fn select_special_stick(
    norm: &NormSpec,
    sticks: &[Stick],
    radius: f64,
    opts: &ModulusOptions,
) -> Result<usize, StickError> {
    if sticks.is_empty() {
        return Err(StickError::Empty);
    }
    let mut sigmas = Vec::with_capacity(sticks.len());
    for s in sticks {
        s.check(norm)?;
        let len = s.length(norm);
        if (len - 1.0).abs() > 1e-9 {
            return Err(StickError::Precondition(format!(
                "special stick selection needs unit sticks, got length {len}"
            )));
        }
        sigmas.push(modulus(norm, &s.direction(), radius, opts)?.sigma);
    }
    let best = sigmas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(sigmas
        .iter()
        .position(|s| *s >= best - 1e-9 * best.abs())
        .expect("nonempty"))
}

/// Minimizer of `t -> |a + t (b - a) - x|` over `[0, 1]` and the distance.
pub fn closest_point_on_segment(norm: &NormSpec, s: &Stick, x: &[f64]) -> (f64, f64) {
    let f = |t: f64| {
        let p = s.point_at(t);
        let d: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
        norm.value(&d)
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-15 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    [
        (0.0, f(0.0)),
        (1.0, f(1.0)),
        ((a + b) / 2.0, f((a + b) / 2.0)),
    ]
    .into_iter()
    .min_by(|u, v| u.1.total_cmp(&v.1))
    .expect("three candidates")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripParams {
    pub delta: f64,
    pub rho: f64,
    /// Defaults to `4/(rho - 3 delta)`.
    pub kappa: Option<f64>,
    /// Convexity constant at radius 1.
    pub lambda: f64,
    /// Balance constant at radius `balanced_radius`.
    pub k_const: f64,
    pub balanced_radius: f64,
    pub tolerance: f64,
    pub modulus: ModulusOptions,
}

impl StripParams {
    pub fn new(delta: f64, rho: f64, lambda: f64, k_const: f64, balanced_radius: f64) -> Self {
        Self {
            delta,
            rho,
            kappa: None,
            lambda,
            k_const,
            balanced_radius,
            tolerance: BOUND_TOLERANCE,
            modulus: ModulusOptions::default(),
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
            .unwrap_or_else(|| min_kappa(self.rho, self.delta))
    }

    pub fn bound(&self) -> f64 {
        strip_bound(self.k_const, self.lambda, self.kappa(), self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    /// Common length of the input sticks; everything below is for the
    /// sticks scaled to unit length.
    pub length: f64,
    pub delta: f64,
    pub rho: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub k_const: f64,
    pub bound: f64,
    pub sigma_e: f64,
    pub sigma_ebar: f64,
    /// Point of `m` closest to `x0`.
    pub lambda_star: Vector,
    /// Parameter of the point `l*` of `l` with `<l* - lambda*, N(e)> = 0`.
    pub t_star: f64,
    pub l_star: Vector,
    /// `|l* - x0| <= 3 delta`, as the construction guarantees.
    pub l_star_in_ball: bool,
    pub ybar: Vector,
    pub normal_ybar: Vector,
    pub modulus_converged: bool,
    /// `<l1 - m1, N(ybar)>`.
    pub projection: f64,
    /// `<f, N(ybar)>`.
    pub direction_projection: f64,
    pub promise_lhs: f64,
    pub promise_rhs: f64,
    pub promise_ok: bool,
    pub strip_ok: bool,
    pub direction_ok: bool,
    pub passed: bool,
}

fn fail(what: &str) -> StickError {
    StickError::Precondition(what.to_string())
}

/// Checks the strip conclusions for one configuration. `m` plays the
/// special stick. Violated hypotheses are reported as
/// [`StickError::Precondition`] naming the hypothesis.
pub fn strip_experiment(
    norm: &NormSpec,
    l: &Stick,
    m: &Stick,
    x0: &Vector,
    params: &StripParams,
) -> Result<StripReport, StickError> {
    norm.check(x0)?;
    let len = require_pair(norm, l, m, true)?;
    let scale = 1.0 / len;
    let (l, m, x0) = (l.scaled(scale), m.scaled(scale), x0.scale(scale));
    let delta = params.delta * scale;
    let rho = params.rho * scale;
    let kappa = params.kappa();
    let tol = params.tolerance;

    if !(delta > 0.0 && delta < 0.25) {
        return Err(fail(&format!(
            "delta = {delta} must lie in (0, 1/4) at unit length"
        )));
    }
    if !(rho > 3.0 * delta) {
        return Err(fail(&format!(
            "rho = {rho} must exceed 3 delta = {}",
            3.0 * delta
        )));
    }
    if !(kappa >= min_kappa(rho, delta) * (1.0 - 1e-12)) {
        return Err(fail(&format!(
            "kappa = {kappa} is below 4/(rho - 3 delta) = {}",
            min_kappa(rho, delta)
        )));
    }
    if !(params.lambda > 2.0) {
        return Err(fail(&format!(
            "geometric convexity constant {} is not above 2",
            params.lambda
        )));
    }
    if !(params.k_const >= 1.0) {
        return Err(fail(&format!(
            "balance constant {} is below 1",
            params.k_const
        )));
    }
    let (_, dl) = closest_point_on_segment(norm, &l, &x0);
    let (tm, dm) = closest_point_on_segment(norm, &m, &x0);
    let near = delta * (1.0 + 1e-9);
    if dl > near {
        return Err(fail(&format!(
            "stick l misses the ball B(x0, delta): distance {dl}"
        )));
    }
    if dm > near {
        return Err(fail(&format!(
            "stick m misses the ball B(x0, delta): distance {dm}"
        )));
    }
    for (name, p) in [("l0", &l.start), ("l1", &l.end)] {
        let d = norm.value(&(p - &x0));
        if d <= rho {
            return Err(fail(&format!(
                "{name} lies in the ball B(x0, rho): distance {d}"
            )));
        }
    }
    let e = l.direction();
    let f = m.direction();
    let t = kappa * delta;
    let sigma_e = modulus(norm, &e, t, &params.modulus)?.sigma;
    let sigma_ebar = modulus(norm, &f, t, &params.modulus)?.sigma;
    if sigma_e > sigma_ebar + 1e-9 * sigma_ebar.abs() + 1e-300 {
        return Err(fail(&format!(
            "m is not the special stick: sigma(e) = {sigma_e} > sigma(f) = {sigma_ebar}"
        )));
    }
    let ends = &l.end - &m.end;
    let ends_gap = norm.value(&ends);
    if ends_gap > params.balanced_radius {
        return Err(fail(&format!(
            "|l1 - m1| = {ends_gap} exceeds the balanced radius {}",
            params.balanced_radius
        )));
    }
    let bound = strip_bound(params.k_const, params.lambda, kappa, delta);
    if bound > 1.0 {
        return Err(fail(&format!("strip width {bound} exceeds 1")));
    }

    // The intermediate points of the construction.
    let lambda_star = m.point_at(tm);
    let ne = norm.normal(&e).expect("unit direction");
    let t_star = (&lambda_star - &l.start).dot(&ne);
    let l_star = l.point_at(t_star);
    let l_star_in_ball =
        (0.0..=1.0).contains(&t_star) && norm.value(&(&l_star - &x0)) <= 3.0 * delta * (1.0 + 1e-9);

    let lam = params.lambda;
    let promise_lhs = norm.gap(&f, &(&m.end - &l.start)) + norm.gap(&f, &(&l.end - &m.start));
    let promise_rhs = lam / (lam - 2.0) * sigma_ebar;
    let promise_ok = promise_lhs <= promise_rhs + tol * (1.0 + promise_lhs + promise_rhs);

    let ybar = modulus(norm, &f, bound, &params.modulus)?;
    let projection = ends.dot(&ybar.normal_at_y);
    let strip_ok = projection.abs() <= bound + tol * (1.0 + bound + ends_gap);
    let direction_projection = f.dot(&ybar.normal_at_y);
    let direction_ok =
        -bound - tol * (1.0 + bound) <= direction_projection && direction_projection <= tol;

    Ok(StripReport {
        length: len,
        delta,
        rho,
        kappa,
        lambda: lam,
        k_const: params.k_const,
        bound,
        sigma_e,
        sigma_ebar,
        lambda_star,
        t_star,
        l_star,
        l_star_in_ball,
        ybar: ybar.maximizer_y,
        normal_ybar: ybar.normal_at_y,
        modulus_converged: ybar.converged,
        projection,
        direction_projection,
        promise_lhs,
        promise_rhs,
        promise_ok,
        strip_ok,
        direction_ok,
        passed: promise_ok && strip_ok && direction_ok,
    })
}
