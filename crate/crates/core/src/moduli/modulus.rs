//! The modulus of geometric convexity
//! `sigma(x, t) = max { h(x, x + y) : |y| <= t }`.
//!
//! The maximum is attained on the sphere `|y| = t`, where a maximizer
//! satisfies the multiplier condition `N(x + y) - N(x) = a N(y)` with
//! `a > 0`. We run projected gradient ascent on that sphere from a
//! deterministic set of starts (Halton points), and in dimensions 2 and 3
//! cross-check the best value against a grid over the sphere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, NormError};
use crate::norm::{NormSpec, ZERO_THRESHOLD};
use crate::sampling::halton;
use crate::vector::{dot, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusOptions {
    /// Number of ascent starts.
    pub starts: usize,
    /// Iteration cap per start.
    pub max_iter: usize,
    /// Stop once the tangential gradient is below this (relative) size.
    pub kkt_tol: f64,
    /// Compare against a sphere grid in dimensions 2 and 3.
    pub grid_fallback: bool,
    /// Grid points per half turn.
    pub grid_resolution: usize,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iter: 2000,
            kkt_tol: 1e-10,
            grid_fallback: true,
            grid_resolution: 90,
        }
    }
}

impl ModulusOptions {
    /// Fewer starts and no grid; for batch experiments.
    pub fn fast() -> Self {
        Self {
            starts: 8,
            grid_fallback: false,
            ..Self::default()
        }
    }
}

/// A maximizer of `h(x, x + y)` over `|y| <= t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusResult {
    pub sigma: f64,
    pub t: f64,
    pub maximizer_y: Vector,
    pub normal_at_y: Vector,
    /// Euclidean length of the tangential part of the gradient at the
    /// returned point; zero at an exact critical point.
    pub kkt_residual: f64,
    /// The multiplier `a` in `N(x + y) - N(x) = a N(y)`.
    pub multiplier: f64,
    /// False when the ascent hit its iteration cap or stalled before the
    /// multiplier condition was met. Such results are best effort.
    pub converged: bool,
    /// Whether the grid cross-check ran (dimensions 2 and 3 only).
    pub grid_checked: bool,
}

struct Objective<'a> {
    norm: &'a NormSpec,
    x: &'a [f64],
    nx: Vector,
    t: f64,
}

impl Objective<'_> {
    fn value(&self, y: &[f64]) -> f64 {
        let w: Vec<f64> = self.x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.norm.gap_with_normal(&self.nx, &w)
    }

    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = self.x.iter().zip(y).map(|(a, b)| a + b).collect();
        match self.norm.normal(&w) {
            Some(nw) => nw.iter().zip(self.nx.iter()).map(|(a, b)| a - b).collect(),
            None => self.nx.iter().map(|b| -b).collect(),
        }
    }

    fn retract(&self, y: &[f64]) -> Option<Vec<f64>> {
        let ny = self.norm.value(y);
        if ny < ZERO_THRESHOLD {
            return None;
        }
        Some(y.iter().map(|c| c * self.t / ny).collect())
    }

    /// Tangential gradient (Euclidean projection onto the tangent plane of
    /// the sphere at `y`) and the multiplier.
    fn tangential(&self, y: &[f64], g: &[f64]) -> (Vec<f64>, f64, Vector) {
        let ny = self
            .norm
            .normal(y)
            .expect("y lies on a sphere of positive radius");
        let nn = dot(&ny, &ny);
        let a = dot(g, &ny) / nn;
        let v = g
            .iter()
            .zip(ny.iter())
            .map(|(gi, ni)| gi - a * ni)
            .collect();
        (v, a, ny)
    }
}

struct Ascent {
    y: Vec<f64>,
    value: f64,
    kkt: f64,
    multiplier: f64,
    normal: Vector,
    converged: bool,
}

fn ascend(obj: &Objective<'_>, start: Vec<f64>, opts: &ModulusOptions) -> Ascent {
    let mut y = start;
    let mut f = obj.value(&y);
    let mut step = obj.t;
    let mut converged = false;
    let mut stalls = 0;
    for _ in 0..opts.max_iter {
        let g = obj.gradient(&y);
        let (v, _, _) = obj.tangential(&y, &g);
        let vv = dot(&v, &v);
        let gnorm = dot(&g, &g).sqrt();
        if vv.sqrt() <= opts.kkt_tol * (1.0 + gnorm) {
            converged = true;
            break;
        }
        // Armijo backtracking along the retracted tangential direction.
        let mut trial = step * 2.0;
        let mut accepted = None;
        while trial > 1e-20 * obj.t {
            let cand: Vec<f64> = y.iter().zip(&v).map(|(a, b)| a + trial * b).collect();
            if let Some(c) = obj.retract(&cand) {
                let fc = obj.value(&c);
                if fc >= f + 1e-4 * trial * vv {
                    accepted = Some((c, fc));
                    break;
                }
            }
            trial *= 0.5;
        }
        match accepted {
            Some((c, fc)) => {
                let gain = fc - f;
                y = c;
                f = fc;
                step = trial;
                if gain <= 1e-16 * (1.0 + f.abs()) {
                    stalls += 1;
                    if stalls >= 5 {
                        break;
                    }
                } else {
                    stalls = 0;
                }
            }
            None => break,
        }
    }
    let g = obj.gradient(&y);
    let (v, multiplier, normal) = obj.tangential(&y, &g);
    let kkt = dot(&v, &v).sqrt();
    let gnorm = dot(&g, &g).sqrt();
    // A stalled line search at a point whose tangential gradient is at the
    // rounding level of the objective counts as converged.
    if !converged && kkt <= 1e-7 * (1.0 + gnorm) {
        converged = true;
    }
    Ascent {
        y,
        value: f,
        kkt,
        multiplier,
        normal,
        converged,
    }
}

fn starts(obj: &Objective<'_>, count: usize) -> Vec<Vec<f64>> {
    let dim = obj.x.len();
    let mut out = Vec::with_capacity(count);
    let mut k = 0u64;
    while out.len() < count && k < 64 * count as u64 + 64 {
        let u: Vec<f64> = halton(k, dim).iter().map(|c| 2.0 * c - 1.0).collect();
        k += 1;
        if let Some(y) = obj.retract(&u) {
            out.push(y);
        }
    }
    out
}

/// Directions covering the unit sphere of `R^2` or `R^3` at the given
/// resolution (points per half turn).
fn sphere_grid(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let res = resolution.max(4);
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..2 * res)
            .map(|k| {
                let th = PI * k as f64 / res as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let mut pts = Vec::new();
            for i in 0..=res {
                let phi = PI * i as f64 / res as f64;
                let ring = if i == 0 || i == res { 1 } else { 2 * res };
                for k in 0..ring {
                    let th = PI * k as f64 / res as f64;
                    pts.push(vec![phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()]);
                }
            }
            pts
        }
        _ => Vec::new(),
    }
}

/// `sigma(x, t)` together with a maximizer `y` and `N(y)`.
pub fn modulus(
    norm: &NormSpec,
    x: &Vector,
    t: f64,
    opts: &ModulusOptions,
) -> Result<ModulusResult, ModuliError> {
    norm.check(x)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(ModuliError::InvalidRadius(t));
    }
    let nx = norm.normal(x).ok_or(NormError::ZeroVector {
        what: "the modulus of geometric convexity",
    })?;
    let obj = Objective { norm, x, nx, t };

    let mut runs: Vec<Ascent> = starts(&obj, opts.starts.max(1))
        .into_iter()
        .map(|s| ascend(&obj, s, opts))
        .collect();

    let dim = x.dim();
    let grid_checked = opts.grid_fallback && dim <= 3;
    if grid_checked {
        let best_run = runs
            .iter()
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max);
        let grid_best = sphere_grid(dim, opts.grid_resolution)
            .into_iter()
            .filter_map(|u| obj.retract(&u))
            .map(|y| (obj.value(&y), y))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((gv, gy)) = grid_best {
            if gv > best_run + 1e-12 * (1.0 + gv.abs()) {
                runs.push(ascend(&obj, gy, opts));
            }
        }
    }

    let best = runs
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let chosen = runs
        .into_iter()
        .find(|r| r.value >= best - 1e-9)
        .expect("at least one start");
    Ok(ModulusResult {
        sigma: chosen.value.max(0.0),
        t,
        maximizer_y: Vector::from_raw(chosen.y),
        normal_at_y: chosen.normal,
        kkt_residual: chosen.kkt,
        multiplier: chosen.multiplier,
        converged: chosen.converged,
        grid_checked,
    })
}
