//! The one-variable reduction behind the tangent-plane constants of the
//! `p`-norms.
//!
//! With `f(x, y) = |x+y|^p - |x|^p - p y |x|^(p-1) sign(x)` and, after
//! dividing by `|x|^p`, `g(z) = |1+z|^p - 1 - p z`, the three tangent
//! constants come from
//!
//! * `inf g(2z)/g(z) > 2` (convexity),
//! * `sup g(2z)/g(z) < inf` (doubling),
//! * `sup g(z)/g(-z) < inf` (balance).
//!
//! `g(2z)/g(z)` tends to 4 as `z -> 0` and to `2^p` as `|z| -> inf`.
//! Both ends are evaluated in forms free of cancellation.

use serde::{Deserialize, Serialize};

/// `|x+y|^p - |x|^p - p y |x|^(p-1) sign(x)`.
pub fn onev_f(p: f64, x: f64, y: f64) -> f64 {
    (x + y).abs().powf(p) - x.abs().powf(p) - y * p * x.abs().powf(p - 1.0) * x.signum()
}

/// `g(z) = |1+z|^p - 1 - p z` for `|z| <= 1`. Near zero the binomial
/// series `sum_{k>=2} C(p,k) z^k` avoids the cancellation in `- p z`.
fn g_small(p: f64, z: f64) -> f64 {
    if z.abs() <= 0.1 {
        let mut coeff = p * (p - 1.0) / 2.0;
        let mut power = z * z;
        let mut sum = 0.0;
        for k in 2..80 {
            let term = coeff * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coeff *= (p - k as f64) / (k as f64 + 1.0);
            power *= z;
        }
        sum
    } else if z > -1.0 {
        (p * z.ln_1p()).exp_m1() - p * z
    } else {
        (1.0 + z).abs().powf(p) - 1.0 - p * z
    }
}

/// `g(z) / |z|^p` for `|z| >= 1`.
fn g_scaled(p: f64, z: f64) -> f64 {
    let a = z.abs();
    (1.0 / z + 1.0).abs().powf(p) - a.powf(-p) - p * z.signum() * a.powf(1.0 - p)
}

/// `g(z) = |1+z|^p - 1 - p z`.
pub fn onev_g(p: f64, z: f64) -> f64 {
    if z.abs() <= 1.0 {
        g_small(p, z)
    } else {
        g_scaled(p, z) * z.abs().powf(p)
    }
}

/// `g(2z) / g(z)`, stable for tiny and huge `|z|`.
pub fn double_ratio(p: f64, z: f64) -> f64 {
    if z.abs() <= 0.5 {
        g_small(p, 2.0 * z) / g_small(p, z)
    } else if z.abs() >= 1.0 {
        2f64.powf(p) * g_scaled(p, 2.0 * z) / g_scaled(p, z)
    } else {
        onev_g(p, 2.0 * z) / onev_g(p, z)
    }
}

/// `g(z) / g(-z)`.
pub fn balance_ratio(p: f64, z: f64) -> f64 {
    if z.abs() <= 1.0 {
        g_small(p, z) / g_small(p, -z)
    } else {
        g_scaled(p, z) / g_scaled(p, -z)
    }
}

/// Sample points for [`onev_scan`]: `points` log-spaced magnitudes in
/// `[z_min, z_max]` on each side of zero, plus geometric tails out to
/// `tail_max` that expose the limit at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZGrid {
    pub points: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub tail_points: usize,
    pub tail_max: f64,
}

impl Default for ZGrid {
    fn default() -> Self {
        Self {
            points: 100_000,
            z_min: 1e-6,
            z_max: 1e6,
            tail_points: 200,
            tail_max: 1e200,
        }
    }
}

impl ZGrid {
    fn magnitudes(&self) -> Vec<f64> {
        let log_space = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
            if n <= 1 {
                return vec![lo];
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        };
        let mut m = log_space(self.points, self.z_min, self.z_max);
        if self.tail_points > 0 && self.tail_max > self.z_max {
            let tail = log_space(self.tail_points + 1, self.z_max, self.tail_max);
            m.extend(tail.into_iter().skip(1));
        }
        m
    }
}

/// Extremal ratios of the one-variable reduction, with the `z` at which
/// each was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnevScan {
    pub p: f64,
    pub inf_double_ratio: f64,
    pub inf_at: f64,
    pub sup_double_ratio: f64,
    pub sup_at: f64,
    pub sup_balance_ratio: f64,
    pub balance_at: f64,
    /// `g(2z)/g(z)` at the smallest `|z|` (both signs; the one farther
    /// from 4 is reported).
    pub limit_zero: f64,
    /// `g(2z)/g(z)` at the largest `|z|` (the one farther from `2^p`).
    pub limit_infinity: f64,
}

/// Scans the grid for the three extremal ratios.
pub fn onev_scan(p: f64, grid: &ZGrid) -> OnevScan {
    let mags = grid.magnitudes();
    let mut out = OnevScan {
        p,
        inf_double_ratio: f64::INFINITY,
        inf_at: f64::NAN,
        sup_double_ratio: f64::NEG_INFINITY,
        sup_at: f64::NAN,
        sup_balance_ratio: f64::NEG_INFINITY,
        balance_at: f64::NAN,
        limit_zero: f64::NAN,
        limit_infinity: f64::NAN,
    };
    for &m in &mags {
        for z in [-m, m] {
            let d = double_ratio(p, z);
            if d.is_finite() {
                if d < out.inf_double_ratio {
                    out.inf_double_ratio = d;
                    out.inf_at = z;
                }
                if d > out.sup_double_ratio {
                    out.sup_double_ratio = d;
                    out.sup_at = z;
                }
            }
            let b = balance_ratio(p, z);
            if b.is_finite() && b > out.sup_balance_ratio {
                out.sup_balance_ratio = b;
                out.balance_at = z;
            }
        }
    }
    let farther = |target: f64, m: f64| {
        let (a, b) = (double_ratio(p, -m), double_ratio(p, m));
        if (a - target).abs() >= (b - target).abs() {
            a
        } else {
            b
        }
    };
    if let (Some(&lo), Some(&hi)) = (mags.first(), mags.last()) {
        out.limit_zero = farther(4.0, lo);
        out.limit_infinity = farther(2f64.powf(p), hi);
    }
    out
}
