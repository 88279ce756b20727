//! Explicit triples in `l^p(R^3)` showing that the Hölder exponent of the
//! endpoint estimate cannot be improved.
//!
//! Each instance gives unit vectors `e`, `ē` and a vector `m` with
//!
//! ```text
//! 1 = |e| <= |m + (e+ē)/2|,   1 = |ē| <= |-m + (e+ē)/2|,
//! ```
//!
//! for which `|e - ē|` is comparable to `|m|^(2/p)` when `p >= 2` and to
//! `|m|^(p/2)` when `p <= 2`. Both constructions rest on the root `r = g(eps)`
//! of `(1-r)^p + (1+r)^p = 2 + eps` on `[0, 1]`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, SharpnessError};
use crate::norm::NormSpec;
use crate::vector::Vector;

/// Tolerance on the unit norms and the two sticks inequalities.
pub const INSTANCE_TOLERANCE: f64 = 1e-10;

fn check_exponent(p: f64) -> Result<(), SharpnessError> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(SharpnessError::InvalidExponent(p))
    }
}

/// `f(r) - 2 = (1-r)^p + (1+r)^p - 2`, by its even binomial series for
/// small `r` to avoid cancellation.
pub fn excess(p: f64, r: f64) -> f64 {
    if r > 0.1 {
        return (1.0 - r).powf(p) + (1.0 + r).powf(p) - 2.0;
    }
    let r2 = r * r;
    let mut c = 1.0; // binomial(p, j)
    let mut pow = 1.0;
    let mut sum = 0.0;
    for j in (0..200).step_by(2) {
        c *= (p - j as f64) / (j as f64 + 1.0);
        c *= (p - j as f64 - 1.0) / (j as f64 + 2.0);
        pow *= r2;
        let term = 2.0 * c * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// The root `r in [0, 1]` of `(1-r)^p + (1+r)^p = 2 + eps`, by bisection.
///
/// The left side is strictly increasing on `[0, 1]`, from 2 to `2^p`, so
/// the root exists and is unique for `0 <= eps <= 2^p - 2`. Bisection runs
/// until the bracket cannot shrink further.
pub fn solve_g(p: f64, eps: f64) -> Result<f64, SharpnessError> {
    check_exponent(p)?;
    let max = 2f64.powf(p) - 2.0;
    if !(eps >= 0.0 && eps <= max) {
        return Err(SharpnessError::EpsOutOfRange { eps, max });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    if eps == max {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(p, mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (elo, ehi) = (eps - excess(p, lo), excess(p, hi) - eps);
    Ok(if elo <= ehi { lo } else { hi })
}

/// Which of the two constructions produced an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `e = (δ, x, -x)`, `ē = (-δ, x, -x)`, `m = (0, y, y)`; `p >= 2`.
    Large,
    /// `e = (x-δ, x+δ, 0)`, `ē = (x+δ, x-δ, 0)`, `m = (0, 0, y)`; `p <= 2`.
    Small,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessInstance {
    pub construction: Construction,
    pub p: f64,
    pub delta: f64,
    pub e: Vector,
    pub e_bar: Vector,
    pub m: Vector,
    pub x_param: f64,
    pub y_param: f64,
}

/// Norms entering the instance invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceCheck {
    pub norm_e: f64,
    pub norm_e_bar: f64,
    /// `|m + (e+ē)/2|`.
    pub plus: f64,
    /// `|-m + (e+ē)/2|`.
    pub minus: f64,
    pub ok: bool,
}

impl SharpnessInstance {
    fn norm(&self) -> NormSpec {
        NormSpec::p_norm(self.p, 3).expect("p > 1 was checked on construction")
    }

    /// Unit norms of `e`, `ē` and the two sticks inequalities, all within
    /// [`INSTANCE_TOLERANCE`].
    pub fn verify(&self) -> InstanceCheck {
        let n = self.norm();
        let mid = self.e.lerp(&self.e_bar, 0.5);
        let norm_e = n.value(&self.e);
        let norm_e_bar = n.value(&self.e_bar);
        let plus = n.value(&(&mid + &self.m));
        let minus = n.value(&(&mid - &self.m));
        let ok = (norm_e - 1.0).abs() <= INSTANCE_TOLERANCE
            && (norm_e_bar - 1.0).abs() <= INSTANCE_TOLERANCE
            && plus >= norm_e - INSTANCE_TOLERANCE
            && minus >= norm_e_bar - INSTANCE_TOLERANCE;
        InstanceCheck {
            norm_e,
            norm_e_bar,
            plus,
            minus,
            ok,
        }
    }

    /// `|e - ē|_p`.
    pub fn gap_norm(&self) -> f64 {
        self.norm().value(&(&self.e - &self.e_bar))
    }

    /// `|m|_p`.
    pub fn m_norm(&self) -> f64 {
        self.norm().value(&self.m)
    }

    /// The power of `|m|` that `|e - ē|` is compared with.
    pub fn exponent(&self) -> f64 {
        match self.construction {
            Construction::Large => 2.0 / self.p,
            Construction::Small => self.p / 2.0,
        }
    }

    /// Exact over second-order Taylor value of the solved quantity; tends
    /// to 1 in the degenerate limit.
    ///
    /// For [`Construction::Large`] this is `y^2 p(p-1) x^(p-2) / δ^p`, for
    /// [`Construction::Small`] `δ^2 p(p-1) x^(p-2) / (1 - 2x^p)`.
    pub fn taylor_consistency(&self) -> f64 {
        let (p, x) = (self.p, self.x_param);
        let c = p * (p - 1.0) * x.powf(p - 2.0);
        match self.construction {
            Construction::Large => self.y_param.powi(2) * c / self.delta.powf(p),
            Construction::Small => self.delta.powi(2) * c / self.y_param.powf(p),
        }
    }
}

fn v3(c: [f64; 3]) -> Vector {
    Vector::new(c.to_vec()).expect("finite coordinates")
}

/// The instance `e = (δ, x, -x)`, `ē = (-δ, x, -x)`, `m = (0, y, y)` with
/// `1 = δ^p + 2x^p` and `y = x g(2δ^p / (1 - δ^p))` solved exactly.
///
/// Needs `p >= 2`; at `p = 2` the comparison exponent is 1.
pub fn construct_pgt2(p: f64, delta: f64) -> Result<SharpnessInstance, SharpnessError> {
    check_exponent(p)?;
    if p < 2.0 {
        return Err(SharpnessError::InvalidExponent(p));
    }
    let dp = delta.powf(p);
    if !(delta > 0.0 && dp < 1.0) {
        return Err(SharpnessError::DeltaTooLarge(delta));
    }
    let eps = 2.0 * dp / (1.0 - dp);
    let r = match solve_g(p, eps) {
        Ok(r) => r,
        Err(SharpnessError::EpsOutOfRange { .. }) => {
            return Err(SharpnessError::DeltaTooLarge(delta))
        }
        Err(e) => return Err(e),
    };
    let x = ((1.0 - dp) / 2.0).powf(1.0 / p);
    let y = x * r;
    Ok(SharpnessInstance {
        construction: Construction::Large,
        p,
        delta,
        e: v3([delta, x, -x]),
        e_bar: v3([-delta, x, -x]),
        m: v3([0.0, y, y]),
        x_param: x,
        y_param: y,
    })
}

/// The instance `e = (x-δ, x+δ, 0)`, `ē = (x+δ, x-δ, 0)`, `m = (0, 0, y)`
/// with `δ = x g(1/x^p - 2)` and `y^p = 1 - 2x^p`.
///
/// Needs `1 < p <= 2` and `2^-p <= x^p <= 1/2`; `x^p = 1/2` is the
/// degenerate end with `δ = y = 0`.
pub fn construct_plt2(p: f64, x_param: f64) -> Result<SharpnessInstance, SharpnessError> {
    check_exponent(p)?;
    if p > 2.0 {
        return Err(SharpnessError::InvalidExponent(p));
    }
    let xp = x_param.powf(p);
    let low = 2f64.powf(-p);
    // a few ulps of slack so that x = (1/2)^(1/p) is accepted
    let ulps = 4.0 * f64::EPSILON;
    if !(x_param > 0.0 && xp >= low * (1.0 - ulps) && xp <= 0.5 * (1.0 + ulps)) {
        return Err(SharpnessError::OutsideWindow { value: xp, low });
    }
    let slack = (1.0 - 2.0 * xp).max(0.0);
    let max = 2f64.powf(p) - 2.0;
    let r = solve_g(p, (slack / xp).clamp(0.0, max))?;
    let x = x_param;
    let delta = x * r;
    let y = slack.powf(1.0 / p);
    Ok(SharpnessInstance {
        construction: Construction::Small,
        p,
        delta,
        e: v3([x - delta, x + delta, 0.0]),
        e_bar: v3([x + delta, x - delta, 0.0]),
        m: v3([0.0, 0.0, y]),
        x_param: x,
        y_param: y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    /// `δ` for `p > 2`, `x` for `p < 2`.
    pub parameter: f64,
    pub gap_norm: f64,
    pub m_norm: f64,
    /// `gap_norm / m_norm^exponent`; NaN at the degenerate end.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessCurve {
    pub p: f64,
    pub construction: Construction,
    pub exponent: f64,
    pub rows: Vec<CurveRow>,
    /// Smallest and largest finite ratio.
    pub band: Option<(f64, f64)>,
}

impl SharpnessCurve {
    /// `band.1 / band.0`.
    pub fn spread(&self) -> Option<f64> {
        self.band.map(|(c, cc)| cc / c)
    }

    /// Columns `parameter,gap_norm,m_norm,ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["parameter", "gap_norm", "m_norm", "ratio"])?;
        for r in &self.rows {
            w.write_record(
                [r.parameter, r.gap_norm, r.m_norm, r.ratio].map(|v| format!("{v:.16e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates the construction for `p` at each grid parameter: `δ` when
/// `p >= 2`, `x` when `p < 2`.
pub fn sharpness_curve(p: f64, grid: &[f64]) -> Result<SharpnessCurve, SharpnessError> {
    check_exponent(p)?;
    let construction = if p >= 2.0 {
        Construction::Large
    } else {
        Construction::Small
    };
    let mut rows = Vec::with_capacity(grid.len());
    let mut band: Option<(f64, f64)> = None;
    let mut exponent = if p >= 2.0 { 2.0 / p } else { p / 2.0 };
    for &param in grid {
        let inst = match construction {
            Construction::Large => construct_pgt2(p, param)?,
            Construction::Small => construct_plt2(p, param)?,
        };
        exponent = inst.exponent();
        let (gap_norm, m_norm) = (inst.gap_norm(), inst.m_norm());
        let ratio = if m_norm > 0.0 {
            gap_norm / m_norm.powf(exponent)
        } else {
            f64::NAN
        };
        if ratio.is_finite() {
            band = Some(match band {
                None => (ratio, ratio),
                Some((lo, hi)) => (lo.min(ratio), hi.max(ratio)),
            });
        }
        rows.push(CurveRow {
            parameter: param,
            gap_norm,
            m_norm,
            ratio,
        });
    }
    Ok(SharpnessCurve {
        p,
        construction,
        exponent,
        rows,
        band,
    })
}

/// `count` log-spaced values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `count` values of `x` with `x^p` approaching `1/2` geometrically:
/// `x^p = 1/2 - w 10^(-k decades / (count-1))`, `w = 1/2 - 2^-p`.
pub fn window_grid(p: f64, count: usize, decades: f64) -> Vec<f64> {
    let w = 0.5 - 2f64.powf(-p);
    (0..count)
        .map(|k| {
            let f = if count <= 1 {
                0.0
            } else {
                k as f64 / (count - 1) as f64
            };
            (0.5 - w * 10f64.powf(-decades * f)).powf(1.0 / p)
        })
        .collect()
}
