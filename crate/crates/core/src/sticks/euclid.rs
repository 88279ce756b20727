//! Lipschitz estimates for the Euclidean norm.
//!
//! For any two sticks pair, `<l1 - m1, l0 - m0> >= 0`, which gives
//!
//! ```text
//! (1-t)^2 |l0 - m0|^2 + t^2 |l1 - m1|^2 <= |lt - mt|^2,
//! ```
//!
//! and with equal lengths `|l1 - m1| <= (2/t) |ls - mt|` for
//! `0 < t <= s <= 1`.

use serde::{Deserialize, Serialize};

use crate::error::StickError;
use crate::norm::NormSpec;
use crate::sticks::{require_pair, Stick};
use crate::vector::dot;

fn euclidean_pair(l: &Stick, m: &Stick, equal: bool) -> Result<NormSpec, StickError> {
    let e = NormSpec::euclidean(l.dim())?;
    require_pair(&e, l, m, equal)?;
    Ok(e)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `<l1 - m1, l0 - m0>`.
pub fn euclid_monotonicity(l: &Stick, m: &Stick) -> Result<f64, StickError> {
    euclidean_pair(l, m, false)?;
    Ok(dot(&sub(&l.end, &m.end), &sub(&l.start, &m.start)))
}

/// `max(0, (1-t)^2 |l0-m0|^2 + t^2 |l1-m1|^2 - |lt-mt|^2)`.
pub fn euclid_interp_bound_residual(l: &Stick, m: &Stick, t: f64) -> Result<f64, StickError> {
    euclidean_pair(l, m, false)?;
    let d0 = sub(&l.start, &m.start);
    let d1 = sub(&l.end, &m.end);
    let dt = sub(&l.point_at(t), &m.point_at(t));
    let lhs = (1.0 - t).powi(2) * dot(&d0, &d0) + t * t * dot(&d1, &d1);
    Ok((lhs - dot(&dt, &dt)).max(0.0))
}

/// `t |l1 - m1| / (2 |ls - mt|)` for an equal-length pair, at most 1 by
/// the Lipschitz estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzRatio {
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
}

/// The ratio without checking the two sticks or equal length conditions.
///
/// Coincident intermediate points give 0 when the ends also agree and
/// [`StickError::Unbounded`] otherwise. Without equal lengths the latter
/// happens: in `R^1`, `l = [0, 1]`, `m = [0, 2]`, `s = 1`, `t = 1/2`.
pub fn lipschitz_ratio_unchecked(
    l: &Stick,
    m: &Stick,
    s: f64,
    t: f64,
) -> Result<LipschitzRatio, StickError> {
    let e = NormSpec::euclidean(l.dim())?;
    let numerator = e.value(&sub(&l.end, &m.end));
    let denominator = e.value(&sub(&l.point_at(s), &m.point_at(t)));
    if denominator == 0.0 {
        if numerator == 0.0 {
            return Ok(LipschitzRatio {
                ratio: 0.0,
                numerator,
                denominator,
            });
        }
        return Err(StickError::Unbounded { numerator });
    }
    Ok(LipschitzRatio {
        ratio: t * numerator / (2.0 * denominator),
        numerator,
        denominator,
    })
}

/// `t |l1 - m1| / (2 |ls - mt|)` for an equal-length Euclidean two sticks
/// pair and `0 < t <= s <= 1`.
pub fn euclid_lipschitz_ratio(
    l: &Stick,
    m: &Stick,
    s: f64,
    t: f64,
) -> Result<LipschitzRatio, StickError> {
    if !(0.0 < t && t <= s && s <= 1.0) {
        return Err(StickError::Precondition(format!(
            "need 0 < t <= s <= 1, got t = {t}, s = {s}"
        )));
    }
    euclidean_pair(l, m, true)?;
    lipschitz_ratio_unchecked(l, m, s, t)
}
