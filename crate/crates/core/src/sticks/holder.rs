//! Empirical Hölder constants for `p`-uniformly convex, `q`-uniformly
//! smooth norms:
//!
//! ```text
//! |l1 - m1| <= (C / t) |lt - mt|^(q/p)     (unit sticks, |l1 - m1| <= R)
//! ```
//!
//! `C` is estimated as the supremum of `t |l1 - m1| / |lt - mt|^(q/p)`
//! over sampled pairs.

use serde::{Deserialize, Serialize};

use crate::error::StickError;
use crate::norm::NormSpec;
use crate::sticks::{require_pair, Stick};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderOptions {
    /// Pairs with `|l1 - m1|` above this (after normalization) are
    /// rejected. `None` accepts every pair.
    pub holder_radius: Option<f64>,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            holder_radius: None,
        }
    }
}

/// `t |l1 - m1| / |lt - mt|^(q/p)` after scaling both sticks to unit
/// length.
pub fn holder_ratio(
    norm: &NormSpec,
    l: &Stick,
    m: &Stick,
    t: f64,
    q: f64,
    p: f64,
    opts: &HolderOptions,
) -> Result<f64, StickError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(StickError::Precondition(format!(
            "t = {t} is outside (0, 1]"
        )));
    }
    if !(q > 1.0 && q <= p && p.is_finite()) {
        return Err(StickError::Precondition(format!(
            "exponents must satisfy 1 < q <= p, got q = {q}, p = {p}"
        )));
    }
    let len = require_pair(norm, l, m, true)?;
    let (l, m) = (l.scaled(1.0 / len), m.scaled(1.0 / len));
    let numerator = norm.value(&(&l.end - &m.end));
    if let Some(r) = opts.holder_radius {
        if numerator > r {
            return Err(StickError::Precondition(format!(
                "|l1 - m1| = {numerator} exceeds the radius {r}"
            )));
        }
    }
    let gap = norm.value(&(&l.point_at(t) - &m.point_at(t)));
    if gap == 0.0 {
        if numerator == 0.0 {
            return Ok(0.0);
        }
        return Err(StickError::Unbounded { numerator });
    }
    Ok(t * numerator / gap.powf(q / p))
}

/// Largest ratio over a set of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderSummary {
    pub sup: f64,
    /// `(i, j, t)` of the trial attaining `sup`.
    pub witness: Option<(usize, usize, f64)>,
    pub trials: usize,
    /// Trials skipped because the pair broke a precondition.
    pub skipped: usize,
}

/// Supremum of [`holder_ratio`] over trials `(i, j, t)` drawn from a
/// family of sticks. Pairs that break a precondition are counted and
/// skipped; an unbounded ratio is returned as an error.
pub fn holder_sup<I>(
    norm: &NormSpec,
    family: &[Stick],
    trials: I,
    q: f64,
    p: f64,
    opts: &HolderOptions,
) -> Result<HolderSummary, StickError>
where
    I: IntoIterator<Item = (usize, usize, f64)>,
{
    let mut out = HolderSummary {
        sup: 0.0,
        witness: None,
        trials: 0,
        skipped: 0,
    };
    for (i, j, t) in trials {
        let (Some(l), Some(m)) = (family.get(i), family.get(j)) else {
            return Err(StickError::Precondition(format!(
                "trial ({i}, {j}) is out of range"
            )));
        };
        match holder_ratio(norm, l, m, t, q, p, opts) {
            Ok(r) => {
                out.trials += 1;
                if out.witness.is_none() || r > out.sup {
                    out.sup = r;
                    out.witness = Some((i, j, t));
                }
            }
            Err(StickError::Precondition(_)) => out.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
