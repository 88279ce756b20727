//! The gap function `h(x, y) = |y| - <y, N(x)>`: how far `|y|` lies above
//! the linearization of the norm at `x`.
//!
//! `h` is nonnegative, vanishes exactly when `y` is a nonnegative multiple
//! of `x`, is convex in `y`, and satisfies
//!
//! ```text
//! h(ax, y) = h(x, y),  h(ax, ay) = a h(x, y)   (a > 0),
//! h(-x, -y) = h(x, y),  h(-x, y) = h(x, -y).
//! ```
//!
//! At `x = 0` the value is taken to be 0, the largest lower
//! semicontinuous extension.

use crate::error::NormError;
use crate::norm::{NormSpec, ZERO_THRESHOLD};
use crate::vector::{dot, Vector};

impl NormSpec {
    /// `h(x, y)` without input validation.
    pub fn gap(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.normal(x) {
            Some(n) => self.gap_with_normal(&n, y),
            None => 0.0,
        }
    }

    /// `|y| - <y, n>` for a precomputed normal `n = N(x)`.
    pub fn gap_with_normal(&self, n: &[f64], y: &[f64]) -> f64 {
        let ny = self.value(y);
        let along = dot(y, n);
        if self.is_euclidean() && along > 0.0 {
            // |y|^2 - <y,n>^2 is the squared length of the component of y
            // orthogonal to the unit vector n; this form avoids cancellation.
            let perp_sq: f64 = y
                .iter()
                .zip(n)
                .map(|(yi, ni)| {
                    let r = yi - along * ni;
                    r * r
                })
                .sum();
            return perp_sq / (ny + along);
        }
        ny - along
    }
}

fn check_pair(norm: &NormSpec, x: &Vector, y: &Vector) -> Result<(), NormError> {
    norm.check(x)?;
    norm.check(y)
}

/// `h(x, y)`, with `h(0, y) = 0`.
pub fn gap(norm: &NormSpec, x: &Vector, y: &Vector) -> Result<f64, NormError> {
    check_pair(norm, x, y)?;
    Ok(norm.gap(x, y))
}

/// Residual of `|x+y| = |x| + |y| - h(x+y, x) - h(x+y, y)`.
pub fn triangle_equality_residual(
    norm: &NormSpec,
    x: &Vector,
    y: &Vector,
) -> Result<f64, NormError> {
    check_pair(norm, x, y)?;
    let s = x + y;
    let ns = norm.value(&s);
    if ns < ZERO_THRESHOLD {
        return Err(NormError::ZeroVector {
            what: "the triangle equality (x + y = 0)",
        });
    }
    let n = norm.normal(&s).expect("nonzero");
    let rhs =
        norm.value(x) + norm.value(y) - norm.gap_with_normal(&n, x) - norm.gap_with_normal(&n, y);
    Ok((ns - rhs).abs())
}

/// Residual of `|y| = |x| + h(x, y) + <y - x, N(x)>`.
pub fn linearization_identity_residual(
    norm: &NormSpec,
    x: &Vector,
    y: &Vector,
) -> Result<f64, NormError> {
    check_pair(norm, x, y)?;
    let n = norm.normal(x).ok_or(NormError::ZeroVector {
        what: "the linearization identity",
    })?;
    let diff = y - x;
    let rhs = norm.value(x) + norm.gap_with_normal(&n, y) + diff.dot(&n);
    Ok((norm.value(y) - rhs).abs())
}
