//! Sticks, the two sticks condition and the estimates built on it.
//!
//! A stick `[a, b]` is a directed segment; swapping its ends gives a
//! different stick. Two sticks `l = [l0, l1]` and `m = [m0, m1]` satisfy
//! the two sticks condition when
//!
//! ```text
//! |l1 - m0| >= |l1 - l0|   and   |m1 - l0| >= |m1 - m0|,
//! ```
//!
//! which is what nearest-point data produce: if `l0` is a point of a set
//! `C` nearest to `l1` and `m0` one nearest to `m1`, the pair qualifies.

use serde::{Deserialize, Serialize};

use crate::error::StickError;
use crate::norm::NormSpec;
use crate::vector::Vector;

pub mod euclid;
pub mod holder;
pub mod strip;

pub use euclid::{euclid_interp_bound_residual, euclid_lipschitz_ratio, euclid_monotonicity};
pub use holder::{holder_ratio, holder_sup, HolderOptions, HolderSummary};
pub use strip::{select_special_stick, strip_experiment, StripParams, StripReport};

/// Sticks shorter than this are degenerate.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

/// Relative slack on each inequality of the two sticks condition.
pub const PREDICATE_SLACK: f64 = 1e-12;

/// Slack for theorem inequalities, relative to the magnitudes involved.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// The directed segment from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stick {
    pub start: Vector,
    pub end: Vector,
}

impl Stick {
    pub fn new(start: Vector, end: Vector) -> Result<Self, StickError> {
        if start.dim() != end.dim() {
            return Err(crate::error::NormError::DimensionMismatch {
                expected: start.dim(),
                found: end.dim(),
            }
            .into());
        }
        Ok(Self { start, end })
    }

    /// `(1 - t) start + t end`. Values of `t` outside `[0, 1]` extrapolate.
    pub fn point_at(&self, t: f64) -> Vector {
        self.start.lerp(&self.end, t)
    }

    /// The same segment traversed the other way.
    pub fn reversed(&self) -> Self {
        Self {
            start: self.end.clone(),
            end: self.start.clone(),
        }
    }

    /// The sub-stick `[point_at(a), point_at(b)]`.
    pub fn sub(&self, a: f64, b: f64) -> Self {
        Self {
            start: self.point_at(a),
            end: self.point_at(b),
        }
    }

    /// `end - start`.
    pub fn direction(&self) -> Vector {
        &self.end - &self.start
    }

    pub fn length(&self, norm: &NormSpec) -> f64 {
        norm.value(&self.direction())
    }

    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    /// The stick scaled by `a` about the origin.
    pub fn scaled(&self, a: f64) -> Self {
        Self {
            start: self.start.scale(a),
            end: self.end.scale(a),
        }
    }

    pub(crate) fn check(&self, norm: &NormSpec) -> Result<(), StickError> {
        norm.check(&self.start)?;
        norm.check(&self.end)?;
        Ok(())
    }
}

/// `point_at` as a free function.
pub fn point_at(l: &Stick, t: f64) -> Vector {
    l.point_at(t)
}

fn dist(norm: &NormSpec, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm.value(&d)
}

fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - PREDICATE_SLACK * (1.0 + rhs.abs())
}

/// The two sticks condition, with a relative slack of `1e-12` on each
/// inequality.
pub fn two_sticks_check(norm: &NormSpec, l: &Stick, m: &Stick) -> bool {
    at_least(dist(norm, &l.end, &m.start), dist(norm, &l.end, &l.start))
        && at_least(dist(norm, &m.end, &l.start), dist(norm, &m.end, &m.start))
}

/// Whether the lengths agree to a relative tolerance.
pub fn equal_length(norm: &NormSpec, l: &Stick, m: &Stick, tol: f64) -> bool {
    let (a, b) = (l.length(norm), m.length(norm));
    (a - b).abs() <= tol * (1.0 + a.max(b))
}

pub(crate) fn require_pair(
    norm: &NormSpec,
    l: &Stick,
    m: &Stick,
    equal: bool,
) -> Result<f64, StickError> {
    l.check(norm)?;
    m.check(norm)?;
    let len = l.length(norm);
    for s in [l, m] {
        let d = s.length(norm);
        if d < DEGENERATE_LENGTH {
            return Err(StickError::Degenerate(d));
        }
    }
    if !two_sticks_check(norm, l, m) {
        return Err(StickError::Precondition(
            "the sticks do not satisfy the two sticks condition".into(),
        ));
    }
    if equal && !equal_length(norm, l, m, 1e-9) {
        return Err(StickError::Precondition(format!(
            "the sticks have different lengths {} and {}",
            len,
            m.length(norm)
        )));
    }
    Ok(len)
}

/// One pair in the chain of flipped and restricted sticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStage {
    pub label: String,
    pub l: Stick,
    pub m: Stick,
    /// Both sticks have length below the degeneracy threshold.
    pub degenerate: bool,
    pub two_sticks: bool,
    pub equal_length: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStatus {
    Passed,
    /// Nothing failed, but some stage had zero-length sticks.
    Degenerate,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipReport {
    pub s: f64,
    pub t: f64,
    pub stages: Vec<ChainStage>,
    /// `|m_s - l_t| - |m_s - m_t|`, nonnegative when the pair qualifies.
    pub cross_margin_m: f64,
    /// `|l_s - m_t| - |l_s - l_t|`.
    pub cross_margin_l: f64,
    pub status: ChainStatus,
}

/// Verifies that flipping and restricting an equal-length two sticks pair
/// keeps both conditions:
///
/// ```text
/// [l0,l1],[m0,m1] -> [l1,l0],[m1,m0] -> [l1,lt],[m1,mt] -> [lt,l1],[mt,m1] -> [lt,ls],[mt,ms]
/// ```
///
/// and the two cross inequalities `|m_s - l_t| >= |m_s - m_t|`,
/// `|l_s - m_t| >= |l_s - l_t|`.
pub fn flip_chain_verify(
    norm: &NormSpec,
    l: &Stick,
    m: &Stick,
    s: f64,
    t: f64,
) -> Result<FlipReport, StickError> {
    require_pair(norm, l, m, true)?;
    for (name, v) in [("s", s), ("t", t)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(StickError::Precondition(format!(
                "{name} = {v} is outside [0, 1]"
            )));
        }
    }
    let pairs = [
        ("original", l.clone(), m.clone()),
        ("flipped", l.reversed(), m.reversed()),
        (
            "flipped prefix",
            l.reversed().sub(0.0, 1.0 - t),
            m.reversed().sub(0.0, 1.0 - t),
        ),
        ("suffix", l.sub(t, 1.0), m.sub(t, 1.0)),
        ("middle", l.sub(t, s), m.sub(t, s)),
    ];
    let stages: Vec<ChainStage> = pairs
        .into_iter()
        .map(|(label, a, b)| {
            let degenerate =
                a.length(norm) < DEGENERATE_LENGTH && b.length(norm) < DEGENERATE_LENGTH;
            ChainStage {
                label: label.to_string(),
                two_sticks: two_sticks_check(norm, &a, &b),
                equal_length: equal_length(norm, &a, &b, 1e-9),
                degenerate,
                l: a,
                m: b,
            }
        })
        .collect();
    let (ls, lt, ms, mt) = (l.point_at(s), l.point_at(t), m.point_at(s), m.point_at(t));
    let cross_margin_m = dist(norm, &ms, &lt) - dist(norm, &ms, &mt);
    let cross_margin_l = dist(norm, &ls, &mt) - dist(norm, &ls, &lt);
    let cross_ok = [cross_margin_m, cross_margin_l]
        .iter()
        .all(|c| *c >= -PREDICATE_SLACK * (1.0 + l.length(norm)));
    let failed = !cross_ok || stages.iter().any(|st| !(st.two_sticks && st.equal_length));
    let status = if failed {
        ChainStatus::Failed
    } else if stages.iter().any(|st| st.degenerate) {
        ChainStatus::Degenerate
    } else {
        ChainStatus::Passed
    };
    Ok(FlipReport {
        s,
        t,
        stages,
        cross_margin_m,
        cross_margin_l,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn stick(a: &[f64], b: &[f64]) -> Stick {
        Stick::new(
            Vector::new(a.to_vec()).unwrap(),
            Vector::new(b.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn points_and_reparametrization() {
        let l = stick(&[0.0, 0.0], &[2.0, 0.0]);
        assert_eq!(l.point_at(0.0), l.start);
        assert_eq!(l.point_at(1.0), l.end);
        assert_eq!(l.point_at(0.5).as_slice(), &[1.0, 0.0]);
        // the reversed stick at 1 - t, and the suffix from t at (s-t)/(1-t)
        let (t, s) = (0.3, 0.8);
        let rev = l.reversed().point_at(1.0 - t);
        assert!((&rev - &l.point_at(t)).max_abs() < 1e-15);
        let hat = l.sub(t, 1.0).point_at((s - t) / (1.0 - t));
        assert!((&hat - &l.point_at(s)).max_abs() < 1e-15);
    }

    #[test]
    fn predicate_examples() {
        let e = NormSpec::euclidean(2).unwrap();
        let l = stick(&[0.0, 0.0], &[1.0, 0.0]);
        let m = stick(&[0.0, 0.0], &[-0.3, 5.0]);
        assert!(two_sticks_check(&e, &l, &m));
        let one = NormSpec::euclidean(1).unwrap();
        assert!(two_sticks_check(
            &one,
            &stick(&[0.0], &[1.0]),
            &stick(&[0.0], &[2.0])
        ));
        let swapped = stick(&[1.0, 0.0], &[0.0, 0.0]);
        assert!(!two_sticks_check(&e, &l, &swapped));
    }

    #[test]
    fn json_shape() {
        let l = stick(&[0.0, 1.0], &[2.0, 3.0]);
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"start":[0.0,1.0],"end":[2.0,3.0]}"#);
        let back: Stick = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn chain_identity_and_degenerate() {
        let e = NormSpec::euclidean(2).unwrap();
        let l = stick(&[0.0, 0.0], &[1.0, 0.0]);
        let m = stick(&[0.0, 1.0], &[1.0, 1.0]);
        let rep = flip_chain_verify(&e, &l, &m, 1.0, 0.0).unwrap();
        assert_eq!(rep.status, ChainStatus::Passed);
        assert_eq!(rep.stages[4].l, l);
        let rep = flip_chain_verify(&e, &l, &m, 0.4, 0.4).unwrap();
        assert_eq!(rep.status, ChainStatus::Degenerate);
        assert!(flip_chain_verify(&e, &l, &stick(&[0.0, 1.0], &[3.0, 1.0]), 1.0, 0.0).is_err());
    }
}
