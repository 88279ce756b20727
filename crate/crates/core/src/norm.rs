//! Norms on `R^n`: evaluation, the normal map `N(x) = D|x|`, and the
//! decomposition of a vector along `x` and the tangent plane at `x`.
//!
//! Three kinds of norm are supported: the Euclidean norm, the `p`-norms
//! with `1 < p < inf`, and plug-in norms that only supply evaluation. For
//! plug-ins the normal map falls back to Richardson-extrapolated central
//! differences.
//!
//! The normal map satisfies, for `x != 0` and `t > 0`,
//!
//! ```text
//! <x, N(x)> = |x|,   N(tx) = N(x),   N(-x) = -N(x),   <y, N(x)> <= |y|.
//! ```

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::NormError;
use crate::sampling::{gaussian, sample_rng};
use crate::vector::{dot, max_abs, Vector};

/// Vectors with norm below this are treated as the origin.
pub const ZERO_THRESHOLD: f64 = 1e-300;

/// Allowed deviation of `|x|` from 1 for inputs that must be unit vectors.
pub const UNIT_TOLERANCE: f64 = 1e-7;

/// A user-supplied norm. Only evaluation is required.
///
/// The implementation must be positively homogeneous and symmetric;
/// [`validate_norm`] samples both properties.
pub trait PluginNorm: Send + Sync {
    fn name(&self) -> &str;
    fn eval(&self, x: &[f64]) -> f64;
}

#[derive(Clone)]
pub enum NormKind {
    Euclidean,
    /// `|x|_p = (sum |x_i|^p)^(1/p)`.
    PNorm {
        p: f64,
    },
    Plugin(Arc<dyn PluginNorm>),
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Euclidean => write!(f, "Euclidean"),
            NormKind::PNorm { p } => write!(f, "PNorm {{ p: {p} }}"),
            NormKind::Plugin(n) => write!(f, "Plugin({:?})", n.name()),
        }
    }
}

/// A norm on `R^dim`.
#[derive(Debug, Clone)]
pub struct NormSpec {
    kind: NormKind,
    dim: usize,
    /// Exponent with an integral value, evaluated with `powi`.
    int_p: Option<i32>,
}

impl NormSpec {
    pub fn euclidean(dim: usize) -> Result<Self, NormError> {
        if dim == 0 {
            return Err(NormError::ZeroDimension);
        }
        Ok(Self {
            kind: NormKind::Euclidean,
            dim,
            int_p: None,
        })
    }

    pub fn p_norm(p: f64, dim: usize) -> Result<Self, NormError> {
        if dim == 0 {
            return Err(NormError::ZeroDimension);
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(NormError::InvalidExponent(p));
        }
        let int_p = (p.fract() == 0.0 && p <= 64.0).then_some(p as i32);
        Ok(Self {
            kind: NormKind::PNorm { p },
            dim,
            int_p,
        })
    }

    pub fn plugin(norm: Arc<dyn PluginNorm>, dim: usize) -> Result<Self, NormError> {
        if dim == 0 {
            return Err(NormError::ZeroDimension);
        }
        Ok(Self {
            kind: NormKind::Plugin(norm),
            dim,
            int_p: None,
        })
    }

    /// Parses the command-line form: `euclidean` or `p:<value>`.
    pub fn parse(s: &str, dim: usize) -> Result<Self, NormError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("euclidean") || s == "l2" {
            return Self::euclidean(dim);
        }
        match s.strip_prefix("p:") {
            Some(p) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| NormError::InvalidExponent(f64::NAN))?;
                Self::p_norm(p, dim)
            }
            None => Err(NormError::InvalidExponent(f64::NAN)),
        }
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The exponent of a `p`-norm; 2 for the Euclidean norm.
    pub fn exponent(&self) -> Option<f64> {
        match self.kind {
            NormKind::Euclidean => Some(2.0),
            NormKind::PNorm { p } => Some(p),
            NormKind::Plugin(_) => None,
        }
    }

    /// Short label such as `euclidean` or `p:3`.
    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Euclidean => "euclidean".to_string(),
            NormKind::PNorm { p } => format!("p:{p}"),
            NormKind::Plugin(n) => format!("plugin:{}", n.name()),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, NormKind::Euclidean)
    }

    /// The same norm acting on a different dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self, NormError> {
        if dim == 0 {
            return Err(NormError::ZeroDimension);
        }
        Ok(Self {
            dim,
            ..self.clone()
        })
    }

    pub(crate) fn check(&self, x: &[f64]) -> Result<(), NormError> {
        if x.len() != self.dim {
            return Err(NormError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if let Some(index) = x.iter().position(|c| !c.is_finite()) {
            return Err(NormError::NonFinite { index });
        }
        Ok(())
    }

    /// `|x|`, without input validation.
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Euclidean => dot(x, x).sqrt(),
            NormKind::PNorm { p } => {
                let m = max_abs(x);
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = match self.int_p {
                    Some(k) => x.iter().map(|c| (c.abs() / m).powi(k)).sum(),
                    None => x.iter().map(|c| (c.abs() / m).powf(*p)).sum(),
                };
                m * s.powf(1.0 / p)
            }
            NormKind::Plugin(n) => n.eval(x),
        }
    }

    /// `N(x)`, or `None` at (numerically) the origin. No input validation.
    pub fn normal(&self, x: &[f64]) -> Option<Vector> {
        let nx = self.value(x);
        if !(nx >= ZERO_THRESHOLD) {
            return None;
        }
        let coords = match &self.kind {
            NormKind::Euclidean => x.iter().map(|c| c / nx).collect(),
            NormKind::PNorm { p } => match self.int_p {
                Some(k) => x
                    .iter()
                    .map(|c| c.signum() * (c.abs() / nx).powi(k - 1))
                    .collect(),
                None => x
                    .iter()
                    .map(|c| {
                        if *c == 0.0 {
                            0.0
                        } else {
                            c.signum() * (c.abs() / nx).powf(p - 1.0)
                        }
                    })
                    .collect(),
            },
            NormKind::Plugin(_) => return Some(self.richardson_gradient(x, nx)),
        };
        Some(Vector::from_raw(coords))
    }

    fn richardson_gradient(&self, x: &[f64], nx: f64) -> Vector {
        let h = 1e-3 * nx.max(max_abs(x));
        let coarse = central_difference(self, x, h);
        let fine = central_difference(self, x, 0.5 * h);
        Vector::from_raw(
            coarse
                .iter()
                .zip(&fine)
                .map(|(c, f)| (4.0 * f - c) / 3.0)
                .collect(),
        )
    }
}

fn central_difference(norm: &NormSpec, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let xi = x[i];
            probe[i] = xi + h;
            let up = norm.value(&probe);
            probe[i] = xi - h;
            let down = norm.value(&probe);
            probe[i] = xi;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Wire form of a norm: `{"kind":"p_norm","p":3.0,"dim":3}` or
/// `{"kind":"euclidean","dim":2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormDescriptor {
    Euclidean { dim: usize },
    PNorm { p: f64, dim: usize },
    Plugin { name: String, dim: usize },
}

impl NormSpec {
    pub fn descriptor(&self) -> NormDescriptor {
        match &self.kind {
            NormKind::Euclidean => NormDescriptor::Euclidean { dim: self.dim },
            NormKind::PNorm { p } => NormDescriptor::PNorm {
                p: *p,
                dim: self.dim,
            },
            NormKind::Plugin(n) => NormDescriptor::Plugin {
                name: n.name().to_string(),
                dim: self.dim,
            },
        }
    }
}

impl TryFrom<NormDescriptor> for NormSpec {
    type Error = NormError;

    fn try_from(d: NormDescriptor) -> Result<Self, NormError> {
        match d {
            NormDescriptor::Euclidean { dim } => NormSpec::euclidean(dim),
            NormDescriptor::PNorm { p, dim } => NormSpec::p_norm(p, dim),
            NormDescriptor::Plugin { .. } => Err(NormError::PluginDescriptor),
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.descriptor().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let d = NormDescriptor::deserialize(deserializer)?;
        NormSpec::try_from(d).map_err(D::Error::custom)
    }
}

/// `|x|`. Homogeneous of degree one and zero only at the origin.
pub fn eval_norm(norm: &NormSpec, x: &Vector) -> Result<f64, NormError> {
    norm.check(x)?;
    Ok(norm.value(x))
}

/// The normal map `N(x)`, the gradient of the norm at `x != 0`.
///
/// For `p`-norms this is the closed form
/// `N(x)_i = sign(x_i) |x_i|^(p-1) / |x|_p^(p-1)`.
pub fn normal_map(norm: &NormSpec, x: &Vector) -> Result<Vector, NormError> {
    norm.check(x)?;
    norm.normal(x).ok_or(NormError::ZeroVector {
        what: "the normal map",
    })
}

/// `y = alpha x + epsilon x_perp` with `alpha = <y, N(x)>`, `epsilon >= 0`,
/// `|x_perp| = 1` and `<x_perp, N(x)> = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentDecomposition {
    pub alpha: f64,
    pub epsilon: f64,
    /// Absent when `y` is a multiple of `x`.
    pub x_perp: Option<Vector>,
}

impl TangentDecomposition {
    pub fn reconstruct(&self, x: &[f64]) -> Vector {
        let base = Vector::from_raw(x.iter().map(|c| self.alpha * c).collect());
        match &self.x_perp {
            Some(p) => base.axpy(self.epsilon, p),
            None => base,
        }
    }
}

/// Splits `y` along the unit vector `x` and the tangent plane
/// `{v : <v, N(x)> = 0}`.
pub fn tangent_decompose(
    norm: &NormSpec,
    x: &Vector,
    y: &Vector,
) -> Result<TangentDecomposition, NormError> {
    norm.check(x)?;
    norm.check(y)?;
    let nx = norm.value(x);
    if nx < ZERO_THRESHOLD {
        return Err(NormError::ZeroVector {
            what: "the tangent decomposition",
        });
    }
    if (nx - 1.0).abs() > UNIT_TOLERANCE {
        return Err(NormError::NotUnit { norm: nx });
    }
    let n = norm.normal(x).expect("x is nonzero");
    Ok(decompose_unchecked(norm, x, &n, y))
}

pub(crate) fn decompose_unchecked(
    norm: &NormSpec,
    x: &[f64],
    n: &[f64],
    y: &[f64],
) -> TangentDecomposition {
    let alpha = dot(y, n);
    let rest = Vector::from_raw(y.iter().zip(x).map(|(yi, xi)| yi - alpha * xi).collect());
    let epsilon = norm.value(&rest);
    if epsilon <= 1e-12 * (1.0 + norm.value(y)) {
        return TangentDecomposition {
            alpha,
            epsilon: 0.0,
            x_perp: None,
        };
    }
    TangentDecomposition {
        alpha,
        epsilon,
        x_perp: Some(rest.scale(1.0 / epsilon)),
    }
}

/// Central-difference approximation of `D|x|` with the given step.
pub fn finite_diff_gradient(norm: &NormSpec, x: &Vector, step: f64) -> Result<Vector, NormError> {
    norm.check(x)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(NormError::InvalidStep(step));
    }
    if norm.value(x) < ZERO_THRESHOLD {
        return Err(NormError::ZeroVector {
            what: "the gradient of the norm",
        });
    }
    Ok(Vector::from_raw(central_difference(norm, x, step)))
}

/// Worst value of one sampled check, with the sample that produced it.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Residual {
    pub worst: f64,
    pub witness: Option<Vector>,
}

impl Residual {
    fn record(&mut self, value: f64, at: &[f64]) {
        if value > self.worst || (self.witness.is_none() && value >= self.worst) {
            self.worst = value;
            self.witness = Some(Vector::from_raw(at.to_vec()));
        }
    }
}

/// Sampled residuals of the norm axioms and normal-map identities.
/// All residuals are relative to the magnitudes involved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormValidation {
    pub samples: usize,
    /// `| |tx| - t|x| |`.
    pub homogeneity: Residual,
    /// `| |x| - |-x| |`.
    pub symmetry: Residual,
    /// `max(0, |x+y| - |x| - |y|)`.
    pub triangle: Residual,
    /// `| <x, N(x)> - |x| |`.
    pub euler: Residual,
    /// `max(0, <y, N(x)> - |y|)`.
    pub support: Residual,
    /// `|N(tx) - N(x)|_inf` for `t > 0`.
    pub normal_homogeneity: Residual,
    /// `|N(-x) + N(x)|_inf`.
    pub normal_oddness: Residual,
}

impl NormValidation {
    pub fn worst(&self) -> f64 {
        [
            &self.homogeneity,
            &self.symmetry,
            &self.triangle,
            &self.euler,
            &self.support,
            &self.normal_homogeneity,
            &self.normal_oddness,
        ]
        .iter()
        .map(|r| r.worst)
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.worst() <= tol
    }
}

/// Checks homogeneity, symmetry, the triangle inequality and the
/// normal-map identities on `samples` random inputs. Never fails; a
/// violated property shows up as a large residual.
pub fn validate_norm(norm: &NormSpec, samples: usize, seed: u64) -> NormValidation {
    let mut v = NormValidation {
        samples,
        homogeneity: Residual::default(),
        symmetry: Residual::default(),
        triangle: Residual::default(),
        euler: Residual::default(),
        support: Residual::default(),
        normal_homogeneity: Residual::default(),
        normal_oddness: Residual::default(),
    };
    let dim = norm.dim();
    for i in 0..samples.max(1) {
        let mut rng = sample_rng(seed, i as u64);
        let x = gaussian(&mut rng, dim);
        let y = gaussian(&mut rng, dim);
        let t = rand::Rng::gen_range(&mut rng, 0.1..10.0);
        let nx = norm.value(&x);
        let ny = norm.value(&y);
        let scale = 1.0 + nx;

        let tx = x.scale(t);
        v.homogeneity
            .record((norm.value(&tx) - t * nx).abs() / (1.0 + t * nx), &x);
        let neg = -&x;
        v.symmetry.record((nx - norm.value(&neg)).abs() / scale, &x);
        v.triangle.record(
            (norm.value(&(&x + &y)) - nx - ny).max(0.0) / (1.0 + nx + ny),
            &x,
        );

        let (Some(n), Some(ntx), Some(nneg)) =
            (norm.normal(&x), norm.normal(&tx), norm.normal(&neg))
        else {
            continue;
        };
        v.euler.record((x.dot(&n) - nx).abs() / scale, &x);
        v.support.record((y.dot(&n) - ny).max(0.0) / (1.0 + ny), &x);
        let inf_diff = |a: &Vector, b: &Vector, sign: f64| {
            a.iter()
                .zip(b.iter())
                .fold(0.0_f64, |m, (p, q)| m.max((p - sign * q).abs()))
        };
        v.normal_homogeneity.record(inf_diff(&ntx, &n, 1.0), &x);
        v.normal_oddness.record(inf_diff(&nneg, &n, -1.0), &x);
    }
    v
}
