//! All sampled constants of a norm in one serializable record.

use serde::{Deserialize, Serialize};

use crate::error::ModuliError;
use crate::moduli::estimate::{
    estimate_balanced, estimate_doubling, estimate_lambda, SampleMode, Witness,
};
use crate::moduli::uniform::estimate_uniform_constants;
use crate::norm::{NormDescriptor, NormSpec};

/// Inputs to [`certify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Radius for the convexity and doubling constants.
    pub r: f64,
    /// Radius `R` for the balanced constant.
    pub balanced_radius: f64,
    pub mode: SampleMode,
    pub samples: usize,
    pub seed: u64,
    /// Exponents for `A` and `B`; `None` picks `(max(p, 2), min(p, 2))`
    /// for a `p`-norm and `(2, 2)` otherwise.
    pub uniform_exponents: Option<(f64, f64)>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            r: 0.25,
            balanced_radius: 1.0,
            mode: SampleMode::Tangent,
            samples: 100_000,
            seed: 0,
            uniform_exponents: None,
        }
    }
}

/// Extremal sample for one constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedWitness {
    pub constant: String,
    #[serde(flatten)]
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub norm: NormDescriptor,
    pub mode: SampleMode,
    pub lambda_hat: f64,
    pub r: f64,
    pub t_hat: f64,
    pub k_hat: f64,
    pub balanced_radius: f64,
    pub a_hat: f64,
    pub p: f64,
    pub b_hat: f64,
    pub q: f64,
    pub samples: usize,
    pub seed: u64,
    /// Informative samples behind `lambda_hat`/`t_hat` and `k_hat`.
    pub informative: [usize; 2],
    pub worst_witnesses: Vec<NamedWitness>,
    /// RFC 3339 time of the run. Not part of the determinism contract.
    pub timestamp: String,
}

impl ConstantsReport {
    /// True when the sampled convexity constant exceeds 2.
    pub fn geometrically_convex(&self) -> bool {
        self.lambda_hat > 2.0
    }
}

/// Default exponents for the uniform constants.
pub fn default_uniform_exponents(norm: &NormSpec) -> (f64, f64) {
    match norm.exponent() {
        Some(p) if p >= 2.0 => (p, 2.0),
        Some(p) => (2.0, p),
        None => (2.0, 2.0),
    }
}

/// Runs every estimator with one seed.
pub fn certify(norm: &NormSpec, opts: &CertifyOptions) -> Result<ConstantsReport, ModuliError> {
    let lambda = estimate_lambda(norm, opts.r, opts.mode, opts.samples, opts.seed)?;
    let doubling = estimate_doubling(norm, opts.r, opts.mode, opts.samples, opts.seed)?;
    let balanced = estimate_balanced(
        norm,
        opts.balanced_radius,
        opts.mode,
        opts.samples,
        opts.seed,
    )?;
    let (p, q) = opts
        .uniform_exponents
        .unwrap_or_else(|| default_uniform_exponents(norm));
    let uniform = estimate_uniform_constants(norm, p, q, opts.samples, opts.seed)?;

    let named = |constant: &str, witness: Witness| NamedWitness {
        constant: constant.to_string(),
        witness,
    };
    Ok(ConstantsReport {
        norm: norm.descriptor(),
        mode: opts.mode,
        lambda_hat: lambda.value,
        r: opts.r,
        t_hat: doubling.value,
        k_hat: balanced.value,
        balanced_radius: opts.balanced_radius,
        a_hat: uniform.a_hat,
        p,
        b_hat: uniform.b_hat,
        q,
        samples: opts.samples,
        seed: opts.seed,
        informative: [lambda.informative, balanced.informative],
        worst_witnesses: vec![
            named("lambda", lambda.witness),
            named("t", doubling.witness),
            named("k", balanced.witness),
            named("a", uniform.a_witness),
            named("b", uniform.b_witness),
        ],
        timestamp: chrono::Utc::now().to_rfc3339(),
    })
}
