use thiserror::Error;

/// Failures of norm evaluation and the normal map.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("dimension mismatch: norm acts on R^{expected}, got a vector in R^{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} is undefined at the origin")]
    ZeroVector { what: &'static str },
    #[error("p-norm exponent must satisfy 1 < p < inf, got {0}")]
    InvalidExponent(f64),
    #[error("norm dimension must be positive")]
    ZeroDimension,
    #[error("expected a unit vector, but its norm is {norm}")]
    NotUnit { norm: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("plug-in norms cannot be deserialized from a descriptor")]
    PluginDescriptor,
}

/// Failures of the modulus and constant estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("geometric convexity constant must exceed 2, got {0}")]
    LambdaTooSmall(f64),
    #[error("no informative samples: every sampled ratio had a denominator below the floor")]
    NoInformativeSamples,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("exponents must satisfy 1 < q <= p, got q = {q}, p = {p}")]
    InvalidExponents { p: f64, q: f64 },
    #[error("pair violates the admissible radius: |z - x| = {distance} > {limit}")]
    RadiusViolated { distance: f64, limit: f64 },
    #[error("admissibility window is empty: {0}")]
    EmptyWindow(String),
}

/// Failures of the stick operations. Precondition failures name the
/// hypothesis that was not met.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StickError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("stick has length {0}, below the degeneracy threshold")]
    Degenerate(f64),
    #[error("empty list of sticks")]
    Empty,
    #[error("bound violated: intermediate points coincide while |l1 - m1| = {numerator}")]
    Unbounded { numerator: f64 },
}

/// Failures of the distance atlas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("site set is empty")]
    EmptySites,
    #[error("query point {index} lies in the site set")]
    QueryInSites { index: usize },
    #[error("family is empty")]
    EmptyFamily,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Failures of the sharpness constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SharpnessError {
    #[error("exponent p = {0} is outside the admissible range for this construction")]
    InvalidExponent(f64),
    #[error("eps = {eps} is outside [0, 2^p - 2] = [0, {max}]")]
    EpsOutOfRange { eps: f64, max: f64 },
    #[error("delta = {0} is too large for the construction")]
    DeltaTooLarge(f64),
    #[error("x^p = {value} is outside the window [2^-p, 1/2] = [{low}, 0.5]")]
    OutsideWindow { value: f64, low: f64 },
}

/// Crate-level error, for callers that drive several modules at once.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Stick(#[from] StickError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Sharpness(#[from] SharpnessError),
    #[error("output error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
