//! The modulus of geometric convexity and sampled norm constants.

pub mod estimate;
pub mod modulus;
pub mod onev;
pub mod report;
pub mod transfer;
pub mod uniform;

pub use estimate::{
    doubling_ratio, duality_residual, estimate_balanced, estimate_doubling, estimate_lambda,
    extend_constants, extend_to_radius, ExtendedConstants, RatioEstimate, SampleMode, Witness,
};
pub use modulus::{modulus, ModulusOptions, ModulusResult};
pub use onev::{onev_f, onev_g, onev_scan, OnevScan, ZGrid};
pub use report::{certify, default_uniform_exponents, CertifyOptions, ConstantsReport};
pub use transfer::{
    transfer_bounds, transfer_check, TangentConstants, TransferOptions, TransferReport,
};
pub use uniform::{estimate_uniform_constants, UniformConstants};
