//! Numerical geometry of the two sticks problem for norms on `R^n`.
//!
//! A stick is a directed segment `[l0, l1]`. Two sticks satisfy the two
//! sticks condition when each far end is at least as far from the other
//! stick's start as from its own, which is what rays of a distance
//! function produce. This crate evaluates the objects that control how
//! far apart the far ends of such sticks can be:
//!
//! - [`norm`]: norms, the normal map `N(x) = D|x|` and tangent splitting;
//! - [`gap`]: `h(x, y) = |y| - <y, N(x)>` and its identities;
//! - [`moduli`]: the modulus `sigma(x, t)`, sampled constants and the
//!   one-variable lemma for `p`-norms;
//! - [`sticks`]: the two sticks predicate and the endpoint estimates;
//! - [`atlas`]: stick families from nearest points of finite sets;
//! - [`sharpness`]: explicit `p`-norm triples showing the Hölder
//!   exponent is optimal.
//!
//! ```
//! use minkowski_sticks::norm::NormSpec;
//! use minkowski_sticks::vector::Vector;
//!
//! let n = NormSpec::p_norm(3.0, 2).unwrap();
//! let x = Vector::new(vec![1.0, 0.0]).unwrap();
//! let y = Vector::new(vec![1.0, 0.5]).unwrap();
//! assert!(n.gap(&x, &y) > 0.0);
//! ```

pub mod atlas;
pub mod error;
pub mod gap;
pub mod moduli;
pub mod norm;
pub mod sampling;
pub mod sharpness;
pub mod sticks;
pub mod vector;

pub use error::Error;
pub use norm::NormSpec;
pub use sticks::{two_sticks_check, Stick};
pub use vector::Vector;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/norms.md")]
    pub struct Norms;
    #[doc = include_str!("../../../book/src/moduli.md")]
    pub struct Moduli;
    #[doc = include_str!("../../../book/src/two-sticks.md")]
    pub struct TwoSticks;
    #[doc = include_str!("../../../book/src/strip.md")]
    pub struct Strip;
    #[doc = include_str!("../../../book/src/atlas.md")]
    pub struct Atlas;
    #[doc = include_str!("../../../book/src/sharpness.md")]
    pub struct Sharpness;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
