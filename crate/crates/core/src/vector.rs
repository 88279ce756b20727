//! Dense real coordinate vectors.

use std::ops::{Add, Deref, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::NormError;

/// A point of `R^n`, `n >= 1`, with finite coordinates.
///
/// Serializes as a plain JSON array of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self, NormError> {
        if coords.is_empty() {
            return Err(NormError::EmptyVector);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(NormError::NonFinite { index });
        }
        Ok(Self(coords))
    }

    /// Builds a vector from coordinates the caller knows to be finite.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector of `R^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Euclidean inner product.
    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self(self.0.iter().map(|c| a * c).collect())
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &[f64]) -> Self {
        Self(self.0.iter().zip(other).map(|(s, o)| s + a * o).collect())
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &[f64], t: f64) -> Self {
        Self(
            self.0
                .iter()
                .zip(other)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
        )
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = NormError;

    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(Vector::new(vec![]), Err(NormError::EmptyVector)));
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(NormError::NonFinite { index: 1 })
        ));
        assert!(Vector::new(vec![0.0]).is_ok());
    }

    #[test]
    fn json_is_a_plain_array() {
        let v = Vector::new(vec![1.0, -2.5]).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.0,-2.5]");
        let back: Vector = serde_json::from_str("[1.0,-2.5]").unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<Vector>("[]").is_err());
    }

    #[test]
    fn arithmetic() {
        let a = Vector::new(vec![1.0, 2.0]).unwrap();
        let b = Vector::new(vec![3.0, -1.0]).unwrap();
        assert_eq!((&a + &b).as_slice(), &[4.0, 1.0]);
        assert_eq!((&a - &b).as_slice(), &[-2.0, 3.0]);
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(a.lerp(&b, 0.5).as_slice(), &[2.0, 0.5]);
        assert_eq!(a.axpy(2.0, &b).as_slice(), &[7.0, 0.0]);
    }
}
