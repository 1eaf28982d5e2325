//! Dense parameter vectors for positions, momenta and gradients.

use crate::error::{EcdError, Result};
use serde::{Deserialize, Serialize};

/// An n-dimensional point in parameter space. The same shape is used for
/// momenta and gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParameterVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        ParameterVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Euclidean norm, rejecting non-finite components.
    pub fn norm_checked(&self) -> Result<f64> {
        if !self.is_finite() {
            return Err(EcdError::NonFiniteValue("vector_norm"));
        }
        Ok(self.norm())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        ParameterVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn scale_mut(&mut self, s: f64) {
        for x in &mut self.0 {
            *x *= s;
        }
    }

    /// self += a * x
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, xi) in self.0.iter_mut().zip(x.iter()) {
            *s += a * xi;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        ParameterVector(self.0.iter().zip(other.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        ParameterVector(v)
    }
}

impl From<&[f64]> for ParameterVector {
    fn from(v: &[f64]) -> Self {
        ParameterVector(v.to_vec())
    }
}

impl std::ops::Index<usize> for ParameterVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for ParameterVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pythagorean_norm() {
        assert_relative_eq!(ParameterVector::new(vec![3.0, 4.0]).norm(), 5.0);
    }

    #[test]
    fn zero_vector_norm_is_zero() {
        for n in [1, 2, 10, 100] {
            assert_eq!(ParameterVector::zeros(n).norm(), 0.0);
        }
    }

    #[test]
    fn unit_components_norm() {
        assert_relative_eq!(ParameterVector::new(vec![1.0, 1.0, 1.0, 1.0]).norm(), 2.0);
    }

    #[test]
    fn norm_checked_rejects_non_finite() {
        let v = ParameterVector::new(vec![1.0, f64::NAN]);
        assert!(matches!(v.norm_checked(), Err(crate::EcdError::NonFiniteValue(_))));
        let v = ParameterVector::new(vec![f64::INFINITY]);
        assert!(v.norm_checked().is_err());
    }

    #[test]
    fn axpy_and_sub() {
        let mut a = ParameterVector::new(vec![1.0, 2.0]);
        let b = ParameterVector::new(vec![3.0, -1.0]);
        a.axpy(2.0, &b);
        assert_eq!(a.as_slice(), &[7.0, 0.0]);
        assert_eq!(a.sub(&b).as_slice(), &[4.0, 1.0]);
    }
}
