//! Pointwise values of vector-valued fields.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::quad::LinearValue;

/// A value in 𝕂ⁿ. Real fields store zero imaginary parts.
#[derive(Clone, PartialEq, Default)]
pub struct FieldValue(SmallVec<[Complex64; 2]>);

impl FieldValue {
    pub fn zeros(n: usize) -> Self {
        Self(SmallVec::from_elem(Complex64::new(0.0, 0.0), n))
    }

    pub fn real(x: f64) -> Self {
        Self(SmallVec::from_slice(&[Complex64::new(x, 0.0)]))
    }

    pub fn from_components(values: &[Complex64]) -> Self {
        Self(SmallVec::from_slice(values))
    }

    pub fn pair(a: Complex64, b: Complex64) -> Self {
        Self(SmallVec::from_slice(&[a, b]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    /// Max over components of `max(|re|, |im|)`.
    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max)
    }

    /// `‖self - other‖∞`; values of different length compare as infinitely far.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| {
                let d = a - b;
                d.re.abs().max(d.im.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|v| v * c).collect())
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self(self.0.iter().enumerate().map(|(i, v)| f(i, *v)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl fmt::Debug for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Index<usize> for FieldValue {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FieldValue {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for FieldValue {
    type Output = FieldValue;
    fn add(mut self, rhs: FieldValue) -> FieldValue {
        debug_assert_eq!(self.len(), rhs.len());
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for FieldValue {
    type Output = FieldValue;
    fn sub(mut self, rhs: FieldValue) -> FieldValue {
        debug_assert_eq!(self.len(), rhs.len());
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
        self
    }
}

impl Mul<f64> for FieldValue {
    type Output = FieldValue;
    fn mul(mut self, rhs: f64) -> FieldValue {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Neg for FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        self * -1.0
    }
}

impl LinearValue for FieldValue {
    fn zero_like(&self) -> Self {
        FieldValue::zeros(self.len())
    }
    fn magnitude(&self) -> f64 {
        self.norm_inf()
    }
}
