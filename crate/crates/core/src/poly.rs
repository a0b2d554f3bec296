//! Polynomial interpolation over any [`Scalar`] field.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense polynomial, `coeffs[k]` multiplies `x^k`. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

/// The unique polynomial of degree `< points.len()` through `points`,
/// via Newton divided differences.
pub fn interpolate<T: Scalar>(points: &[(T, T)]) -> Result<Polynomial<T>> {
    if points.is_empty() {
        return Err(Error::domain("interpolation needs at least one point"));
    }
    let n = points.len();
    let xs: Vec<T> = points.iter().map(|(x, _)| x.clone()).collect();
    for i in 0..n {
        for j in 0..i {
            if xs[i] == xs[j] {
                return Err(Error::domain("interpolation nodes must be distinct"));
            }
        }
    }

    let mut table: Vec<T> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (table[i].clone() - table[i - 1].clone())
                / (xs[i].clone() - xs[i - level].clone());
        }
    }

    // Expand the Newton form with Horner steps from the innermost term.
    let mut coeffs = vec![T::zero(); n];
    coeffs[0] = table[n - 1].clone();
    for k in (0..n - 1).rev() {
        let len = n - 1 - k;
        // coeffs <- coeffs * (x - xs[k]) + table[k]
        for i in (0..=len).rev() {
            let shifted = if i > 0 { coeffs[i - 1].clone() } else { T::zero() };
            let kept = if i < len { coeffs[i].clone() * xs[k].clone() } else { T::zero() };
            coeffs[i] = shifted - kept;
        }
        coeffs[0] = coeffs[0].clone() + table[k].clone();
    }
    Ok(Polynomial::new(coeffs))
}
