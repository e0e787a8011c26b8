//! Dense univariate polynomial helpers, generic over the coefficient ring.
//!
//! Coefficient vectors are ascending: `coeffs[k]` multiplies `x^k`.

use num_complex::Complex64;
use num_traits::Zero;
use std::ops::{Add, Mul};

/// Degree after trimming trailing zeros; `None` for the zero polynomial.
pub fn degree<T: Zero>(coeffs: &[T]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// Convolution product of two coefficient vectors.
pub fn mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// Horner evaluation.
pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Coefficients of the derivative.
pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// l¹ norm of the coefficient vector.
pub fn coeff_norm(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).sum()
}
