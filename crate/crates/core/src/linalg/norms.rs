use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    a.inner().clone().singular_values().iter().copied().collect()
}

/// Schatten p-norm `(sum sigma_i^p)^(1/p)`.
pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let sv = singular_values(a);
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    // Scale by the largest value so large p does not overflow.
    let sum: f64 = sv.iter().map(|s| (s / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// Operator norm: the largest singular value.
pub fn schatten_inf(a: &ComplexMatrix) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}
