//! Convergence and image quality measures.

use crate::error::{Error, Result};
use crate::point::dist;

/// Relative error of function values `(f_k − f̂)/(f_0 − f̂)`.
pub fn delta_k(f_k: f64, f_hat: f64, f_0: f64) -> Result<f64> {
    if !(f_0 > f_hat + 1e-15) {
        return Err(Error::DegenerateReference { f0: f_0, f_hat });
    }
    Ok((f_k - f_hat) / (f_0 - f_hat))
}

/// Peak signal-to-noise ratio in dB for images with values in `[0, 1]`.
/// `+∞` when the images coincide.
pub fn psnr(x: &[f64], x_true: &[f64]) -> Result<f64> {
    check(x, x_true)?;
    Ok(20.0 * ((x.len() as f64).sqrt() / dist(x, x_true)).log10())
}

/// Improvement in signal-to-noise ratio of `x` over the observation `y`.
pub fn isnr(x: &[f64], y: &[f64], x_true: &[f64]) -> Result<f64> {
    check(x, x_true)?;
    check(y, x_true)?;
    Ok(20.0 * (dist(y, x_true) / dist(x, x_true)).log10())
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            actual: a.len(),
        });
    }
    Ok(())
}
