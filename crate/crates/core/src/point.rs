//! Dense real vectors with optional image shape, plus the handful of
//! BLAS-1 style helpers the solvers need.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// A dense real vector. Images carry `(rows, cols)` metadata and are stored
/// row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Point {
    values: Vec<f64>,
    shape: Option<(usize, usize)>,
}

impl Point {
    pub fn new(values: Vec<f64>) -> Self {
        Point {
            values,
            shape: None,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Point::new(vec![0.0; len])
    }

    pub fn image(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Point::new(values).with_shape(rows, cols)
    }

    pub fn with_shape(mut self, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != self.values.len() {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                len: self.values.len(),
            });
        }
        self.shape = Some((rows, cols));
        Ok(self)
    }

    /// Copies the shape of `other` if the lengths agree.
    pub(crate) fn shaped_like(mut self, other: &Point) -> Self {
        if let Some((r, c)) = other.shape {
            if r * c == self.values.len() {
                self.shape = other.shape;
            }
        }
        self
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.shape
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.values, other)
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

impl From<Vec<f64>> for Point {
    fn from(values: Vec<f64>) -> Self {
        Point::new(values)
    }
}

impl From<&[f64]> for Point {
    fn from(values: &[f64]) -> Self {
        Point::new(values.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(values: [f64; N]) -> Self {
        Point::new(values.to_vec())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `from + t * (to - from)`, elementwise.
pub fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Sign with `sign(0) = 0`.
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}
