//! Isotropic and anisotropic total variation of a row-major `m × n` image.
//!
//! With `d1 = x[i+1, j] − x[i, j]` and `d2 = x[i, j+1] − x[i, j]`:
//!
//! ```text
//! ITV(x) = Σ_{i<m, j<n} √(d1² + d2²) + Σ_{i<m} |x[i+1, n] − x[i, n]| + Σ_{j<n} |x[m, j+1] − x[m, j]|
//! ATV(x) = Σ_{i<m, j<n} (|d1| + |d2|)  + Σ_{i<m} |x[i+1, n] − x[i, n]| + Σ_{j<n} |x[m, j+1] − x[m, j]|
//! ```
//!
//! (1-based indices.) Subgradients pick zero at every kink.

use crate::error::{Error, Result};
use crate::point::{sign, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvKind {
    Isotropic,
    Anisotropic,
}

fn shape_of(x: &Point) -> Result<(usize, usize)> {
    x.shape().ok_or(Error::ShapeMissing)
}

pub fn itv(x: &Point) -> Result<f64> {
    let (m, n) = shape_of(x)?;
    Ok(tv_value(x, m, n, TvKind::Isotropic))
}

pub fn atv(x: &Point) -> Result<f64> {
    let (m, n) = shape_of(x)?;
    Ok(tv_value(x, m, n, TvKind::Anisotropic))
}

pub fn tv_subgradient(x: &Point, kind: TvKind) -> Result<Point> {
    let (m, n) = shape_of(x)?;
    let mut g = vec![0.0; x.len()];
    tv_eval(x, m, n, kind, Some(&mut g));
    Point::image(m, n, g)
}

pub(crate) fn tv_value(x: &[f64], m: usize, n: usize, kind: TvKind) -> f64 {
    tv_eval(x, m, n, kind, None)
}

/// Returns the TV value and, if `grad` is given, adds a subgradient to it.
pub(crate) fn tv_eval(x: &[f64], m: usize, n: usize, kind: TvKind, mut grad: Option<&mut [f64]>) -> f64 {
    let at = |i: usize, j: usize| i * n + j;
    let mut total = 0.0;
    for i in 0..m.saturating_sub(1) {
        for j in 0..n.saturating_sub(1) {
            let d1 = x[at(i + 1, j)] - x[at(i, j)];
            let d2 = x[at(i, j + 1)] - x[at(i, j)];
            let (w1, w2) = match kind {
                TvKind::Isotropic => {
                    let r = (d1 * d1 + d2 * d2).sqrt();
                    total += r;
                    if r > 0.0 {
                        (d1 / r, d2 / r)
                    } else {
                        (0.0, 0.0)
                    }
                }
                TvKind::Anisotropic => {
                    total += d1.abs() + d2.abs();
                    (sign(d1), sign(d2))
                }
            };
            if let Some(g) = grad.as_deref_mut() {
                g[at(i + 1, j)] += w1;
                g[at(i, j + 1)] += w2;
                g[at(i, j)] -= w1 + w2;
            }
        }
    }
    // last column, vertical differences
    if n > 0 {
        for i in 0..m.saturating_sub(1) {
            let d = x[at(i + 1, n - 1)] - x[at(i, n - 1)];
            total += d.abs();
            if let Some(g) = grad.as_deref_mut() {
                g[at(i + 1, n - 1)] += sign(d);
                g[at(i, n - 1)] -= sign(d);
            }
        }
    }
    // last row, horizontal differences
    if m > 0 {
        for j in 0..n.saturating_sub(1) {
            let d = x[at(m - 1, j + 1)] - x[at(m - 1, j)];
            total += d.abs();
            if let Some(g) = grad.as_deref_mut() {
                g[at(m - 1, j + 1)] += sign(d);
                g[at(m - 1, j)] -= sign(d);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let x = Point::image(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(itv(&x).unwrap(), 2.0);
        assert_eq!(atv(&x).unwrap(), 2.0);

        let c = Point::image(3, 4, vec![0.3; 12]).unwrap();
        assert_eq!(itv(&c).unwrap(), 0.0);
        assert_eq!(atv(&c).unwrap(), 0.0);
        assert!(tv_subgradient(&c, TvKind::Isotropic).unwrap().iter().all(|&v| v == 0.0));

        // a diagonal step separates the two
        let d = Point::image(2, 2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(itv(&d).unwrap(), 2f64.sqrt());
        assert_eq!(atv(&d).unwrap(), 2.0);
    }

    #[test]
    fn needs_shape() {
        assert!(matches!(itv(&Point::new(vec![1.0; 4])), Err(Error::ShapeMissing)));
    }

    #[test]
    fn smooth_gradient_matches_finite_differences() {
        let (m, n) = (4, 5);
        let vals: Vec<f64> = (0..m * n).map(|k| ((k / n) as f64) * 0.3 + ((k % n) as f64).powi(2) * 0.1).collect();
        let x = Point::image(m, n, vals.clone()).unwrap();
        let g = tv_subgradient(&x, TvKind::Isotropic).unwrap();
        let step = 1e-6;
        for k in 0..m * n {
            let mut p = vals.clone();
            p[k] += step;
            let mut q = vals.clone();
            q[k] -= step;
            let fd = (tv_value(&p, m, n, TvKind::Isotropic) - tv_value(&q, m, n, TvKind::Isotropic)) / (2.0 * step);
            assert!((fd - g[k]).abs() < 1e-6, "k={k}: {fd} vs {}", g[k]);
        }
    }
}
