use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A linear operator `A: ℝ^{n_in} → ℝ^{n_out}` with its adjoint.
pub trait LinearMap: Debug + Send + Sync {
    /// `(n_in, n_out)`.
    fn dims(&self) -> (usize, usize);
    fn forward(&self, x: &[f64], out: &mut [f64]);
    fn adjoint(&self, y: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dims().1];
        self.forward(x, &mut out);
        out
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dims().0];
        self.adjoint(y, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identity(pub usize);

impl LinearMap for Identity {
    fn dims(&self) -> (usize, usize) {
        (self.0, self.0)
    }
    fn forward(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(pub DMatrix<f64>);

impl LinearMap for DenseMatrix {
    fn dims(&self) -> (usize, usize) {
        (self.0.ncols(), self.0.nrows())
    }
    fn forward(&self, x: &[f64], out: &mut [f64]) {
        let r = &self.0 * DVector::from_column_slice(x);
        out.copy_from_slice(r.as_slice());
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        let r = self.0.tr_mul(&DVector::from_column_slice(y));
        out.copy_from_slice(r.as_slice());
    }
}

/// 2-D convolution of a row-major `rows × cols` image with periodic
/// boundary. The kernel is centered at `(kh / 2, kw / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution2D {
    rows: usize,
    cols: usize,
    kernel: Vec<f64>,
    kh: usize,
    kw: usize,
}

impl Convolution2D {
    pub fn new(rows: usize, cols: usize, kernel: Vec<f64>, kh: usize, kw: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || kh == 0 || kw == 0 {
            return Err(Error::InvalidParameter("convolution sizes must be positive".into()));
        }
        if kernel.len() != kh * kw {
            return Err(Error::ShapeMismatch {
                rows: kh,
                cols: kw,
                len: kernel.len(),
            });
        }
        if kh > rows || kw > cols {
            return Err(Error::InvalidParameter("kernel larger than image".into()));
        }
        Ok(Convolution2D {
            rows,
            cols,
            kernel,
            kh,
            kw,
        })
    }

    /// `size × size` kernel with all entries `1/size²`.
    pub fn uniform_kernel(size: usize) -> Vec<f64> {
        vec![1.0 / (size * size) as f64; size * size]
    }

    /// `size × size` Gaussian kernel with standard deviation `sigma`,
    /// normalized to sum 1.
    pub fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
        let c = (size / 2) as f64;
        let mut k: Vec<f64> = (0..size * size)
            .map(|idx| {
                let (p, q) = ((idx / size) as f64 - c, (idx % size) as f64 - c);
                (-(p * p + q * q) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let s: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= s);
        k
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `out[i, j] = Σ k[p, q] · x[i + sign·(p − cp), j + sign·(q − cq)]`,
    /// indices taken modulo the image size.
    fn correlate(&self, x: &[f64], out: &mut [f64], sign: isize) {
        let (m, n) = (self.rows as isize, self.cols as isize);
        let (cp, cq) = ((self.kh / 2) as isize, (self.kw / 2) as isize);
        out.iter_mut().for_each(|v| *v = 0.0);
        for p in 0..self.kh {
            let dp = sign * (p as isize - cp);
            for q in 0..self.kw {
                let w = self.kernel[p * self.kw + q];
                if w == 0.0 {
                    continue;
                }
                let dq = sign * (q as isize - cq);
                for i in 0..m {
                    let si = (i + dp).rem_euclid(m) as usize;
                    let src = &x[si * self.cols..(si + 1) * self.cols];
                    let dst = &mut out[i as usize * self.cols..(i as usize + 1) * self.cols];
                    let shift = dq.rem_euclid(n) as usize;
                    // dst[j] += w · src[(j + shift) mod n], split to avoid the modulo
                    let split = self.cols - shift;
                    for (d, s) in dst[..split].iter_mut().zip(&src[shift..]) {
                        *d += w * s;
                    }
                    for (d, s) in dst[split..].iter_mut().zip(&src[..shift]) {
                        *d += w * s;
                    }
                }
            }
        }
    }
}

impl LinearMap for Convolution2D {
    fn dims(&self) -> (usize, usize) {
        let n = self.rows * self.cols;
        (n, n)
    }
    fn forward(&self, x: &[f64], out: &mut [f64]) {
        self.correlate(x, out, -1);
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        self.correlate(y, out, 1);
    }
}
