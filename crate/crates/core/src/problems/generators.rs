//! Seeded test problem generators. Every generator is a pure function of
//! its arguments.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::point::{norm, Point};

use super::linear::{Convolution2D, LinearMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    // fix column signs so the factor is uniquely defined
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Constrained least squares `min ½‖Ax − y‖²` over `‖x‖ ≤ ξ` with a known
/// singular value decomposition.
#[derive(Debug, Clone)]
pub struct RidgeInstance {
    pub a: DMatrix<f64>,
    pub y: Vec<f64>,
    pub x_true: Vec<f64>,
    pub xi: f64,
    /// Exact minimizer and minimum.
    pub x_hat: Vec<f64>,
    pub f_hat: f64,
}

/// `A = U·diag(σ)·Vᵀ` with `σᵢ = cond^{−(i−1)/(n−1)}` and random orthogonal
/// `U`, `V`; `x_true ~ N(0, I)`; `y = A·x_true + noise·uniform[0, 1)`.
pub fn gen_ridge(n: usize, cond: f64, noise: f64, xi: f64, seed: u64) -> Result<RidgeInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter("ridge needs n >= 2".into()));
    }
    if !(cond >= 1.0) || !cond.is_finite() {
        return Err(Error::InvalidParameter(format!("cond must be >= 1, got {cond}")));
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
    }
    let mut rng = rng(seed);
    let u = random_orthogonal(n, &mut rng);
    let v = random_orthogonal(n, &mut rng);
    let s: Vec<f64> = (0..n).map(|i| cond.powf(-(i as f64) / (n - 1) as f64)).collect();
    let mut us = u.clone();
    for (j, sj) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(*sj);
    }
    let a = &us * v.transpose();
    let x_true: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut y = (&a * DVector::from_column_slice(&x_true)).data.as_vec().clone();
    for yi in &mut y {
        *yi += noise * rng.random::<f64>();
    }

    let c = u.tr_mul(&DVector::from_column_slice(&y));
    let z_norm = |lambda: f64| {
        s.iter()
            .zip(c.iter())
            .map(|(si, ci)| (si * ci / (si * si + lambda)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let lambda = if z_norm(0.0) <= xi {
        0.0
    } else {
        // ‖z(λ)‖ decreases in λ; bisect in log scale
        let mut hi = s[0] * norm(c.as_slice()) / xi;
        while z_norm(hi) > xi {
            hi *= 2.0;
        }
        let mut lo = hi;
        while z_norm(lo) < xi && lo > 1e-300 {
            lo *= 1e-3;
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if z_norm(mid) > xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let z: Vec<f64> = s.iter().zip(c.iter()).map(|(si, ci)| si * ci / (si * si + lambda)).collect();
    let mut x_hat = (&v * DVector::from_vec(z)).data.as_vec().clone();
    let xn = norm(&x_hat);
    if xn > xi {
        x_hat.iter_mut().for_each(|v| *v *= xi / xn);
    }
    let r = &a * DVector::from_column_slice(&x_hat) - DVector::from_column_slice(&y);
    let f_hat = 0.5 * r.norm_squared();
    Ok(RidgeInstance {
        a,
        y,
        x_true,
        xi,
        x_hat,
        f_hat,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Blur {
    /// `size × size` box filter.
    Uniform(usize),
    Gaussian { size: usize, sigma: f64 },
}

impl Blur {
    pub fn kernel(&self) -> (Vec<f64>, usize) {
        match *self {
            Blur::Uniform(size) => (Convolution2D::uniform_kernel(size), size),
            Blur::Gaussian { size, sigma } => (Convolution2D::gaussian_kernel(size, sigma), size),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// Additive Gaussian noise with this standard deviation.
    Gaussian(f64),
    /// This fraction of pixels, chosen uniformly, set to 0 or 1.
    SaltPepper(f64),
}

#[derive(Debug, Clone)]
pub struct DeblurInstance {
    pub op: Convolution2D,
    pub y: Point,
    pub x_true: Point,
}

/// `y = clip_[0,1](blur(x_true) + noise)` with periodic boundary.
pub fn gen_deblur(image: &Point, blur: Blur, noise: Noise, seed: u64) -> Result<DeblurInstance> {
    let (rows, cols) = image.shape().ok_or(Error::ShapeMissing)?;
    if image.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameter("pixel values must lie in [0, 1]".into()));
    }
    let (kernel, size) = blur.kernel();
    let op = Convolution2D::new(rows, cols, kernel, size, size)?;
    let mut y = op.apply(image);
    let mut rng = rng(seed);
    match noise {
        Noise::Gaussian(sigma) => {
            for v in &mut y {
                *v += sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
        Noise::SaltPepper(level) => {
            if !(0.0..=1.0).contains(&level) {
                return Err(Error::InvalidParameter(format!("salt-and-pepper level {level} outside [0, 1]")));
            }
            let count = (level * y.len() as f64).round() as usize;
            for idx in sample(&mut rng, y.len(), count) {
                y[idx] = if rng.random::<bool>() { 1.0 } else { 0.0 };
            }
        }
    }
    y.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    Ok(DeblurInstance {
        op,
        y: Point::image(rows, cols, y)?,
        x_true: image.clone(),
    })
}

/// Piecewise constant test image with values in `[0, 1]`: an ellipse with
/// darker inclusions, a bright bar and a few small disks.
pub fn phantom(rows: usize, cols: usize) -> Point {
    let mut x = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            // normalized coordinates in [−1, 1]
            let py = 2.0 * (i as f64 + 0.5) / rows as f64 - 1.0;
            let px = 2.0 * (j as f64 + 0.5) / cols as f64 - 1.0;
            let in_ellipse = |cx: f64, cy: f64, ax: f64, ay: f64| {
                ((px - cx) / ax).powi(2) + ((py - cy) / ay).powi(2) <= 1.0
            };
            let mut v = 0.1;
            if in_ellipse(0.0, 0.0, 0.75, 0.9) {
                v = 0.6;
            }
            if in_ellipse(-0.3, -0.2, 0.2, 0.35) {
                v = 0.25;
            }
            if in_ellipse(0.3, -0.2, 0.15, 0.3) {
                v = 0.35;
            }
            if (-0.5..=0.5).contains(&px) && (0.35..=0.5).contains(&py) {
                v = 0.9;
            }
            for (cx, cy) in [(-0.2, 0.65), (0.0, 0.7), (0.2, 0.65)] {
                if in_ellipse(cx, cy, 0.07, 0.07) {
                    v = 1.0;
                }
            }
            x[i * cols + j] = v;
        }
    }
    Point::image(rows, cols, x).expect("length matches shape")
}

/// `min ‖x‖₁` subject to `Ax = y`.
#[derive(Debug, Clone)]
pub struct BasisPursuitInstance {
    pub a: DMatrix<f64>,
    pub y: Vec<f64>,
    pub x_true: Vec<f64>,
}

/// Gaussian `A` with entries `N(0, 1/m)`, `k`-sparse `x_true` with standard
/// normal entries on a uniformly chosen support, `y = A·x_true`.
pub fn gen_basis_pursuit(m: usize, n: usize, k: usize, seed: u64) -> Result<BasisPursuitInstance> {
    if !(m < n) || m == 0 {
        return Err(Error::InvalidParameter(format!("basis pursuit needs 0 < m < n, got m={m}, n={n}")));
    }
    if 3 * k > m {
        return Err(Error::InvalidParameter(format!("sparsity k={k} exceeds m/3")));
    }
    let mut rng = rng(seed);
    let a = gaussian_matrix(m, n, &mut rng) / (m as f64).sqrt();
    let mut x_true = vec![0.0; n];
    for idx in sample(&mut rng, n, k) {
        x_true[idx] = rng.sample(StandardNormal);
    }
    let y = (&a * DVector::from_column_slice(&x_true)).data.as_vec().clone();
    Ok(BasisPursuitInstance { a, y, x_true })
}
