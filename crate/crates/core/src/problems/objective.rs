use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::point::{norm1, norm_sq, sign};

use super::linear::LinearMap;
use super::tv::{tv_eval, TvKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataTerm {
    /// `½‖Ax − b‖²`
    L22,
    /// `‖Ax − b‖₁`
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularizer {
    None,
    /// `½‖x‖²`
    L22,
    /// `‖x‖₁`
    L1,
    Itv,
    Atv,
}

/// `f(x) = data(Ax − b) + λ·reg(x)`.
#[derive(Debug)]
pub struct CompositeObjective {
    data: DataTerm,
    reg: Regularizer,
    lambda: f64,
    a: Box<dyn LinearMap>,
    b: Vec<f64>,
    image_shape: Option<(usize, usize)>,
    f_hat: Option<f64>,
}

impl CompositeObjective {
    pub fn new(data: DataTerm, a: Box<dyn LinearMap>, b: Vec<f64>) -> Result<Self> {
        let (_, n_out) = a.dims();
        if b.len() != n_out {
            return Err(Error::DimensionMismatch {
                expected: n_out,
                actual: b.len(),
            });
        }
        Ok(CompositeObjective {
            data,
            reg: Regularizer::None,
            lambda: 0.0,
            a,
            b,
            image_shape: None,
            f_hat: None,
        })
    }

    /// Adds `λ·reg(x)`. TV regularizers need [`Self::with_image_shape`].
    pub fn with_regularizer(mut self, reg: Regularizer, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
        }
        if matches!(reg, Regularizer::Itv | Regularizer::Atv) && self.image_shape.is_none() {
            return Err(Error::ShapeMissing);
        }
        self.reg = reg;
        self.lambda = lambda;
        Ok(self)
    }

    pub fn with_image_shape(mut self, rows: usize, cols: usize) -> Result<Self> {
        let n = self.a.dims().0;
        if rows * cols != n {
            return Err(Error::ShapeMismatch { rows, cols, len: n });
        }
        self.image_shape = Some((rows, cols));
        Ok(self)
    }

    pub fn with_known_minimum(mut self, f_hat: f64) -> Self {
        self.f_hat = Some(f_hat);
        self
    }

    pub fn operator(&self) -> &dyn LinearMap {
        self.a.as_ref()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn regularizer(&self) -> Regularizer {
        self.reg
    }

    pub fn data_term(&self) -> DataTerm {
        self.data
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.apply(x);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri -= bi);
        r
    }

    fn data_value(&self, r: &[f64]) -> f64 {
        match self.data {
            DataTerm::L22 => 0.5 * norm_sq(r),
            DataTerm::L1 => norm1(r),
        }
    }

    fn reg_eval(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        if self.lambda == 0.0 && grad.is_none() {
            return 0.0;
        }
        let lambda = self.lambda;
        match self.reg {
            Regularizer::None => 0.0,
            Regularizer::L22 => {
                if let Some(g) = grad {
                    g.iter_mut().zip(x).for_each(|(gi, xi)| *gi += lambda * xi);
                }
                lambda * 0.5 * norm_sq(x)
            }
            Regularizer::L1 => {
                if let Some(g) = grad {
                    g.iter_mut().zip(x).for_each(|(gi, xi)| *gi += lambda * sign(*xi));
                }
                lambda * norm1(x)
            }
            Regularizer::Itv | Regularizer::Atv => {
                let kind = if self.reg == Regularizer::Itv {
                    TvKind::Isotropic
                } else {
                    TvKind::Anisotropic
                };
                let (m, n) = self.image_shape.expect("checked at construction");
                match grad {
                    Some(g) => {
                        let mut tv_g = vec![0.0; x.len()];
                        let v = tv_eval(x, m, n, kind, Some(&mut tv_g));
                        g.iter_mut().zip(&tv_g).for_each(|(gi, ti)| *gi += lambda * ti);
                        lambda * v
                    }
                    None => lambda * tv_eval(x, m, n, kind, None),
                }
            }
        }
    }
}

impl Objective for CompositeObjective {
    fn dim(&self) -> usize {
        self.a.dims().0
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut r = self.residual(x);
        let data = self.data_value(&r);
        if self.data == DataTerm::L1 {
            r.iter_mut().for_each(|v| *v = sign(*v));
        }
        self.a.adjoint(&r, grad);
        data + self.reg_eval(x, Some(grad))
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.data_value(&self.residual(x)) + self.reg_eval(x, None)
    }

    fn known_minimum(&self) -> Option<f64> {
        self.f_hat
    }
}
