use crate::error::{Error, Result};

/// A convex function with a subgradient oracle.
pub trait Objective {
    fn dim(&self) -> usize;

    /// Writes a subgradient at `x` into `grad` and returns `f(x)`.
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64;

    fn value(&self, x: &[f64]) -> f64 {
        let mut grad = vec![0.0; x.len()];
        self.eval(x, &mut grad)
    }

    /// The optimal value over the problem's domain, when known analytically.
    fn known_minimum(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).eval(x, grad)
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn known_minimum(&self) -> Option<f64> {
        (**self).known_minimum()
    }
}

/// An objective defined by a closure `(x, grad) -> f(x)`.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
    minimum: Option<f64>,
}

impl<F: Fn(&[f64], &mut [f64]) -> f64> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f, minimum: None }
    }

    pub fn with_minimum(mut self, f_hat: f64) -> Self {
        self.minimum = Some(f_hat);
        self
    }
}

impl<F: Fn(&[f64], &mut [f64]) -> f64> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (self.f)(x, grad)
    }
    fn known_minimum(&self) -> Option<f64> {
        self.minimum
    }
}

pub(crate) fn eval_checked(obj: &(impl Objective + ?Sized), x: &[f64], grad: &mut [f64]) -> Result<f64> {
    let f = obj.eval(x, grad);
    if !f.is_finite() || !grad.iter().all(|g| g.is_finite()) {
        return Err(Error::NonFiniteObjective);
    }
    Ok(f)
}

pub(crate) fn value_checked(obj: &(impl Objective + ?Sized), x: &[f64]) -> Result<f64> {
    let f = obj.value(x);
    if !f.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(f)
}

pub(crate) fn check_dim(obj: &(impl Objective + ?Sized), n: usize) -> Result<()> {
    if obj.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            actual: n,
        });
    }
    Ok(())
}
