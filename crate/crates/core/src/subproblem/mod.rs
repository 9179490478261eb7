//! The auxiliary problem `sup_{x ∈ C} E_{γ,h}(x)` with
//! `E_{γ,h}(x) = −(γ + ⟨h, x⟩) / Q(x)` and `Q(x) = ½‖x‖² + Q0`.
//!
//! The maximizer is `u = P_C(−h/e)` where `e > 0` is the root of
//!
//! ```text
//! φ(e) = e·Q(û(e)) + γ + ⟨h, û(e)⟩,   û(e) = P_C(−h/e).
//! ```
//!
//! `φ(e) = min_{z ∈ C} e·Q(z) + γ + ⟨h, z⟩` is concave and strictly
//! increasing in `e`, so the root is unique whenever the supremum is
//! positive. [`solve_generic`] finds it numerically for any domain;
//! [`solve_closed_form`] solves the resulting quadratic directly for affine
//! sets, hyperplanes, halfspaces, the nonnegative orthant and the Euclidean
//! ball. The functional-constraint solvers in [`functional`] work from the
//! KKT system instead of the projection.

mod closed_form;
pub mod functional;
pub(crate) mod roots;

pub use closed_form::solve_closed_form;
pub use functional::{
    kkt_residual_group_l12, kkt_residual_l2, solve_functional_group_l12, solve_functional_l2,
    subdifferential_norm, NormKind, Subdifferential, SubgradientBlock,
};

use crate::error::{Error, Result};
use crate::point::{dot, norm_sq, Point};
use crate::projections::{Domain, DomainKind};
use roots::{bracket_increasing, secant_bisection, Bracketed};

/// Root tolerance: `|φ(e)| ≤ ROOT_TOL · max(1, |γ|)`.
pub const ROOT_TOL: f64 = 1e-10;

/// Linear lower model `f(z) ≥ γ + ⟨h, z⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub gamma: f64,
    pub h: Point,
}

impl Relaxation {
    pub fn new(gamma: f64, h: impl Into<Point>) -> Self {
        Relaxation {
            gamma,
            h: h.into(),
        }
    }
}

/// Constant term of the prox-function `Q(z) = ½‖z‖² + Q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxParams {
    q0: f64,
}

impl ProxParams {
    pub fn new(q0: f64) -> Result<Self> {
        if q0 > 0.0 && q0.is_finite() {
            Ok(ProxParams { q0 })
        } else {
            Err(Error::InvalidParameter(format!("Q0 must be positive, got {q0}")))
        }
    }

    /// `Q0 = ½‖x0‖² + ε`.
    pub fn from_start(x0: &[f64]) -> Self {
        ProxParams {
            q0: 0.5 * norm_sq(x0) + f64::EPSILON,
        }
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        eval_prox(self.q0, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    /// Maximizer `U(γ, h)`.
    pub u: Point,
    /// Optimal value `E(γ, h)`.
    pub e: f64,
    /// KKT multiplier of a functional constraint, zero for simple domains.
    pub mu: f64,
}

/// Which solver to use for a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubproblemMethod {
    /// Closed form where available, otherwise (or on failure) the generic
    /// root finder. Group l12 balls use the functional solver.
    #[default]
    Auto,
    ClosedForm,
    Generic,
    /// KKT-based solvers; only for l2 and group l12 balls.
    Functional,
}

/// `Q(x) = ½‖x‖² + Q0`; its gradient is `x`.
pub fn eval_prox(q0: f64, x: &[f64]) -> f64 {
    0.5 * norm_sq(x) + q0
}

/// `E_{γ,h}(x) = −(γ + ⟨h, x⟩) / Q(x)`.
pub fn eval_e(rel: &Relaxation, q0: f64, x: &[f64]) -> f64 {
    -(rel.gamma + dot(&rel.h, x)) / eval_prox(q0, x)
}

/// `φ(e)` for the given domain.
pub fn phi(e: f64, rel: &Relaxation, domain: &Domain, q0: f64) -> Result<f64> {
    check_inputs(rel, domain, q0)?;
    if !(e > 0.0) {
        return Err(Error::InvalidParameter(format!("phi requires e > 0, got {e}")));
    }
    let mut buf = vec![0.0; rel.h.len()];
    Ok(PhiEval::new(rel, domain, q0).eval(e, &mut buf))
}

fn check_inputs(rel: &Relaxation, domain: &Domain, q0: f64) -> Result<()> {
    domain.check_dim(rel.h.len())?;
    if !(q0 > 0.0) {
        return Err(Error::InvalidParameter(format!("Q0 must be positive, got {q0}")));
    }
    if !rel.gamma.is_finite() || !rel.h.is_finite() {
        return Err(Error::InvalidParameter("relaxation must be finite".into()));
    }
    Ok(())
}

struct PhiEval<'a> {
    rel: &'a Relaxation,
    domain: &'a Domain,
    q0: f64,
    y: Vec<f64>,
}

impl<'a> PhiEval<'a> {
    fn new(rel: &'a Relaxation, domain: &'a Domain, q0: f64) -> Self {
        PhiEval {
            rel,
            domain,
            q0,
            y: vec![0.0; rel.h.len()],
        }
    }

    /// Writes `û(e)` into `u` and returns `φ(e)`.
    fn eval(&mut self, e: f64, u: &mut [f64]) -> f64 {
        for (yi, hi) in self.y.iter_mut().zip(self.rel.h.iter()) {
            *yi = -hi / e;
        }
        self.domain.project_into(&self.y, u);
        e * eval_prox(self.q0, u) + self.rel.gamma + dot(&self.rel.h, u)
    }
}

/// Solves the subproblem for any domain by bracketing the root of `φ` and
/// refining it with a safeguarded secant/bisection iteration.
///
/// The search starts at `E(P_C(0))` when that is positive (a lower bound on
/// the root) and at 1 otherwise.
pub fn solve_generic(rel: &Relaxation, domain: &Domain, q0: f64) -> Result<SubproblemSolution> {
    check_inputs(rel, domain, q0)?;
    let n = rel.h.len();
    let mut origin = vec![0.0; n];
    domain.project_into(&vec![0.0; n], &mut origin);
    let e_origin = eval_e(rel, q0, &origin);
    let e0 = if e_origin > 0.0 { e_origin.max(1e-12) } else { 1.0 };

    let mut phi_eval = PhiEval::new(rel, domain, q0);
    let mut u = vec![0.0; n];
    let mut f = |e: f64| phi_eval.eval(e, &mut u);
    // refine well past the guarantee; secant steps make this nearly free
    let tol = 1e-4 * ROOT_TOL * rel.gamma.abs().max(1.0);
    let e = match bracket_increasing(&mut f, e0)? {
        Bracketed::Exact(e) => e,
        Bracketed::Interval(bracket) => secant_bisection(&mut f, bracket, tol).0,
    };
    let mut u = vec![0.0; n];
    phi_eval.eval(e, &mut u);
    Ok(SubproblemSolution {
        u: Point::new(u).shaped_like(&rel.h),
        e,
        mu: 0.0,
    })
}

/// Solves the subproblem with the requested method.
pub fn solve(
    rel: &Relaxation,
    domain: &Domain,
    q0: f64,
    method: SubproblemMethod,
) -> Result<SubproblemSolution> {
    match method {
        SubproblemMethod::Generic => solve_generic(rel, domain, q0),
        SubproblemMethod::ClosedForm => solve_closed_form(rel, domain, q0),
        SubproblemMethod::Functional => match domain.kind() {
            DomainKind::L2Ball { xi } => solve_functional_l2(rel, *xi, q0),
            DomainKind::GroupL12Ball { groups, xi } => {
                solve_functional_group_l12(rel, groups, *xi, q0)
            }
            _ => Err(Error::InvalidParameter(format!(
                "functional solver not available for {} domains",
                domain.name()
            ))),
        },
        SubproblemMethod::Auto => match domain.kind() {
            // near the optimum e is tiny and P_C(−h/e) loses digits to
            // cancellation; the fixed-point answer is still usable there
            DomainKind::GroupL12Ball { groups, xi } => {
                match solve_functional_group_l12(rel, groups, *xi, q0) {
                    Err(Error::KktViolation { .. }) => solve_generic(rel, domain, q0),
                    other => other,
                }
            }
            DomainKind::Affine(_)
            | DomainKind::Hyperplane { .. }
            | DomainKind::Halfspace { .. }
            | DomainKind::NonNeg
            | DomainKind::L2Ball { .. } => match solve_closed_form(rel, domain, q0) {
                Err(Error::NegativeDiscriminant(_)) => solve_generic(rel, domain, q0),
                other => other,
            },
            _ => solve_generic(rel, domain, q0),
        },
    }
}
