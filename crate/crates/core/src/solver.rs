//! The optimal subgradient algorithm.
//!
//! OSGA keeps a linear lower model `γ + ⟨h, z⟩` of `f` and the best point
//! `x_b`. Each iteration maximizes `E(x) = −(γ_b + ⟨h, x⟩)/Q(x)` with
//! `γ_b = γ − f(x_b)`; the optimal value `η` bounds the optimality gap:
//! `f(x_b) − f̂ ≤ η·Q(x̂)`. The step factor `α` adapts to how much each
//! iteration shrinks `η`.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::objective::{check_dim, eval_checked, value_checked, Objective};
use crate::point::{dot, Point};
use crate::projections::Domain;
use crate::subproblem::{self, eval_prox, ProxParams, Relaxation, SubproblemMethod};
use crate::trace::{Recorder, SolveResult, StopReason, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct OsgaParams {
    /// Required relative decrease of `η` for `α` to grow, in `(0, 1)`.
    pub delta: f64,
    pub alpha_max: f64,
    /// Shrink rate of `α`.
    pub kappa: f64,
    /// Growth rate of `α`, at most `kappa`.
    pub kappa_prime: f64,
    /// Strong convexity parameter of `f` with respect to `Q`.
    pub mu: f64,
    pub f_target: f64,
    pub max_iter: usize,
    pub eta_tol: f64,
    pub time_budget: Option<Duration>,
    pub subproblem: SubproblemMethod,
}

impl Default for OsgaParams {
    fn default() -> Self {
        OsgaParams {
            delta: 0.9,
            alpha_max: 0.7,
            kappa: 0.5,
            kappa_prime: 0.5,
            mu: 0.0,
            f_target: f64::NEG_INFINITY,
            max_iter: 500,
            eta_tol: 0.0,
            time_budget: None,
            subproblem: SubproblemMethod::Auto,
        }
    }
}

impl OsgaParams {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !open_unit(self.delta) {
            return bad("delta must lie in (0, 1)");
        }
        if !open_unit(self.alpha_max) {
            return bad("alpha_max must lie in (0, 1)");
        }
        if !(self.kappa_prime > 0.0 && self.kappa_prime <= self.kappa && self.kappa.is_finite()) {
            return bad("need 0 < kappa_prime <= kappa");
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad("mu must be nonnegative");
        }
        if self.f_target.is_nan() {
            return bad("f_target must not be NaN");
        }
        if !(self.eta_tol >= 0.0) {
            return bad("eta_tol must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsgaState {
    pub x_b: Point,
    pub f_xb: f64,
    pub gamma: f64,
    pub h: Point,
    pub eta: f64,
    pub u: Point,
    pub alpha: f64,
    pub iter: usize,
}

/// Maximizes `E_{γ_b, h}` over the domain. A nonpositive supremum means the
/// model certifies `x_b` as optimal; that case is reported as `e = 0`.
fn maximize(gamma_b: f64, h: &Point, domain: &Domain, q0: f64, method: SubproblemMethod) -> Result<(Point, f64)> {
    let rel = Relaxation {
        gamma: gamma_b,
        h: h.clone(),
    };
    match subproblem::solve(&rel, domain, q0, method) {
        Ok(sol) => Ok((sol.u, sol.e)),
        Err(Error::NoPositiveRoot { .. }) => {
            let u = domain.project(&Point::zeros(h.len()).shaped_like(h))?;
            Ok((u, 0.0))
        }
        Err(err) => Err(err),
    }
}

/// Linearization of `f − μQ` at `x`: returns `(h, γ)` with
/// `h = g − μx` and `γ = f − μQ(x) − ⟨h, x⟩`.
fn linearize(f: f64, g: Vec<f64>, x: &[f64], mu: f64, q0: f64) -> (Vec<f64>, f64) {
    let mut h = g;
    if mu != 0.0 {
        for (hi, xi) in h.iter_mut().zip(x) {
            *hi -= mu * xi;
        }
    }
    let gamma = f - mu * eval_prox(q0, x) - dot(&h, x);
    (h, gamma)
}

/// Sets up the model at a feasible `x0`.
pub fn init(
    obj: &(impl Objective + ?Sized),
    domain: &Domain,
    x0: &Point,
    params: &OsgaParams,
    prox: ProxParams,
) -> Result<OsgaState> {
    params.validate()?;
    check_dim(obj, x0.len())?;
    domain.check_dim(x0.len())?;
    let q0 = prox.q0();
    let mut g = vec![0.0; x0.len()];
    let f0 = eval_checked(obj, x0, &mut g)?;
    let (h, gamma) = linearize(f0, g, x0, params.mu, q0);
    let h = Point::new(h).shaped_like(x0);
    let (u, e) = maximize(gamma - f0, &h, domain, q0, params.subproblem)?;
    Ok(OsgaState {
        x_b: x0.clone(),
        f_xb: f0,
        gamma,
        h,
        eta: e - params.mu,
        u,
        alpha: params.alpha_max,
        iter: 0,
    })
}

/// Step factor update. Returns the new `α` and whether the candidate
/// model with error factor `eta_bar` should replace the current one.
pub fn update_params(alpha: f64, eta: f64, eta_bar: f64, params: &OsgaParams) -> (f64, bool) {
    let r = (eta - eta_bar) / (params.delta * alpha * eta);
    let alpha = if r < 1.0 {
        alpha * (-params.kappa).exp()
    } else {
        (alpha * (params.kappa_prime * (r - 1.0)).exp()).min(params.alpha_max)
    };
    (alpha, eta_bar < eta)
}

/// One OSGA iteration.
pub fn step(
    state: &mut OsgaState,
    obj: &(impl Objective + ?Sized),
    domain: &Domain,
    params: &OsgaParams,
    prox: ProxParams,
) -> Result<()> {
    let q0 = prox.q0();
    let alpha = state.alpha;
    let mu = params.mu;
    let n = state.x_b.len();
    let x_b = state.x_b.as_slice();

    let x: Vec<f64> = x_b.iter().zip(state.u.iter()).map(|(b, u)| b + alpha * (u - b)).collect();
    let mut g = vec![0.0; n];
    let f_x = eval_checked(obj, &x, &mut g)?;
    let (g, gamma_x) = linearize(f_x, g, &x, mu, q0);
    let h_bar: Vec<f64> = state.h.iter().zip(&g).map(|(h, g)| h + alpha * (g - h)).collect();
    let h_bar = Point::new(h_bar).shaped_like(&state.x_b);
    let gamma_bar = state.gamma + alpha * (gamma_x - state.gamma);

    // ties keep the incumbent
    let (x_b1, f_b1) = if f_x < state.f_xb { (x, f_x) } else { (x_b.to_vec(), state.f_xb) };

    let (u1, e1) = maximize(gamma_bar - f_b1, &h_bar, domain, q0, params.subproblem)?;
    let (x_bar, f_bar) = if e1 > 0.0 {
        let x1: Vec<f64> = x_b.iter().zip(u1.iter()).map(|(b, u)| b + alpha * (u - b)).collect();
        let f1 = value_checked(obj, &x1)?;
        if f1 < f_b1 {
            (x1, f1)
        } else {
            (x_b1, f_b1)
        }
    } else {
        (x_b1, f_b1)
    };

    let (u_bar, e_bar) = if f_bar == f_b1 {
        (u1, e1)
    } else {
        maximize(gamma_bar - f_bar, &h_bar, domain, q0, params.subproblem)?
    };
    let eta_bar = e_bar - mu;

    let (alpha, accept) = update_params(alpha, state.eta, eta_bar, params);
    state.alpha = alpha;
    if accept {
        state.h = h_bar;
        state.gamma = gamma_bar;
        state.eta = eta_bar;
        state.u = u_bar;
    }
    state.x_b = Point::new(x_bar).shaped_like(&state.x_b);
    state.f_xb = f_bar;
    state.iter += 1;
    Ok(())
}

/// Runs OSGA from `x0`, projected onto the domain first. `prox` defaults to
/// `Q0 = ½‖x0‖² + ε`. Emits one trace record for the start and one per
/// iteration.
pub fn run(
    obj: &(impl Objective + ?Sized),
    domain: &Domain,
    x0: &Point,
    params: &OsgaParams,
    prox: Option<ProxParams>,
    sink: &mut dyn FnMut(&TraceRecord),
) -> Result<SolveResult> {
    let started = Instant::now();
    domain.check_dim(x0.len())?;
    let x0 = domain.project(x0)?;
    let prox = prox.unwrap_or_else(|| ProxParams::from_start(&x0));
    let mut rec = Recorder::new(obj.known_minimum(), sink);
    let mut state = init(obj, domain, &x0, params, prox)?;
    rec.record(0, state.f_xb, Some(state.eta), Some(state.alpha));

    let stop = loop {
        if state.f_xb <= params.f_target {
            break StopReason::TargetReached;
        }
        if state.eta <= params.eta_tol {
            break StopReason::EtaTolerance;
        }
        if state.iter >= params.max_iter {
            break StopReason::MaxIter;
        }
        if params.time_budget.is_some_and(|t| started.elapsed() >= t) {
            break StopReason::TimeBudget;
        }
        step(&mut state, obj, domain, params, prox)?;
        rec.record(state.iter, state.f_xb, Some(state.eta), Some(state.alpha));
    };
    let eta = Some(state.eta);
    Ok(rec.finish(state.x_b, state.f_xb, state.iter, stop, eta))
}
