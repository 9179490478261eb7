//! Reference first-order methods: projected gradient with backtracking and
//! projected subgradient with diminishing steps.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::objective::{check_dim, eval_checked, value_checked, Objective};
use crate::point::{dist, norm, Point};
use crate::projections::Domain;
use crate::trace::{Recorder, SolveResult, StopReason, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct PgaParams {
    pub max_iter: usize,
    /// Backtracking shrink factor in `(0, 1)`.
    pub beta: f64,
    /// Sufficient decrease constant in `(0, 1)`.
    pub c: f64,
    /// First trial step.
    pub t0: f64,
    pub max_backtracks: usize,
    pub time_budget: Option<Duration>,
}

impl Default for PgaParams {
    fn default() -> Self {
        PgaParams {
            max_iter: 500,
            beta: 0.5,
            c: 1e-4,
            t0: 1.0,
            max_backtracks: 100,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsgaParams {
    pub max_iter: usize,
    /// Step scale: `t_k = a/√k`.
    pub a: f64,
    pub time_budget: Option<Duration>,
}

impl Default for PsgaParams {
    fn default() -> Self {
        PsgaParams {
            max_iter: 500,
            a: 1.0,
            time_budget: None,
        }
    }
}

fn out_of_time(started: Instant, budget: Option<Duration>) -> bool {
    budget.is_some_and(|t| started.elapsed() >= t)
}

/// Projected gradient `x⁺ = P_C(x − t∇f(x))`. Each step first tries
/// `t_prev/β` and shrinks by `β` until
/// `f(x⁺) ≤ f(x) − c‖x − x⁺‖²/t`.
pub fn run_pga(
    obj: &(impl Objective + ?Sized),
    domain: &Domain,
    x0: &Point,
    params: &PgaParams,
    sink: &mut dyn FnMut(&TraceRecord),
) -> Result<SolveResult> {
    let ok = params.beta > 0.0 && params.beta < 1.0 && params.c > 0.0 && params.c < 1.0 && params.t0 > 0.0;
    if !ok {
        return Err(Error::InvalidParameter("PGA needs beta, c in (0, 1) and t0 > 0".into()));
    }
    let started = Instant::now();
    check_dim(obj, x0.len())?;
    domain.check_dim(x0.len())?;
    let mut x = domain.project(x0)?;
    let mut rec = Recorder::new(obj.known_minimum(), sink);
    let mut g = vec![0.0; x.len()];
    let mut f = eval_checked(obj, &x, &mut g)?;
    rec.record(0, f, None, None);

    let mut t = params.t0 * params.beta;
    let mut trial = Point::zeros(x.len()).shaped_like(&x);
    let mut iter = 0;
    let stop = loop {
        if iter >= params.max_iter {
            break StopReason::MaxIter;
        }
        if out_of_time(started, params.time_budget) {
            break StopReason::TimeBudget;
        }
        t /= params.beta;
        let mut accepted = false;
        for _ in 0..=params.max_backtracks {
            let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            domain.project_into(&y, &mut trial);
            let step = dist(&x, &trial);
            if step == 0.0 {
                break;
            }
            let f_trial = value_checked(obj, &trial)?;
            if f_trial <= f - params.c * step * step / t {
                accepted = true;
                break;
            }
            t *= params.beta;
        }
        // no decrease possible: x is stationary up to rounding
        if !accepted {
            break StopReason::Stationary;
        }
        std::mem::swap(&mut x, &mut trial);
        iter += 1;
        f = eval_checked(obj, &x, &mut g)?;
        rec.record(iter, f, None, None);
    };
    Ok(rec.finish(x, f, iter, stop, None))
}

/// Projected subgradient `x_{k+1} = P_C(x_k − (a/√k)·g_k/max(1, ‖g_k‖))`,
/// reporting the best point seen.
pub fn run_psga(
    obj: &(impl Objective + ?Sized),
    domain: &Domain,
    x0: &Point,
    params: &PsgaParams,
    sink: &mut dyn FnMut(&TraceRecord),
) -> Result<SolveResult> {
    if !(params.a > 0.0) {
        return Err(Error::InvalidParameter("PSGA needs a > 0".into()));
    }
    let started = Instant::now();
    check_dim(obj, x0.len())?;
    domain.check_dim(x0.len())?;
    let mut x = domain.project(x0)?;
    let mut rec = Recorder::new(obj.known_minimum(), sink);
    let mut g = vec![0.0; x.len()];
    let f0 = eval_checked(obj, &x, &mut g)?;
    let (mut x_best, mut f_best) = (x.clone(), f0);
    rec.record(0, f_best, None, None);

    let mut iter = 0;
    let mut y = vec![0.0; x.len()];
    let stop = loop {
        if iter >= params.max_iter {
            break StopReason::MaxIter;
        }
        if out_of_time(started, params.time_budget) {
            break StopReason::TimeBudget;
        }
        let gn = norm(&g);
        if gn == 0.0 {
            break StopReason::Stationary;
        }
        iter += 1;
        let t = params.a / (iter as f64).sqrt() / gn.max(1.0);
        y.iter_mut().zip(x.iter().zip(&g)).for_each(|(yi, (xi, gi))| *yi = xi - t * gi);
        domain.project_into(&y, &mut x);
        let f = eval_checked(obj, &x, &mut g)?;
        if f < f_best {
            x_best.as_mut_slice().copy_from_slice(&x);
            f_best = f;
        }
        rec.record(iter, f_best, None, None);
    };
    Ok(rec.finish(x_best, f_best, iter, stop, None))
}
