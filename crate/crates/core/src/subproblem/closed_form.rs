//! Explicit solutions of `φ(e) = 0`.
//!
//! For each supported domain `û(e) = P_C(−h/e)` has the form `p − r/e` on
//! the relevant branch, so `e·φ(e)` is the quadratic
//! `β₁e² + β₂e + β₃` with `β₁ = ½‖p‖² + Q0`, `β₂ = γ + ⟨h, p⟩` and
//! `β₃ = ½‖r‖² − ⟨h, r⟩`. The larger root is the maximizer value.
//!
//! Halfspaces and balls have two branches (projection active or not). Both
//! candidates are computed and kept only if the branch condition holds for
//! the resulting `e`.

use super::roots::larger_root;
use super::{check_inputs, solve_generic, Relaxation, SubproblemSolution};
use crate::error::{Error, Result};
use crate::point::{dot, norm, norm_sq, Point};
use crate::projections::{Domain, DomainKind};

/// Relative slack when testing which projection branch a candidate is on.
const BRANCH_TOL: f64 = 1e-12;

pub fn solve_closed_form(rel: &Relaxation, domain: &Domain, q0: f64) -> Result<SubproblemSolution> {
    check_inputs(rel, domain, q0)?;
    let h = rel.h.as_slice();
    let gamma = rel.gamma;
    let e = match domain.kind() {
        DomainKind::Affine(set) => {
            let p = set.min_norm_point();
            let r = set.null_component(h);
            positive(larger_root(
                0.5 * norm_sq(&p) + q0,
                gamma + dot(h, &p),
                -0.5 * norm_sq(&r),
            )?)?
        }
        DomainKind::Hyperplane { a, b } => hyperplane_root(a, *b, h, gamma, q0)?,
        DomainKind::NonNeg => {
            let neg_sq: f64 = h.iter().map(|v| v.min(0.0).powi(2)).sum();
            positive(larger_root(q0, gamma, -0.5 * neg_sq)?)?
        }
        DomainKind::Halfspace { a, b } => {
            let ah = dot(a, h);
            let tol = |e: f64| BRANCH_TOL * (b.abs() + norm(a) * norm(h) / e);
            // inactive: u = −h/e must satisfy ⟨a, u⟩ ≤ b
            let interior = larger_root(q0, gamma, -0.5 * norm_sq(h))
                .ok()
                .filter(|&e| e > 0.0 && -ah / e <= b + tol(e));
            // active: −⟨a, h⟩/e ≥ b so that u lands on the hyperplane
            let boundary = hyperplane_root(a, *b, h, gamma, q0)
                .ok()
                .filter(|&e| -ah / e >= b - tol(e));
            match best(interior, boundary) {
                Some(e) => e,
                None => return solve_generic(rel, domain, q0),
            }
        }
        DomainKind::L2Ball { xi } => {
            let hn = norm(h);
            let interior = larger_root(q0, gamma, -0.5 * hn * hn)
                .ok()
                .filter(|&e| e > 0.0 && hn <= e * xi * (1.0 + BRANCH_TOL));
            // u = −ξh/‖h‖ gives e(½ξ² + Q0) + γ − ξ‖h‖ = 0
            let boundary = (hn > 0.0)
                .then(|| 2.0 * (xi * hn - gamma) / (xi * xi + 2.0 * q0))
                .filter(|&e| e > 0.0 && hn >= e * xi * (1.0 - BRANCH_TOL));
            match best(interior, boundary) {
                Some(e) => e,
                None => return solve_generic(rel, domain, q0),
            }
        }
        _ => return Err(Error::NoClosedForm(domain.name())),
    };
    let y: Vec<f64> = h.iter().map(|v| -v / e).collect();
    let mut u = vec![0.0; h.len()];
    domain.project_into(&y, &mut u);
    Ok(SubproblemSolution {
        u: Point::new(u).shaped_like(&rel.h),
        e,
        mu: 0.0,
    })
}

fn hyperplane_root(a: &[f64], b: f64, h: &[f64], gamma: f64, q0: f64) -> Result<f64> {
    let a2 = norm_sq(a);
    let ah = dot(a, h);
    positive(larger_root(
        b * b / (2.0 * a2) + q0,
        gamma + b * ah / a2,
        ah * ah / (2.0 * a2) - 0.5 * norm_sq(h),
    )?)
}

fn positive(e: f64) -> Result<f64> {
    if e > 0.0 {
        Ok(e)
    } else {
        Err(Error::NoPositiveRoot { best_e: e })
    }
}

fn best(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}
