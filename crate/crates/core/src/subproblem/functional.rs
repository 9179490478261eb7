//! Subproblems over sublevel sets `{x | φ(x) ≤ ξ}` of a norm, solved from
//! the KKT conditions of `max E_{γ,h}(x)`:
//!
//! ```text
//! ∇E(u) = (−e·u − h) / Q(u) = μ·s,   s ∈ ∂φ(u),   μ ≥ 0,   μ(φ(u) − ξ) = 0
//! ```
//!
//! with `e = E(u)`. Either the constraint is inactive (`μ = 0`,
//! `u = −h/e`) or `u` sits on the boundary with `μ > 0`.

use super::roots::larger_root;
use super::{eval_e, eval_prox, solve_generic, Relaxation, SubproblemSolution};
use crate::error::{Error, Result};
use crate::point::{dot, norm, Point};
use crate::projections::{group_l12_into, group_norm, validate_groups, Domain};

/// Acceptance threshold on the stationarity residual of the group solver.
pub const KKT_TOL: f64 = 1e-6;

/// Norms whose subdifferential is available.
#[derive(Debug, Clone, Copy)]
pub enum NormKind<'a> {
    L2,
    GroupL12(&'a [Vec<usize>]),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubgradientBlock {
    /// The block is differentiable; its gradient is unique.
    Gradient(Vec<f64>),
    /// The block is zero: any vector with Euclidean norm at most one.
    DualUnitBall,
}

/// The subdifferential of a (group) Euclidean norm, block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdifferential {
    pub blocks: Vec<(Vec<usize>, SubgradientBlock)>,
}

impl Subdifferential {
    /// The minimal-norm element: gradients where defined, zero elsewhere.
    pub fn representative(&self, n: usize) -> Point {
        let mut out = vec![0.0; n];
        for (idx, block) in &self.blocks {
            if let SubgradientBlock::Gradient(g) = block {
                for (&i, gi) in idx.iter().zip(g) {
                    out[i] = *gi;
                }
            }
        }
        Point::new(out)
    }

    pub fn contains(&self, g: &[f64], tol: f64) -> bool {
        self.blocks.iter().all(|(idx, block)| match block {
            SubgradientBlock::Gradient(grad) => idx
                .iter()
                .zip(grad)
                .all(|(&i, gi)| (g[i] - gi).abs() <= tol),
            SubgradientBlock::DualUnitBall => {
                idx.iter().map(|&i| g[i] * g[i]).sum::<f64>().sqrt() <= 1.0 + tol
            }
        })
    }
}

pub fn subdifferential_norm(x: &[f64], norm_kind: NormKind<'_>) -> Subdifferential {
    let block = |idx: Vec<usize>| {
        let n = idx.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
        let sub = if n > 0.0 {
            SubgradientBlock::Gradient(idx.iter().map(|&i| x[i] / n).collect())
        } else {
            SubgradientBlock::DualUnitBall
        };
        (idx, sub)
    };
    let blocks = match norm_kind {
        NormKind::L2 => vec![block((0..x.len()).collect())],
        NormKind::GroupL12(groups) => groups.iter().cloned().map(block).collect(),
    };
    Subdifferential { blocks }
}

/// `∇E(u) = (−E(u)·u − h) / Q(u)`.
fn grad_e(rel: &Relaxation, q0: f64, u: &[f64]) -> Vec<f64> {
    let e = eval_e(rel, q0, u);
    let q = eval_prox(q0, u);
    u.iter().zip(rel.h.iter()).map(|(ui, hi)| (-e * ui - hi) / q).collect()
}

fn check(rel: &Relaxation, xi: f64, q0: f64) -> Result<()> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {xi}")));
    }
    if !(q0 > 0.0) {
        return Err(Error::InvalidParameter(format!("Q0 must be positive, got {q0}")));
    }
    if !rel.gamma.is_finite() || !rel.h.is_finite() {
        return Err(Error::InvalidParameter("relaxation must be finite".into()));
    }
    Ok(())
}

/// KKT solution over `{‖x‖₂ ≤ ξ}`.
///
/// Inactive branch: `u = −h/e` with `Q0e² + γe − ½‖h‖² = 0`, valid while
/// `‖u‖ < ξ`. Boundary branch: `u = −ξh/‖h‖`, `e = (ξ‖h‖ − γ)/(½ξ² + Q0)`
/// and `μ = (‖h‖ − eξ)/Q(u)`.
pub fn solve_functional_l2(rel: &Relaxation, xi: f64, q0: f64) -> Result<SubproblemSolution> {
    check(rel, xi, q0)?;
    let h = rel.h.as_slice();
    let hn = norm(h);
    if let Ok(e) = larger_root(q0, rel.gamma, -0.5 * hn * hn) {
        if e > 0.0 && hn < e * xi {
            return Ok(SubproblemSolution {
                u: Point::new(h.iter().map(|v| -v / e).collect()).shaped_like(&rel.h),
                e,
                mu: 0.0,
            });
        }
    }
    if hn == 0.0 {
        return Err(Error::NoPositiveRoot { best_e: 0.0 });
    }
    let q = 0.5 * xi * xi + q0;
    let e = (xi * hn - rel.gamma) / q;
    if !(e > 0.0) {
        return Err(Error::NoPositiveRoot { best_e: e });
    }
    let mu = ((hn - e * xi) / q).max(0.0);
    let u: Vec<f64> = h.iter().map(|v| -xi * v / hn).collect();
    Ok(SubproblemSolution {
        u: Point::new(u).shaped_like(&rel.h),
        e,
        mu,
    })
}

/// Norm of the KKT violation for the l2-ball subproblem.
pub fn kkt_residual_l2(rel: &Relaxation, xi: f64, q0: f64, sol: &SubproblemSolution) -> f64 {
    let all: Vec<usize> = (0..sol.u.len()).collect();
    kkt_residual_group_l12(rel, std::slice::from_ref(&all), xi, q0, sol)
}

/// KKT solution over `{Σ_g ‖x_g‖₂ ≤ ξ}`.
///
/// The inactive branch is explicit. On the boundary the maximizer is the
/// projection of `−h/e` onto the group ball, so `e` comes from an outer
/// scalar root solve and the inner projection shrinks group norms by a
/// threshold `θ` found by sort-and-scan; then `μ = e·θ/Q(u)`. The result is
/// returned only if its stationarity residual is below [`KKT_TOL`].
pub fn solve_functional_group_l12(
    rel: &Relaxation,
    groups: &[Vec<usize>],
    xi: f64,
    q0: f64,
) -> Result<SubproblemSolution> {
    check(rel, xi, q0)?;
    validate_groups(groups)?;
    let n: usize = groups.iter().map(Vec::len).sum();
    rel.h.check_len(n)?;
    let h = rel.h.as_slice();

    if let Ok(e) = larger_root(q0, rel.gamma, -0.5 * dot(h, h)) {
        if e > 0.0 && group_norm(groups, h) < e * xi {
            return Ok(SubproblemSolution {
                u: Point::new(h.iter().map(|v| -v / e).collect()).shaped_like(&rel.h),
                e,
                mu: 0.0,
            });
        }
    }

    let domain = Domain::group_l12_ball(groups.to_vec(), xi)?;
    let mut sol = solve_generic(rel, &domain, q0)?;
    let y: Vec<f64> = h.iter().map(|v| -v / sol.e).collect();
    let mut u = vec![0.0; n];
    let theta = group_l12_into(groups, xi, &y, &mut u);
    sol.mu = sol.e * theta / eval_prox(q0, &u);

    let residual = kkt_residual_group_l12(rel, groups, xi, q0, &sol);
    if residual > KKT_TOL {
        return Err(Error::KktViolation { residual });
    }
    Ok(sol)
}

/// Norm of the KKT violation for the group l12 subproblem: stationarity
/// (with the best subgradient choice on zero blocks), complementary
/// slackness and primal feasibility.
pub fn kkt_residual_group_l12(
    rel: &Relaxation,
    groups: &[Vec<usize>],
    xi: f64,
    q0: f64,
    sol: &SubproblemSolution,
) -> f64 {
    let u = sol.u.as_slice();
    let grad = grad_e(rel, q0, u);
    let mu = sol.mu;
    let mut stationarity = 0.0;
    for g in groups {
        let un = g.iter().map(|&i| u[i] * u[i]).sum::<f64>().sqrt();
        if un > 0.0 {
            stationarity += g
                .iter()
                .map(|&i| (grad[i] - mu * u[i] / un).powi(2))
                .sum::<f64>();
        } else {
            let gn = g.iter().map(|&i| grad[i] * grad[i]).sum::<f64>().sqrt();
            stationarity += (gn - mu).max(0.0).powi(2);
        }
    }
    let phi = group_norm(groups, u);
    stationarity.sqrt() + mu * (phi - xi).abs() + (phi - xi).max(0.0) + (-mu).max(0.0)
}
