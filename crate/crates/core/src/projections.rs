//! Orthogonal projections `P_C(y) = argmin_{x in C} ½‖x − y‖²` onto the
//! supported simple convex domains.
//!
//! Every domain is validated once at construction; afterwards a [`Domain`] is
//! immutable and can be shared between threads.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::point::{dot, norm, norm1, norm_sq, Point};

/// Feasibility tolerance used by [`Domain::contains`] unless overridden.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Relative threshold below which eigenvalues of the Gram matrix `A Aᵀ`
/// count as zero.
const RANK_TOL: f64 = 1e-12;

/// Tolerance on `‖A A† b − b‖ / max(1, ‖b‖)` for accepting an affine system.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Parameters of a feasible set. Obtain a usable [`Domain`] through
/// [`Domain::new`] or one of the convenience constructors.
#[derive(Debug, Clone)]
pub enum DomainKind {
    Affine(AffineSet),
    Hyperplane { a: Vec<f64>, b: f64 },
    Halfspace { a: Vec<f64>, b: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    NonNeg,
    L2Ball { xi: f64 },
    LInfBall { xi: f64 },
    L1Ball { xi: f64 },
    Simplex { xi: f64 },
    GroupL12Ball { groups: Vec<Vec<usize>>, xi: f64 },
}

/// A validated convex domain.
#[derive(Debug, Clone)]
pub struct Domain {
    kind: DomainKind,
}

impl Domain {
    pub fn new(kind: DomainKind) -> Result<Self> {
        validate(&kind)?;
        Ok(Domain { kind })
    }

    pub fn affine(a: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        Ok(Domain {
            kind: DomainKind::Affine(AffineSet::new(a, b)?),
        })
    }

    pub fn hyperplane(a: Vec<f64>, b: f64) -> Result<Self> {
        Domain::new(DomainKind::Hyperplane { a, b })
    }

    pub fn halfspace(a: Vec<f64>, b: f64) -> Result<Self> {
        Domain::new(DomainKind::Halfspace { a, b })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Domain::new(DomainKind::Box { lo, hi })
    }

    pub fn nonneg() -> Self {
        Domain {
            kind: DomainKind::NonNeg,
        }
    }

    pub fn l2_ball(xi: f64) -> Result<Self> {
        Domain::new(DomainKind::L2Ball { xi })
    }

    pub fn linf_ball(xi: f64) -> Result<Self> {
        Domain::new(DomainKind::LInfBall { xi })
    }

    pub fn l1_ball(xi: f64) -> Result<Self> {
        Domain::new(DomainKind::L1Ball { xi })
    }

    pub fn simplex(xi: f64) -> Result<Self> {
        Domain::new(DomainKind::Simplex { xi })
    }

    pub fn group_l12_ball(groups: Vec<Vec<usize>>, xi: f64) -> Result<Self> {
        Domain::new(DomainKind::GroupL12Ball { groups, xi })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    /// Short lowercase name, as used in configs and the CLI.
    pub fn name(&self) -> &'static str {
        match self.kind {
            DomainKind::Affine(_) => "affine",
            DomainKind::Hyperplane { .. } => "hyperplane",
            DomainKind::Halfspace { .. } => "halfspace",
            DomainKind::Box { .. } => "box",
            DomainKind::NonNeg => "nonneg",
            DomainKind::L2Ball { .. } => "l2ball",
            DomainKind::LInfBall { .. } => "linfball",
            DomainKind::L1Ball { .. } => "l1ball",
            DomainKind::Simplex { .. } => "simplex",
            DomainKind::GroupL12Ball { .. } => "groupl12ball",
        }
    }

    /// Fixed dimension of the domain, if it has one. Cones and balls accept
    /// any dimension.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            DomainKind::Affine(set) => Some(set.a.ncols()),
            DomainKind::Hyperplane { a, .. } | DomainKind::Halfspace { a, .. } => Some(a.len()),
            DomainKind::Box { lo, .. } => Some(lo.len()),
            DomainKind::GroupL12Ball { groups, .. } => Some(groups.iter().map(Vec::len).sum()),
            _ => None,
        }
    }

    pub fn check_dim(&self, len: usize) -> Result<()> {
        match self.dim() {
            Some(expected) if expected != len => Err(Error::DimensionMismatch {
                expected,
                actual: len,
            }),
            _ => Ok(()),
        }
    }

    /// Euclidean projection of `y` onto the domain. The image shape of `y`,
    /// if any, is kept.
    pub fn project(&self, y: &Point) -> Result<Point> {
        self.check_dim(y.len())?;
        let mut out = vec![0.0; y.len()];
        self.project_into(y, &mut out);
        Ok(Point::new(out).shaped_like(y))
    }

    /// Projection without the dimension check. `out` must have `y.len()`
    /// entries.
    pub(crate) fn project_into(&self, y: &[f64], out: &mut [f64]) {
        match &self.kind {
            DomainKind::Affine(set) => set.project_into(y, out),
            DomainKind::Hyperplane { a, b } => {
                let shift = (dot(a, y) - b) / norm_sq(a);
                for ((o, yi), ai) in out.iter_mut().zip(y).zip(a) {
                    *o = yi - shift * ai;
                }
            }
            DomainKind::Halfspace { a, b } => {
                let shift = (dot(a, y) - b).max(0.0) / norm_sq(a);
                for ((o, yi), ai) in out.iter_mut().zip(y).zip(a) {
                    *o = yi - shift * ai;
                }
            }
            DomainKind::Box { lo, hi } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = y[i].min(hi[i]).max(lo[i]);
                }
            }
            DomainKind::NonNeg => {
                for (o, yi) in out.iter_mut().zip(y) {
                    *o = yi.max(0.0);
                }
            }
            DomainKind::L2Ball { xi } => {
                let n = norm(y);
                let scale = if n > *xi { xi / n } else { 1.0 };
                for (o, yi) in out.iter_mut().zip(y) {
                    *o = scale * yi;
                }
            }
            DomainKind::LInfBall { xi } => {
                for (o, yi) in out.iter_mut().zip(y) {
                    *o = yi.min(*xi).max(-xi);
                }
            }
            DomainKind::L1Ball { xi } => l1_ball_into(*xi, y, out),
            DomainKind::Simplex { xi } => simplex_into(*xi, y, out),
            DomainKind::GroupL12Ball { groups, xi } => {
                group_l12_into(groups, *xi, y, out);
            }
        }
    }

    /// Constraint violation of `x`: zero exactly when `x` is in the domain.
    pub fn residual(&self, x: &[f64]) -> f64 {
        match &self.kind {
            DomainKind::Affine(set) => set.residual(x),
            DomainKind::Hyperplane { a, b } => (dot(a, x) - b).abs(),
            DomainKind::Halfspace { a, b } => (dot(a, x) - b).max(0.0),
            DomainKind::Box { lo, hi } => x
                .iter()
                .enumerate()
                .map(|(i, &v)| (lo[i] - v).max(v - hi[i]).max(0.0))
                .fold(0.0, f64::max),
            DomainKind::NonNeg => x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max),
            DomainKind::L2Ball { xi } => (norm(x) - xi).max(0.0),
            DomainKind::LInfBall { xi } => x.iter().map(|v| (v.abs() - xi).max(0.0)).fold(0.0, f64::max),
            DomainKind::L1Ball { xi } => (norm1(x) - xi).max(0.0),
            DomainKind::Simplex { xi } => {
                let neg = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
                neg.max((x.iter().sum::<f64>() - xi).abs())
            }
            DomainKind::GroupL12Ball { groups, xi } => (group_norm(groups, x) - xi).max(0.0),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim().unwrap_or(x.len()) && self.residual(x) <= tol
    }
}

fn validate(kind: &DomainKind) -> Result<()> {
    let positive = |xi: f64, what: &str| {
        if xi > 0.0 && xi.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("{what} radius must be positive, got {xi}")))
        }
    };
    match kind {
        DomainKind::Affine(_) | DomainKind::NonNeg => Ok(()),
        DomainKind::Hyperplane { a, b } | DomainKind::Halfspace { a, b } => {
            if a.is_empty() || norm_sq(a) == 0.0 {
                return Err(Error::InvalidDomain("normal vector must be nonzero".into()));
            }
            if !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDomain("non-finite parameters".into()));
            }
            Ok(())
        }
        DomainKind::Box { lo, hi } => {
            if lo.len() != hi.len() {
                return Err(Error::InvalidDomain(format!(
                    "box bounds have lengths {} and {}",
                    lo.len(),
                    hi.len()
                )));
            }
            // lo == hi on a coordinate is a valid degenerate box
            if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                return Err(Error::InvalidDomain("box requires lo <= hi".into()));
            }
            Ok(())
        }
        DomainKind::L2Ball { xi } => positive(*xi, "l2 ball"),
        DomainKind::LInfBall { xi } => positive(*xi, "linf ball"),
        DomainKind::L1Ball { xi } => positive(*xi, "l1 ball"),
        DomainKind::Simplex { xi } => positive(*xi, "simplex"),
        DomainKind::GroupL12Ball { groups, xi } => {
            positive(*xi, "group l12 ball")?;
            validate_groups(groups)
        }
    }
}

pub(crate) fn validate_groups(groups: &[Vec<usize>]) -> Result<()> {
    let n: usize = groups.iter().map(Vec::len).sum();
    let mut seen = vec![false; n];
    for idx in groups.iter().flatten() {
        match seen.get_mut(*idx) {
            Some(s) if !*s => *s = true,
            _ => {
                return Err(Error::InvalidDomain(format!(
                    "groups must partition 0..{n}; index {idx} is repeated or out of range"
                )))
            }
        }
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::InvalidDomain("empty group".into()));
    }
    Ok(())
}

/// `Σ_g ‖x_g‖₂`
pub fn group_norm(groups: &[Vec<usize>], x: &[f64]) -> f64 {
    groups
        .iter()
        .map(|g| g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt())
        .sum()
}

/// Affine set `{x | Ax = b}` with a cached factorization for applying `A†`.
#[derive(Debug, Clone)]
pub struct AffineSet {
    a: DMatrix<f64>,
    b: DVector<f64>,
    pinv: Pinv,
}

#[derive(Debug, Clone)]
enum Pinv {
    /// Full row rank: `A† r = Aᵀ (A Aᵀ)⁻¹ r` through the Cholesky factor of
    /// the Gram matrix, i.e. two triangular solves per application.
    Gram(Cholesky<f64, Dyn>),
    /// Rank-deficient but consistent systems: `A† r = Aᵀ W Λ⁺ Wᵀ r` from
    /// the eigendecomposition `A Aᵀ = W Λ Wᵀ`.
    Eigen { w: DMatrix<f64>, lam_inv: DVector<f64> },
}

impl AffineSet {
    pub fn new(a: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                actual: b.len(),
            });
        }
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidDomain("empty affine system".into()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite affine system".into()));
        }
        // nalgebra's SVD can lose accuracy on rank-deficient input; the
        // symmetric eigensolver on the Gram matrix does not
        let gram = &a * a.transpose();
        let eig = gram.clone().symmetric_eigen();
        let lam_max = eig.eigenvalues.max();
        let tol = RANK_TOL * lam_max * a.nrows().max(a.ncols()) as f64;
        let rank = eig.eigenvalues.iter().filter(|&&l| l > tol).count();
        if rank == 0 {
            return Err(Error::InvalidDomain("affine matrix is zero".into()));
        }
        let chol = if rank == a.nrows() { Cholesky::new(gram) } else { None };
        let pinv = match chol {
            Some(chol) => Pinv::Gram(chol),
            None => Pinv::Eigen {
                lam_inv: eig.eigenvalues.map(|l| if l > tol { 1.0 / l } else { 0.0 }),
                w: eig.eigenvectors,
            },
        };
        let set = AffineSet {
            a,
            b: DVector::from_vec(b),
            pinv,
        };
        let p = set.min_norm_point();
        let residual = set.residual(&p);
        if residual > CONSISTENCY_TOL * set.b.norm().max(1.0) {
            return Err(Error::InconsistentAffine { residual });
        }
        Ok(set)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        self.b.as_slice()
    }

    /// `A† r` for `r` in the row space dimension.
    pub fn apply_pinv(&self, r: &[f64]) -> Vec<f64> {
        let r = DVector::from_column_slice(r);
        let out = match &self.pinv {
            Pinv::Gram(chol) => self.a.tr_mul(&chol.solve(&r)),
            Pinv::Eigen { w, lam_inv } => {
                let coeffs = w.tr_mul(&r).component_mul(lam_inv);
                self.a.tr_mul(&(w * coeffs))
            }
        };
        out.data.into()
    }

    /// `A† b`, the minimum-norm point of the set.
    pub fn min_norm_point(&self) -> Vec<f64> {
        self.apply_pinv(self.b.as_slice())
    }

    /// `(I − A†A) h`, the component of `h` in the null space of `A`.
    pub fn null_component(&self, h: &[f64]) -> Vec<f64> {
        let ah = self.mul(h);
        let back = self.apply_pinv(&ah);
        h.iter().zip(back).map(|(hi, bi)| hi - bi).collect()
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        (&self.a * x).data.into()
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let ax = self.mul(x);
        ax.iter()
            .zip(self.b.iter())
            .map(|(l, r)| (l - r) * (l - r))
            .sum::<f64>()
            .sqrt()
    }

    fn correct(&self, x: &mut [f64]) {
        let mut r = self.mul(x);
        for (ri, bi) in r.iter_mut().zip(self.b.iter()) {
            *ri -= bi;
        }
        let step = self.apply_pinv(&r);
        for (xi, si) in x.iter_mut().zip(step) {
            *xi -= si;
        }
    }

    fn project_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
        self.correct(out);
        // one step of iterative refinement
        self.correct(out);
    }
}

/// `y − A†(Ay − b)`.
pub fn project_affine(a: &DMatrix<f64>, b: &[f64], y: &Point) -> Result<Point> {
    let set = AffineSet::new(a.clone(), b.to_vec())?;
    y.check_len(a.ncols())?;
    let mut out = vec![0.0; y.len()];
    set.project_into(y, &mut out);
    Ok(Point::new(out).shaped_like(y))
}

/// Projection onto `{x | ‖x‖₁ ≤ ξ}` by soft thresholding with a
/// sort-and-scan threshold.
pub fn project_l1ball(xi: f64, y: &Point) -> Result<Point> {
    validate(&DomainKind::L1Ball { xi })?;
    let mut out = vec![0.0; y.len()];
    l1_ball_into(xi, y, &mut out);
    Ok(Point::new(out).shaped_like(y))
}

/// Projection onto `{x | x ≥ 0, Σ x = ξ}`.
pub fn project_simplex(xi: f64, y: &Point) -> Result<Point> {
    validate(&DomainKind::Simplex { xi })?;
    let mut out = vec![0.0; y.len()];
    simplex_into(xi, y, &mut out);
    Ok(Point::new(out).shaped_like(y))
}

/// Threshold `θ` such that `Σ max(v_i − θ, 0) = ξ`.
fn simplex_threshold(v: &[f64], xi: f64) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &vj) in sorted.iter().enumerate() {
        cumsum += vj;
        let candidate = (cumsum - xi) / (j + 1) as f64;
        if vj - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}

fn simplex_into(xi: f64, y: &[f64], out: &mut [f64]) {
    if y.is_empty() {
        return;
    }
    let theta = simplex_threshold(y, xi);
    for (o, yi) in out.iter_mut().zip(y) {
        // entries exactly at the threshold map to zero
        *o = (yi - theta).max(0.0);
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 && total != xi {
        rescale(out, xi / total);
    }
}

/// Rounding in the threshold leaves an error of order `ε‖y‖` in the budget;
/// a final rescale puts far-away inputs exactly back on the boundary, so
/// the remaining error is tangent to it.
fn rescale(out: &mut [f64], factor: f64) {
    out.iter_mut().for_each(|o| *o *= factor);
}

fn l1_ball_into(xi: f64, y: &[f64], out: &mut [f64]) {
    if norm1(y) <= xi {
        out.copy_from_slice(y);
        return;
    }
    let abs: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    let theta = simplex_threshold(&abs, xi);
    for ((o, yi), ai) in out.iter_mut().zip(y).zip(&abs) {
        *o = yi.signum() * (ai - theta).max(0.0);
    }
    let total = norm1(out);
    if total > 0.0 && total != xi {
        rescale(out, xi / total);
    }
}

/// Projects onto `{x | Σ_g ‖x_g‖₂ ≤ ξ}` and returns the group-norm shrinkage
/// threshold (zero when `y` is already inside).
pub(crate) fn group_l12_into(groups: &[Vec<usize>], xi: f64, y: &[f64], out: &mut [f64]) -> f64 {
    let norms: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&i| y[i] * y[i]).sum::<f64>().sqrt())
        .collect();
    if norms.iter().sum::<f64>() <= xi {
        out.copy_from_slice(y);
        return 0.0;
    }
    let theta = simplex_threshold(&norms, xi);
    for (g, &n) in groups.iter().zip(&norms) {
        let scale = if n > theta { (n - theta) / n } else { 0.0 };
        for &i in g {
            out[i] = scale * y[i];
        }
    }
    let total = group_norm(groups, out);
    if total > 0.0 && total != xi {
        rescale(out, xi / total);
    }
    theta
}
