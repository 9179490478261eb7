//! Reference implementations used to check the library independently.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use osga::{Domain, DomainKind, Objective, Point};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// One domain of every kind in dimension `n`, with random parameters.
pub fn random_domains(rng: &mut ChaCha8Rng, n: usize) -> Vec<Domain> {
    let mut out = Vec::new();
    // affine: m < n rows, consistent right-hand side; sometimes a repeated row
    let m = rng.random_range(1..n.max(2));
    let mut a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    if m >= 2 && rng.random::<bool>() {
        let row = a.row(0).into_owned();
        a.set_row(m - 1, &row);
    }
    let z = DVector::from_vec(gauss_vec(rng, n, 1.0));
    let b = (&a * z).data.as_vec().clone();
    out.push(Domain::affine(a, b).unwrap());
    out.push(Domain::hyperplane(gauss_vec(rng, n, 1.0), rng.sample(StandardNormal)).unwrap());
    out.push(Domain::halfspace(gauss_vec(rng, n, 1.0), rng.sample(StandardNormal)).unwrap());
    let lo = gauss_vec(rng, n, 1.0);
    let hi: Vec<f64> = lo
        .iter()
        .map(|l| if rng.random_range(0.0..1.0) < 0.2 { *l } else { l + rng.random_range(0.0..2.0) })
        .collect();
    out.push(Domain::boxed(lo, hi).unwrap());
    out.push(Domain::nonneg());
    let xi = rng.random_range(0.2..3.0);
    out.push(Domain::l2_ball(xi).unwrap());
    out.push(Domain::linf_ball(xi).unwrap());
    out.push(Domain::l1_ball(xi).unwrap());
    out.push(Domain::simplex(xi).unwrap());
    out.push(Domain::group_l12_ball(random_groups(rng, n), xi).unwrap());
    out
}

pub fn random_groups(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let k = rng.random_range(1..=n);
    let mut groups = vec![Vec::new(); k];
    for (pos, i) in idx.into_iter().enumerate() {
        // every group receives at least one index
        let g = if pos < k { pos } else { rng.random_range(0..k) };
        groups[g].push(i);
    }
    groups
}

/// Random points of the domain: projections of spread-out points and
/// convex combinations of them, so both interior and boundary are hit.
pub fn feasible_points(rng: &mut ChaCha8Rng, domain: &Domain, n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(count);
    while pts.len() < count {
        let scale = [0.1, 1.0, 5.0][rng.random_range(0..3)];
        let y = gauss_vec(rng, n, scale);
        let p = domain.project(&Point::new(y)).unwrap().into_vec();
        if pts.len() > 1 && rng.random::<bool>() {
            let q = &pts[rng.random_range(0..pts.len())];
            let t: f64 = rng.random();
            pts.push(p.iter().zip(q).map(|(a, b)| t * a + (1.0 - t) * b).collect());
        } else {
            pts.push(p);
        }
    }
    pts
}

/// Inequalities `⟨g, x⟩ ≤ c` and equalities `⟨e, x⟩ = d` describing a
/// polyhedral domain in dimension `n`, or `None` for curved domains.
fn polyhedron(domain: &Domain, n: usize) -> Option<(Vec<(Vec<f64>, f64)>, Vec<(Vec<f64>, f64)>)> {
    let unit = |i: usize, s: f64| {
        let mut v = vec![0.0; n];
        v[i] = s;
        v
    };
    let (mut ineq, mut eq) = (Vec::new(), Vec::new());
    match domain.kind() {
        DomainKind::Affine(set) => {
            let a = set.matrix();
            for r in 0..a.nrows() {
                eq.push((a.row(r).iter().copied().collect(), set.rhs()[r]));
            }
        }
        DomainKind::Hyperplane { a, b } => eq.push((a.clone(), *b)),
        DomainKind::Halfspace { a, b } => ineq.push((a.clone(), *b)),
        DomainKind::Box { lo, hi } => {
            for i in 0..n {
                ineq.push((unit(i, -1.0), -lo[i]));
                ineq.push((unit(i, 1.0), hi[i]));
            }
        }
        DomainKind::NonNeg => (0..n).for_each(|i| ineq.push((unit(i, -1.0), 0.0))),
        DomainKind::LInfBall { xi } => {
            for i in 0..n {
                ineq.push((unit(i, -1.0), *xi));
                ineq.push((unit(i, 1.0), *xi));
            }
        }
        DomainKind::L1Ball { xi } => {
            for signs in 0..(1usize << n) {
                let s = (0..n).map(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
                ineq.push((s, *xi));
            }
        }
        DomainKind::Simplex { xi } => {
            (0..n).for_each(|i| ineq.push((unit(i, -1.0), 0.0)));
            eq.push((vec![1.0; n], *xi));
        }
        DomainKind::L2Ball { .. } | DomainKind::GroupL12Ball { .. } => return None,
    }
    Some((ineq, eq))
}

/// Projection onto `{x : Mx = r}` for the rows of `M`, or `None` if the rows
/// are dependent.
fn project_onto_equalities(rows: &[&(Vec<f64>, f64)], y: &[f64]) -> Option<Vec<f64>> {
    if rows.is_empty() {
        return Some(y.to_vec());
    }
    let n = y.len();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i].0[j]);
    let gram = &m * m.transpose();
    let rhs = DVector::from_fn(rows.len(), |i, _| dot(&rows[i].0, y) - rows[i].1);
    let svd = gram.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-10 * smax.max(1e-300) {
        return None;
    }
    let lambda = gram.lu().solve(&rhs)?;
    let x = DVector::from_column_slice(y) - m.transpose() * lambda;
    Some(x.data.as_vec().clone())
}

/// Exact Euclidean projection for small dimensions. Polyhedra: enumerate
/// active sets and keep the nearest feasible candidate. Balls: bisection on
/// the multiplier of the norm constraint.
pub fn oracle_projection(domain: &Domain, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    match domain.kind() {
        DomainKind::L2Ball { xi } => {
            let ny = norm(y);
            if ny <= *xi {
                return y.to_vec();
            }
            let (mut lo, mut hi) = (0.0, ny / xi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if ny / (1.0 + mid) > *xi {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return y.iter().map(|v| v / (1.0 + hi)).collect();
        }
        DomainKind::GroupL12Ball { groups, xi } => {
            let gn: Vec<f64> = groups.iter().map(|g| norm(&g.iter().map(|&i| y[i]).collect::<Vec<_>>())).collect();
            if gn.iter().sum::<f64>() <= *xi {
                return y.to_vec();
            }
            let mass = |t: f64| gn.iter().map(|v| (v - t).max(0.0)).sum::<f64>();
            let (mut lo, mut hi) = (0.0, gn.iter().cloned().fold(0.0, f64::max));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mass(mid) > *xi {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let mut x = vec![0.0; n];
            for (g, &nrm) in groups.iter().zip(&gn) {
                let s = if nrm > t { 1.0 - t / nrm } else { 0.0 };
                for &i in g {
                    x[i] = s * y[i];
                }
            }
            return x;
        }
        _ => {}
    }
    let (ineq, eq_all) = polyhedron(domain, n).expect("polyhedral domain");
    // keep a linearly independent subset of the equalities
    let mut eq: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in eq_all {
        eq.push(row);
        let refs: Vec<&(Vec<f64>, f64)> = eq.iter().collect();
        if project_onto_equalities(&refs, y).is_none() {
            eq.pop();
        }
    }
    let feasible = |x: &[f64]| ineq.iter().all(|(g, c)| dot(g, x) <= c + 1e-9);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let max_active = n.saturating_sub(eq.len().min(n));
    let mut subset: Vec<usize> = Vec::new();
    // depth-first enumeration of active inequality subsets
    fn visit(
        start: usize,
        subset: &mut Vec<usize>,
        max_active: usize,
        ineq: &[(Vec<f64>, f64)],
        eq: &[(Vec<f64>, f64)],
        y: &[f64],
        feasible: &dyn Fn(&[f64]) -> bool,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        let rows: Vec<&(Vec<f64>, f64)> = eq.iter().chain(subset.iter().map(|&i| &ineq[i])).collect();
        if let Some(x) = project_onto_equalities(&rows, y) {
            if feasible(&x) {
                let d = dist(&x, y);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    *best = Some((d, x));
                }
            }
        } else {
            return;
        }
        if subset.len() == max_active {
            return;
        }
        for i in start..ineq.len() {
            subset.push(i);
            visit(i + 1, subset, max_active, ineq, eq, y, feasible, best);
            subset.pop();
        }
    }
    visit(0, &mut subset, max_active, &ineq, &eq, y, &feasible, &mut best);
    best.expect("nonempty domain").1
}

/// Root of `φ` by plain bisection, using the library projection.
pub fn oracle_root(gamma: f64, h: &[f64], domain: &Domain, q0: f64) -> f64 {
    let phi = |e: f64| {
        let y: Vec<f64> = h.iter().map(|v| -v / e).collect();
        let u = domain.project(&Point::new(y)).unwrap();
        e * (0.5 * dot(&u, &u) + q0) + gamma + dot(h, &u)
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    while phi(hi) <= 0.0 {
        hi *= 2.0;
    }
    while phi(lo) >= 0.0 {
        lo *= 0.5;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `E_{γ,h}(x)`, written out independently of the library.
pub fn e_value(gamma: f64, h: &[f64], q0: f64, x: &[f64]) -> f64 {
    -(gamma + dot(h, x)) / (0.5 * dot(x, x) + q0)
}

/// Draws `(γ, h)` so that `γ + ⟨h, z⟩ < 0` at some feasible `z`, which
/// guarantees a positive supremum.
pub fn random_relaxation(rng: &mut ChaCha8Rng, domain: &Domain, n: usize) -> (f64, Vec<f64>) {
    let z = feasible_points(rng, domain, n, 1).pop().unwrap();
    let scale = [0.1, 1.0, 10.0][rng.random_range(0..3)];
    let h = gauss_vec(rng, n, scale);
    let gamma = -dot(&h, &z) - rng.random_range(0.01..3.0);
    (gamma, h)
}

/// Largest violation of `f(z) ≥ f(x) + ⟨g(x), z − x⟩`, relative to the
/// magnitudes involved.
pub fn subgradient_violation(obj: &dyn Objective, x: &[f64], z: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    let fx = obj.eval(x, &mut g);
    let fz = obj.value(z);
    let diff: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
    let lin = fx + dot(&g, &diff);
    (lin - fz) / (1.0 + fz.abs() + fx.abs())
}

/// Brute-force isotropic and anisotropic TV, written directly from the
/// displayed sums with 1-based indices.
pub fn tv_bruteforce(x: &[f64], m: usize, n: usize) -> (f64, f64) {
    let at = |i: usize, j: usize| x[(i - 1) * n + (j - 1)];
    let (mut itv, mut atv) = (0.0, 0.0);
    for i in 1..m {
        for j in 1..n {
            let a = at(i + 1, j) - at(i, j);
            let b = at(i, j + 1) - at(i, j);
            itv += (a * a + b * b).sqrt();
            atv += a.abs() + b.abs();
        }
    }
    for i in 1..m {
        let d = (at(i + 1, n) - at(i, n)).abs();
        itv += d;
        atv += d;
    }
    for j in 1..n {
        let d = (at(m, j + 1) - at(m, j)).abs();
        itv += d;
        atv += d;
    }
    (itv, atv)
}

/// `min ‖x‖₁ s.t. Ax = y` by enumerating basic solutions.
pub fn l1_min_enumeration(a: &DMatrix<f64>, y: &[f64]) -> f64 {
    let (m, n) = a.shape();
    let mut best = f64::INFINITY;
    let mut cols: Vec<usize> = (0..m).collect();
    loop {
        let sub = DMatrix::from_fn(m, m, |i, j| a[(i, cols[j])]);
        if let Some(x) = sub.lu().solve(&DVector::from_column_slice(y)) {
            best = best.min(x.iter().map(|v| v.abs()).sum());
        }
        // next combination
        let mut k = m;
        while k > 0 && cols[k - 1] == n - m + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        cols[k - 1] += 1;
        for j in k..m {
            cols[j] = cols[j - 1] + 1;
        }
    }
    best
}

/// Returns the CSV with the elapsed-time column removed.
pub fn strip_elapsed(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let mut fields: Vec<&str> = line.split(',').collect();
            fields.remove(1);
            fields.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// `½‖A(x − c)‖²` or `‖A(x − c)‖₁` with `c` in the domain, so the minimum
/// is 0 at `x̂ = c`.
pub fn shifted_problem(
    rng: &mut ChaCha8Rng,
    domain: &Domain,
    n: usize,
    l1: bool,
) -> (osga::problems::CompositeObjective, Vec<f64>) {
    use osga::problems::{CompositeObjective, DataTerm, DenseMatrix};
    let c = feasible_points(rng, domain, n, 1).pop().unwrap();
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal) / (n as f64).sqrt());
    let b = (&a * DVector::from_column_slice(&c)).data.as_vec().clone();
    let data = if l1 { DataTerm::L1 } else { DataTerm::L22 };
    let obj = CompositeObjective::new(data, Box::new(DenseMatrix(a)), b)
        .unwrap()
        .with_known_minimum(0.0);
    (obj, c)
}

/// Checks the per-iteration OSGA invariants on a trace and returns a
/// description of the first violation.
pub fn check_osga_trace(
    trace: &[osga::TraceRecord],
    alpha_max: f64,
    q_hat: Option<f64>,
) -> Result<(), String> {
    for (k, r) in trace.iter().enumerate() {
        let eta = r.eta.ok_or("missing eta")?;
        let alpha = r.alpha.ok_or("missing alpha")?;
        if !(alpha > 0.0 && alpha <= alpha_max) {
            return Err(format!("iter {k}: alpha {alpha}"));
        }
        if let Some(q) = q_hat {
            if !(r.f >= -1e-12 && r.f <= eta * q + 1e-8) {
                return Err(format!("iter {k}: f {} vs bound {}", r.f, eta * q));
            }
        }
        if k > 0 {
            let p = &trace[k - 1];
            if r.f > p.f {
                return Err(format!("iter {k}: f increased {} -> {}", p.f, r.f));
            }
            if eta > p.eta.unwrap() {
                return Err(format!("iter {k}: eta increased {} -> {eta}", p.eta.unwrap()));
            }
        }
    }
    Ok(())
}
