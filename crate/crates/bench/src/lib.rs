//! Shared fixtures for the criterion benchmarks.

use osga::nalgebra::DMatrix;
use osga::problems::generators::rng;
use osga::problems::{build_instance, Family, Instance, InstanceSpec};
use osga::{Domain, Point, Relaxation};
use rand::Rng;

/// Uniform vector on `[-scale, scale]`.
pub fn uniform_vec(seed: u64, n: usize, scale: f64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| scale * (2.0 * r.random::<f64>() - 1.0)).collect()
}

/// One domain of each kind in dimension `n`, labelled.
pub fn domains(n: usize) -> Vec<(&'static str, Domain)> {
    let m = (n / 4).max(1);
    let a = DMatrix::from_row_slice(m, n, &uniform_vec(1, m * n, 1.0));
    let groups: Vec<Vec<usize>> = (0..n).collect::<Vec<_>>().chunks(4).map(|c| c.to_vec()).collect();
    vec![
        ("affine", Domain::affine(a, uniform_vec(2, m, 1.0)).unwrap()),
        ("hyperplane", Domain::hyperplane(uniform_vec(3, n, 1.0), 0.5).unwrap()),
        ("halfspace", Domain::halfspace(uniform_vec(4, n, 1.0), -0.5).unwrap()),
        ("box", Domain::boxed(vec![-0.5; n], vec![0.5; n]).unwrap()),
        ("nonneg", Domain::nonneg()),
        ("l2ball", Domain::l2_ball(1.0).unwrap()),
        ("linfball", Domain::linf_ball(0.5).unwrap()),
        ("l1ball", Domain::l1_ball(1.0).unwrap()),
        ("simplex", Domain::simplex(1.0).unwrap()),
        ("groupl12ball", Domain::group_l12_ball(groups, 1.0).unwrap()),
    ]
}

/// Point well outside every domain from [`domains`].
pub fn outside_point(n: usize) -> Point {
    Point::new(uniform_vec(5, n, 3.0))
}

/// Relaxation with a guaranteed positive root: `γ + ⟨h, z⟩ < 0` at a feasible `z`.
pub fn relaxation(domain: &Domain, n: usize) -> Relaxation {
    let h = uniform_vec(6, n, 1.0);
    let z = domain.project(&Point::zeros(n)).unwrap();
    let hz: f64 = h.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
    Relaxation::new(-hz - 1.0, h)
}

/// Ridge regression over an l2 ball.
pub fn ridge(n: usize) -> Instance {
    let spec = InstanceSpec {
        n,
        cond: 1e4,
        xi: 10.0,
        seed: 1,
        ..InstanceSpec::new(Family::Ridge)
    };
    build_instance(&spec).unwrap()
}

/// Small `L22ITV` deblurring problem.
pub fn deblur(side: usize) -> Instance {
    let spec = InstanceSpec {
        rows: side,
        cols: side,
        seed: 1,
        ..InstanceSpec::new(Family::DeblurL22Itv)
    };
    build_instance(&spec).unwrap()
}
