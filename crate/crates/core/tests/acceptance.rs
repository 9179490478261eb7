//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.

mod common;

use std::time::Instant;

use common::*;
use osga::harness::{execute, io::trace_to_csv, ExperimentConfig, ExperimentReport, SolverKind};
use osga::metrics::psnr;
use osga::problems::{atv, build_instance, itv, tv_subgradient, Family, InstanceSpec, TvKind};
use osga::solver::{run, OsgaParams};
use osga::subproblem::{
    eval_e, kkt_residual_group_l12, phi, solve_closed_form, solve_functional_group_l12, solve_functional_l2,
};
use osga::{Domain, DomainKind, Point, ProxParams, Relaxation};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Domain kinds in the order produced by `random_domains`.
const AFFINE: usize = 0;
const HYPERPLANE: usize = 1;
const HALFSPACE: usize = 2;
const NONNEG: usize = 4;
const L2BALL: usize = 5;
const GROUP: usize = 9;

fn random_domain(rng: &mut rand_chacha::ChaCha8Rng, which: usize, n: usize) -> Domain {
    random_domains(rng, n).swap_remove(which)
}

fn ac1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(101);
    let (mut worst_e, mut worst_phi) = (0.0f64, 0.0f64);
    for which in [AFFINE, HYPERPLANE, HALFSPACE, NONNEG, L2BALL] {
        for _ in 0..100 {
            let n = rng.random_range(2..=50);
            let domain = random_domain(&mut rng, which, n);
            let (gamma, h) = random_relaxation(&mut rng, &domain, n);
            let q0 = rng.random_range(0.05..5.0);
            let rel = Relaxation::new(gamma, h.clone());
            let sol = match solve_closed_form(&rel, &domain, q0) {
                Ok(s) => s,
                Err(e) => return outcome(false, format!("{} closed form failed: {e}", domain.name())),
            };
            worst_e = worst_e.max(rel_err(sol.e, oracle_root(gamma, &h, &domain, q0)));
            worst_phi = worst_phi.max(phi(sol.e, &rel, &domain, q0).unwrap().abs() / gamma.abs().max(1.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_e <= 1e-8 && worst_phi <= 1e-10 && secs < 10.0,
        format!("500 instances: max rel e error {worst_e:.1e}, max |phi|/max(1,|gamma|) {worst_phi:.1e}, {secs:.2} s"),
    )
}

fn ac2_functional_kkt() -> Outcome {
    let mut rng = rng(102);
    let mut worst_l2 = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=50);
        let domain = random_domain(&mut rng, L2BALL, n);
        let DomainKind::L2Ball { xi } = *domain.kind() else { unreachable!() };
        let (gamma, h) = random_relaxation(&mut rng, &domain, n);
        let q0 = rng.random_range(0.05..5.0);
        let rel = Relaxation::new(gamma, h);
        let fun = solve_functional_l2(&rel, xi, q0).unwrap();
        let cf = solve_closed_form(&rel, &domain, q0).unwrap();
        worst_l2 = worst_l2.max(rel_err(fun.e, cf.e));
    }
    let (mut worst_kkt, mut worst_gap) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..100 {
        let n = rng.random_range(2..=30);
        let domain = random_domain(&mut rng, GROUP, n);
        let DomainKind::GroupL12Ball { groups, xi } = domain.kind().clone() else { unreachable!() };
        let (gamma, h) = random_relaxation(&mut rng, &domain, n);
        let q0 = rng.random_range(0.05..5.0);
        let rel = Relaxation::new(gamma, h.clone());
        let sol = match solve_functional_group_l12(&rel, &groups, xi, q0) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("group solver failed: {e}")),
        };
        worst_kkt = worst_kkt.max(kkt_residual_group_l12(&rel, &groups, xi, q0, &sol));
        let eu = eval_e(&rel, q0, &sol.u);
        for z in feasible_points(&mut rng, &domain, n, 1000) {
            worst_gap = worst_gap.max(e_value(gamma, &h, q0, &z) - eu);
        }
    }
    outcome(
        worst_l2 <= 1e-8 && worst_kkt <= 1e-6 && worst_gap <= 1e-8,
        format!("l2 rel e error {worst_l2:.1e}; group KKT residual {worst_kkt:.1e}, max E(z) - E(u) {worst_gap:.1e}"),
    )
}

fn ac3_projection_suite() -> Outcome {
    let mut rng = rng(103);
    let (mut member, mut idem, mut expand, mut vi) = (0.0f64, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    let mut count = 0;
    for n in [2, 7, 25, 50] {
        for domain in random_domains(&mut rng, n) {
            count += 1;
            let zs = feasible_points(&mut rng, &domain, n, 100);
            let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
            for k in 0..1000 {
                let y = gauss_vec(&mut rng, n, [0.5, 2.0, 10.0][k % 3]);
                let p = domain.project(&Point::new(y.clone())).unwrap().into_vec();
                member = member.max(domain.residual(&p));
                let again = domain.project(&Point::new(p.clone())).unwrap().into_vec();
                idem = idem.max(dist(&again, &p));
                if let Some((py, pp)) = &prev {
                    expand = expand.max(dist(&p, pp) - dist(&y, py));
                }
                if k < 10 {
                    let r: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
                    for z in &zs {
                        let d: Vec<f64> = z.iter().zip(&p).map(|(a, b)| a - b).collect();
                        vi = vi.max(dot(&r, &d));
                    }
                }
                prev = Some((y, p));
            }
        }
    }
    outcome(
        member <= 1e-10 && idem <= 1e-12 && expand <= 1e-12 && vi <= 1e-10,
        format!(
            "{count} domains x 1000 points: residual {member:.1e}, idempotence {idem:.1e}, expansion {expand:.1e}, VI {vi:.1e}"
        ),
    )
}

fn ac4_osga_invariants() -> Outcome {
    let mut rng = rng(104);
    let mut problems = 0;
    let mut worst_f = 0.0f64;
    for l1 in [false, true] {
        let n = 12;
        for domain in random_domains(&mut rng, n) {
            problems += 1;
            let (obj, c) = shifted_problem(&mut rng, &domain, n, l1);
            let params = OsgaParams {
                max_iter: 300,
                ..OsgaParams::default()
            };
            let x0 = domain.project(&Point::new(gauss_vec(&mut rng, n, 1.0))).unwrap();
            let mut trace = Vec::new();
            let res = match run(&obj, &domain, &x0, &params, None, &mut |r| trace.push(r.clone())) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("{} run failed: {e}", domain.name())),
            };
            let q_hat = ProxParams::from_start(&x0).eval(&c);
            if let Err(msg) = check_osga_trace(&trace, params.alpha_max, Some(q_hat)) {
                let data = if l1 { "l1" } else { "l2" };
                return outcome(false, format!("{data} data on {}: {msg}", domain.name()));
            }
            worst_f = worst_f.max(res.f);
        }
    }
    outcome(true, format!("{problems} problems, 300 iterations each; largest final f - f_hat {worst_f:.1e}"))
}

fn ac5_rate() -> Outcome {
    let start = Instant::now();
    let mut spec = InstanceSpec::new(Family::Ridge);
    spec.n = 100;
    spec.cond = 1e6;
    spec.xi = 5.0;
    spec.seed = 105;
    let inst = build_instance(&spec).unwrap();
    let params = OsgaParams {
        max_iter: 20_000,
        ..OsgaParams::default()
    };
    let mut trace = Vec::new();
    run(&inst.objective, &inst.domain, &inst.x0, &params, None, &mut |r| trace.push(r.clone())).unwrap();
    let eps = [1e-2, 1e-3, 1e-4];
    let mut iters = Vec::new();
    for &e in &eps {
        match trace.iter().find(|r| r.delta.is_some_and(|d| d <= e)) {
            Some(r) => iters.push(r.iter.max(1) as f64),
            None => return outcome(false, format!("delta {e:e} not reached in {} iterations", params.max_iter)),
        }
    }
    // least-squares slope of log(iterations) against log(1/eps)
    let xs: Vec<f64> = eps.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = iters.iter().map(|k| k.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        slope <= 0.55 && secs < 30.0,
        format!("iterations {iters:?} for eps 1e-2/1e-3/1e-4, slope {slope:.3}, {secs:.2} s"),
    )
}

fn run_config(text: &str) -> ExperimentReport {
    execute(&ExperimentConfig::parse(text).unwrap()).unwrap()
}

fn find(report: &ExperimentReport, kind: SolverKind) -> &osga::harness::SolverRun {
    report.runs.iter().find(|r| r.solver == kind).unwrap()
}

fn ac6_ridge_ordering() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for xi in [10, 25] {
        let report = run_config(&format!(
            "family = ridge\nseed = 1\nn = 200\ncond = 1e6\nxi = {xi}\nmax_iter = 500\nreference = analytic\n"
        ));
        let (o, p, s) = (
            find(&report, SolverKind::Osga),
            find(&report, SolverKind::Pga),
            find(&report, SolverKind::Psga),
        );
        let (d_o, d_s) = (o.delta_final.unwrap(), s.delta_final.unwrap());
        pass &= o.result.f <= p.result.f && d_o <= 0.1 * d_s;
        details.push(format!(
            "xi={xi}: f OSGA {:.6e} <= PGA {:.6e}, delta OSGA {d_o:.1e} vs PSGA {d_s:.1e}",
            o.result.f, p.result.f
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(pass && secs < 60.0, format!("{}; {secs:.1} s", details.join("; ")))
}

fn ac7_deblur_l22itv() -> Outcome {
    let start = Instant::now();
    let report = run_config(
        "family = deblur_l22itv\nseed = 1\nrows = 64\ncols = 64\nblur = uniform\nblur_size = 9\n\
         noise_kind = gaussian\nnoise = 1e-3\nlambda = 1e-4\ndomain = nonneg\nmax_iter = 100\nsolvers = osga, psga\n",
    );
    let (o, s) = (find(&report, SolverKind::Osga), find(&report, SolverKind::Psga));
    let (io, is) = (o.isnr.unwrap(), s.isnr.unwrap());
    let (d_o, d_s) = (o.delta_final.unwrap(), s.delta_final.unwrap());
    let secs = start.elapsed().as_secs_f64();
    outcome(
        io > 0.0 && io >= is - 0.1 && d_o < d_s && secs < 120.0,
        format!("ISNR OSGA {io:.2} dB, PSGA {is:.2} dB; delta OSGA {d_o:.1e}, PSGA {d_s:.1e}; {secs:.1} s"),
    )
}

fn ac8_deblur_l1itv() -> Outcome {
    let start = Instant::now();
    let report = run_config(
        "family = deblur_l1itv\nseed = 1\nrows = 64\ncols = 64\nblur = gaussian\nblur_size = 7\nblur_sigma = 5\n\
         noise_kind = salt_pepper\nnoise = 0.5\nlambda = 1e-1\nmax_iter = 100\nsolvers = osga\n",
    );
    let o = find(&report, SolverKind::Osga);
    let truth = report.instance.x_true.as_ref().unwrap();
    let input = psnr(report.instance.observation.as_ref().unwrap(), truth).unwrap();
    let out = o.psnr.unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        out - input >= 3.0 && secs < 120.0,
        format!("PSNR OSGA {out:.2} dB vs input {input:.2} dB (gain {:.2} dB); {secs:.1} s", out - input),
    )
}

fn ac9_determinism() -> Outcome {
    let configs = [
        "family = ridge\nseed = 9\nn = 60\ncond = 1e4\nmax_iter = 200\n",
        "family = deblur_l22itv\nseed = 9\nrows = 24\ncols = 24\nmax_iter = 30\n",
        "family = deblur_l1itv\nseed = 9\nrows = 24\ncols = 24\nmax_iter = 30\nsolvers = osga, psga\n",
        "family = basis_pursuit\nseed = 9\nm = 12\nn = 30\nk = 3\nmax_iter = 200\nsolvers = osga, psga\n",
    ];
    let mut traces = 0;
    for text in configs {
        let render = |r: &ExperimentReport| -> Vec<String> {
            r.runs.iter().map(|run| strip_elapsed(&trace_to_csv(&run.result.trace))).collect()
        };
        let (a, b) = (render(&run_config(text)), render(&run_config(text)));
        if a != b {
            return outcome(false, format!("traces differ for config:\n{text}"));
        }
        traces += a.len();
    }
    outcome(true, format!("{traces} traces identical across reruns"))
}

fn ac10_tv() -> Outcome {
    let mut rng = rng(110);
    let mut images = 0;
    for m in 2..=4 {
        for n in 2..=4 {
            for _ in 0..50 {
                images += 1;
                let vals: Vec<f64> = (0..m * n).map(|_| rng.random::<f64>()).collect();
                let x = Point::image(m, n, vals.clone()).unwrap();
                let (bi, ba) = tv_bruteforce(&vals, m, n);
                if itv(&x).unwrap() != bi || atv(&x).unwrap() != ba {
                    return outcome(false, format!("mismatch at {m}x{n}: {vals:?}"));
                }
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for kind in [TvKind::Isotropic, TvKind::Anisotropic] {
        let tv = |p: &Point| match kind {
            TvKind::Isotropic => itv(p).unwrap(),
            TvKind::Anisotropic => atv(p).unwrap(),
        };
        for k in 0..1000 {
            let mut vals: Vec<f64> = (0..64).map(|_| rng.random::<f64>()).collect();
            if k % 2 == 0 {
                // flat patches put some differences exactly at the kink
                vals.iter_mut().for_each(|v| *v = (*v * 3.0).floor());
            }
            let x = Point::image(8, 8, vals).unwrap();
            // nearby points make the inequality nearly tight
            let spread = if k % 4 < 2 { 1e-3 } else { 1.0 };
            let zv: Vec<f64> = x.iter().map(|v| v + spread * (rng.random::<f64>() - 0.5)).collect();
            let z = Point::image(8, 8, zv).unwrap();
            let g = tv_subgradient(&x, kind).unwrap();
            let diff: Vec<f64> = z.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
            worst = worst.max(tv(&x) + dot(&g, &diff) - tv(&z));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{images} images match exactly; 2000 subgradient pairs, worst violation {worst:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("AC-1 subproblem oracle equivalence", ac1_oracle_equivalence),
        ("AC-2 functional constraints KKT", ac2_functional_kkt),
        ("AC-3 projection suite", ac3_projection_suite),
        ("AC-4 OSGA invariants", ac4_osga_invariants),
        ("AC-5 smooth rate", ac5_rate),
        ("AC-6 ridge ordering", ac6_ridge_ordering),
        ("AC-7 deblur L22ITV", ac7_deblur_l22itv),
        ("AC-8 deblur L1ITV", ac8_deblur_l1itv),
        ("AC-9 determinism", ac9_determinism),
        ("AC-10 TV correctness", ac10_tv),
    ];
    let results: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f)| s.spawn(move || std::panic::catch_unwind(f)))
            .collect();
        handles
            .into_iter()
            .map(|h| match h.join().unwrap() {
                Ok(o) => o,
                Err(_) => outcome(false, "panicked".into()),
            })
            .collect()
    });
    let mut failed = 0;
    for ((name, _), o) in criteria.iter().zip(&results) {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("[{tag}] {name}: {}", o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
