//! Experiment runner: builds an instance, runs the configured solvers,
//! computes `δ_k`, PSNR and ISNR, and writes traces, a summary and images.

pub mod config;
pub mod io;

use std::fmt::Write as _;

pub use config::{expand_grid, expand_grid_raw, parse_raw, ExperimentConfig, RawConfig, ReferencePolicy, SolverKind};

use crate::baselines::{run_pga, run_psga, PgaParams, PsgaParams};
use crate::error::{Error, Result};
use crate::metrics::{delta_k, isnr, psnr};
use crate::problems::{build_instance, Instance};
use crate::solver::{self, OsgaParams};
use crate::trace::SolveResult;

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solver: SolverKind,
    pub result: SolveResult,
    pub psnr: Option<f64>,
    pub isnr: Option<f64>,
    pub time_s: f64,
    pub delta_final: Option<f64>,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub instance: Instance,
    /// Reference optimum used for `δ_k`.
    pub f_hat: Option<f64>,
    pub runs: Vec<SolverRun>,
}

pub fn run_solver(kind: SolverKind, instance: &Instance, cfg: &ExperimentConfig, max_iter: usize) -> Result<SolveResult> {
    let obj = &instance.objective;
    let (domain, x0) = (&instance.domain, &instance.x0);
    let mut sink = |_: &_| {};
    match kind {
        SolverKind::Osga => {
            let params = OsgaParams {
                max_iter,
                ..cfg.osga.clone()
            };
            solver::run(obj, domain, x0, &params, None, &mut sink)
        }
        SolverKind::Pga => {
            let params = PgaParams {
                max_iter,
                ..cfg.pga.clone()
            };
            run_pga(obj, domain, x0, &params, &mut sink)
        }
        SolverKind::Psga => {
            let params = PsgaParams {
                max_iter,
                ..cfg.psga.clone()
            };
            run_psga(obj, domain, x0, &params, &mut sink)
        }
    }
}

/// Runs the experiment without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let instance = build_instance(&cfg.instance).map_err(|e| Error::Config(e.to_string()))?;
    let mut results = Vec::with_capacity(cfg.solvers.len());
    for &kind in &cfg.solvers {
        results.push((kind, run_solver(kind, &instance, cfg, cfg.max_iter)?));
    }

    let f_hat = match cfg.reference {
        ReferencePolicy::Analytic => Some(instance.f_hat.ok_or_else(|| {
            Error::Config(format!("family {} has no analytic optimum", cfg.instance.family.name()))
        })?),
        ReferencePolicy::BestFound => {
            let mut best = results.iter().map(|(_, r)| r.f).fold(f64::INFINITY, f64::min);
            for &kind in &cfg.solvers {
                best = best.min(run_solver(kind, &instance, cfg, 10 * cfg.max_iter)?.f);
            }
            Some(best)
        }
    };

    let runs = results
        .into_iter()
        .map(|(solver, mut result)| {
            let f0 = result.trace.first().map_or(result.f, |r| r.f);
            for rec in &mut result.trace {
                rec.delta = f_hat.and_then(|fh| delta_k(rec.f, fh, f0).ok());
            }
            let images = instance.x_true.as_ref().zip(instance.observation.as_ref());
            let psnr = images.and_then(|(truth, _)| psnr(&result.x, truth).ok());
            let isnr = images.and_then(|(truth, y)| isnr(&result.x, y, truth).ok());
            SolverRun {
                solver,
                psnr,
                isnr,
                time_s: result.trace.last().map_or(0.0, |r| r.elapsed),
                delta_final: result.trace.last().and_then(|r| r.delta),
                result,
            }
        })
        .collect();
    Ok(ExperimentReport { instance, f_hat, runs })
}

pub const SUMMARY_HEADER: &str = "solver,f_b,psnr,isnr,time_s,iterations,delta_final,f_hat";

pub fn summary_to_csv(report: &ExperimentReport) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = format!("{SUMMARY_HEADER}\n");
    for run in &report.runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            run.solver.name(),
            run.result.f,
            opt(run.psnr),
            opt(run.isnr),
            run.time_s,
            run.result.iterations,
            opt(run.delta_final),
            opt(report.f_hat)
        );
    }
    out
}

/// Writes `<solver>.csv` traces, `summary.csv` and, for images,
/// `truth.pgm`, `observed.pgm` and `<solver>.pgm` into the output directory.
pub fn write_artifacts(cfg: &ExperimentConfig, report: &ExperimentReport) -> Result<()> {
    let dir = &cfg.out_dir;
    for run in &report.runs {
        io::write_trace_csv(&dir.join(format!("{}.csv", run.solver.name())), &run.result.trace)?;
    }
    io::write_file(&dir.join("summary.csv"), summary_to_csv(report).as_bytes())?;
    if let (Some(truth), Some(y)) = (&report.instance.x_true, &report.instance.observation) {
        io::write_pgm(&dir.join("truth.pgm"), truth, true)?;
        io::write_pgm(&dir.join("observed.pgm"), y, true)?;
        for run in &report.runs {
            io::write_pgm(&dir.join(format!("{}.pgm", run.solver.name())), &run.result.x, true)?;
        }
    }
    Ok(())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = execute(cfg)?;
    write_artifacts(cfg, &report)?;
    Ok(report)
}
