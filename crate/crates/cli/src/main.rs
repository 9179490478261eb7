//! `osga` command-line runner.
//!
//! Exit codes: 0 on success, 2 for invalid arguments or configuration,
//! 3 when a run fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use osga::harness::{expand_grid_raw, parse_raw, run_experiment, summary_to_csv, ExperimentConfig, RawConfig};
use osga::nalgebra::DMatrix;
use osga::{Domain, Error, Point};

#[derive(Parser)]
#[command(name = "osga", version, about = "Run OSGA experiments and projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by `solve` and `bench`; each overrides the config file.
#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Comma-separated solver list, e.g. `osga,pga`.
    #[arg(long)]
    solver: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its summary.
    Solve(RunArgs),
    /// Run every point of a parameter grid (comma lists in xi, lambda,
    /// seed, cond or n).
    Bench(RunArgs),
    /// Project a point onto a domain and print the result.
    Project(ProjectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Affine,
    Hyperplane,
    Halfspace,
    Box,
    Nonneg,
    L2ball,
    Linfball,
    L1ball,
    Simplex,
    Groupl12ball,
}

#[derive(clap::Args)]
struct ProjectArgs {
    #[arg(long, value_enum)]
    domain: DomainArg,
    /// Point to project, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Radius of a ball or total of a simplex.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<f64>,
    /// Normal vector, or matrix rows separated by `;` for affine sets.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Offset, or right-hand side vector for affine sets.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<String>,
    /// Index groups separated by `;`, e.g. `0,1;2`.
    #[arg(long)]
    groups: Option<String>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config(_)) { 2 } else { 3 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn load(args: &RunArgs) -> Result<RawConfig, Failure> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut raw = parse_raw(&text)?;
    if let Some(seed) = args.seed {
        raw.insert("seed".into(), seed.to_string());
    }
    if let Some(dir) = &args.out_dir {
        raw.insert("out_dir".into(), dir.display().to_string());
    }
    if let Some(n) = args.max_iter {
        raw.insert("max_iter".into(), n.to_string());
    }
    if let Some(list) = &args.solver {
        raw.insert("solvers".into(), list.clone());
    }
    Ok(raw)
}

fn solve(args: &RunArgs) -> Result<(), Failure> {
    let cfg = ExperimentConfig::from_raw(&load(args)?)?;
    cfg.validate()?;
    let report = run_experiment(&cfg)?;
    print!("{}", summary_to_csv(&report));
    eprintln!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn bench(args: &RunArgs) -> Result<(), Failure> {
    let grid = expand_grid_raw(&load(args)?)?;
    for (_, cfg) in &grid {
        cfg.validate()?;
    }
    for (label, cfg) in &grid {
        let report = run_experiment(cfg)?;
        let name = if label.is_empty() { "default" } else { label };
        println!("# {name}");
        print!("{}", summary_to_csv(&report));
    }
    eprintln!("wrote {} grid point(s)", grid.len());
    Ok(())
}

fn parse_vec(flag: &str, s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("--{flag}: invalid number '{}'", t.trim()))))
        .collect()
}

fn parse_groups(s: &str) -> Result<Vec<Vec<usize>>, Failure> {
    s.split(';')
        .map(|g| {
            g.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("--groups: invalid index '{}'", t.trim()))))
                .collect()
        })
        .collect()
}

fn required<'a>(flag: &str, v: &'a Option<String>) -> Result<&'a str, Failure> {
    v.as_deref().ok_or_else(|| usage(format!("--{flag} is required for this domain")))
}

fn build_domain(args: &ProjectArgs, n: usize) -> Result<Domain, Failure> {
    let xi = || args.xi.ok_or_else(|| usage("--xi is required for this domain"));
    let scalar = |flag: &str, v: &Option<String>| -> Result<f64, Failure> {
        let s = required(flag, v)?;
        s.trim().parse().map_err(|_| usage(format!("--{flag}: invalid number '{s}'")))
    };
    let domain = match args.domain {
        DomainArg::Affine => {
            let rows = required("a", &args.a)?
                .split(';')
                .map(|r| parse_vec("a", r))
                .collect::<Result<Vec<_>, _>>()?;
            if rows.iter().any(|r| r.len() != n) {
                return Err(usage(format!("--a: every row needs {n} entries")));
            }
            let flat: Vec<f64> = rows.concat();
            let a = DMatrix::from_row_slice(rows.len(), n, &flat);
            Domain::affine(a, parse_vec("b", required("b", &args.b)?)?)
        }
        DomainArg::Hyperplane => Domain::hyperplane(parse_vec("a", required("a", &args.a)?)?, scalar("b", &args.b)?),
        DomainArg::Halfspace => Domain::halfspace(parse_vec("a", required("a", &args.a)?)?, scalar("b", &args.b)?),
        DomainArg::Box => Domain::boxed(
            parse_vec("lo", required("lo", &args.lo)?)?,
            parse_vec("hi", required("hi", &args.hi)?)?,
        ),
        DomainArg::Nonneg => Ok(Domain::nonneg()),
        DomainArg::L2ball => Domain::l2_ball(xi()?),
        DomainArg::Linfball => Domain::linf_ball(xi()?),
        DomainArg::L1ball => Domain::l1_ball(xi()?),
        DomainArg::Simplex => Domain::simplex(xi()?),
        DomainArg::Groupl12ball => {
            Domain::group_l12_ball(parse_groups(required("groups", &args.groups)?)?, xi()?)
        }
    };
    // bad domain parameters come from the command line
    domain.map_err(|e| usage(e.to_string()))
}

fn project(args: &ProjectArgs) -> Result<(), Failure> {
    let y = parse_vec("point", &args.point)?;
    let domain = build_domain(args, y.len())?;
    domain.check_dim(y.len()).map_err(|e| usage(e.to_string()))?;
    let p = domain.project(&Point::new(y))?;
    let text: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    println!("{}", text.join(","));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Project(args) => project(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
