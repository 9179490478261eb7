//! Flat `key = value` experiment configuration.
//!
//! Blank lines and text after `#` are ignored. Keys may appear once.
//! See the repository README for the list of keys.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use crate::baselines::{PgaParams, PsgaParams};
use crate::error::{Error, Result};
use crate::problems::{Blur, Family, ImageDomain, InstanceSpec, Noise, Regularizer};
use crate::solver::OsgaParams;
use crate::subproblem::SubproblemMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Osga,
    Pga,
    Psga,
}

impl SolverKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "osga" => Ok(SolverKind::Osga),
            "pga" => Ok(SolverKind::Pga),
            "psga" => Ok(SolverKind::Psga),
            _ => Err(Error::Config(format!("unknown solver '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Osga => "osga",
            SolverKind::Pga => "pga",
            SolverKind::Psga => "psga",
        }
    }
}

/// Where the optimal value used for `δ_k` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferencePolicy {
    /// The generator's exact optimum; an error for families without one.
    Analytic,
    /// Best value reached by any configured solver run with ten times the
    /// iteration budget.
    BestFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub solvers: Vec<SolverKind>,
    pub max_iter: usize,
    pub reference: ReferencePolicy,
    pub out_dir: PathBuf,
    /// Solver tuning; their `max_iter` fields are overridden by `max_iter`.
    pub osga: OsgaParams,
    pub pga: PgaParams,
    pub psga: PsgaParams,
}

/// Keys that `bench` accepts as comma-separated lists.
pub const GRID_KEYS: [&str; 5] = ["xi", "lambda", "seed", "cond", "n"];

const KNOWN_KEYS: &[&str] = &[
    "family",
    "seed",
    "n",
    "cond",
    "noise",
    "xi",
    "lambda",
    "rows",
    "cols",
    "blur",
    "blur_size",
    "blur_sigma",
    "noise_kind",
    "regularizer",
    "domain",
    "m",
    "k",
    "solvers",
    "max_iter",
    "reference",
    "out_dir",
    "time_budget_s",
    "osga.delta",
    "osga.alpha_max",
    "osga.kappa",
    "osga.kappa_prime",
    "osga.mu",
    "osga.eta_tol",
    "osga.subproblem",
    "pga.beta",
    "pga.c",
    "pga.t0",
    "pga.max_backtracks",
    "psga.a",
];

/// Parsed key-value pairs in key order.
pub type RawConfig = BTreeMap<String, String>;

pub fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut map = RawConfig::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
    }
    Ok(map)
}

fn num<T: FromStr>(map: &RawConfig, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
        })
        .transpose()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(&parse_raw(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_raw(map: &RawConfig) -> Result<Self> {
        for key in GRID_KEYS {
            if map.get(key).is_some_and(|v| v.contains(',')) {
                return Err(Error::Config(format!("{key}: value lists are only allowed in bench grids")));
            }
        }
        let family = Family::parse(map.get("family").ok_or_else(|| Error::Config("missing key 'family'".into()))?)?;
        let mut spec = InstanceSpec::new(family);
        spec.seed = num(map, "seed")?.ok_or_else(|| Error::Config("missing key 'seed'".into()))?;
        if let Some(v) = num(map, "n")? {
            spec.n = v;
        }
        if let Some(v) = num(map, "cond")? {
            spec.cond = v;
        }
        if let Some(v) = num(map, "xi")? {
            spec.xi = v;
        }
        if let Some(v) = num(map, "lambda")? {
            spec.lambda = v;
        }
        if let Some(v) = num(map, "rows")? {
            spec.rows = v;
        }
        if let Some(v) = num(map, "cols")? {
            spec.cols = v;
        }
        if let Some(v) = num(map, "m")? {
            spec.m = v;
        }
        if let Some(v) = num(map, "k")? {
            spec.k = v;
        }

        let blur_size: Option<usize> = num(map, "blur_size")?;
        let blur_sigma: Option<f64> = num(map, "blur_sigma")?;
        spec.blur = match map.get("blur").map(String::as_str) {
            None => match spec.blur {
                Blur::Uniform(s) => Blur::Uniform(blur_size.unwrap_or(s)),
                Blur::Gaussian { size, sigma } => Blur::Gaussian {
                    size: blur_size.unwrap_or(size),
                    sigma: blur_sigma.unwrap_or(sigma),
                },
            },
            Some("uniform") => Blur::Uniform(blur_size.unwrap_or(9)),
            Some("gaussian") => Blur::Gaussian {
                size: blur_size.unwrap_or(7),
                sigma: blur_sigma.unwrap_or(5.0),
            },
            Some(other) => return Err(Error::Config(format!("unknown blur '{other}'"))),
        };

        // `noise` is the ridge noise amplitude or the image noise level
        let noise: Option<f64> = num(map, "noise")?;
        if family.is_deblur() {
            let kind = map.get("noise_kind").map(String::as_str);
            spec.image_noise = match (kind, spec.image_noise) {
                (None, Noise::Gaussian(s)) | (Some("gaussian"), Noise::Gaussian(s)) => Noise::Gaussian(noise.unwrap_or(s)),
                (None, Noise::SaltPepper(l)) | (Some("salt_pepper"), Noise::SaltPepper(l)) => {
                    Noise::SaltPepper(noise.unwrap_or(l))
                }
                (Some("gaussian"), _) => Noise::Gaussian(noise.unwrap_or(1e-3)),
                (Some("salt_pepper"), _) => Noise::SaltPepper(noise.unwrap_or(0.5)),
                (Some(other), _) => return Err(Error::Config(format!("unknown noise_kind '{other}'"))),
            };
        } else if let Some(v) = noise {
            spec.noise = v;
        }

        spec.regularizer = match map.get("regularizer").map(String::as_str) {
            None => spec.regularizer,
            Some("itv") => Regularizer::Itv,
            Some("atv") => Regularizer::Atv,
            Some(other) => return Err(Error::Config(format!("unknown regularizer '{other}'"))),
        };
        spec.domain = match map.get("domain").map(String::as_str) {
            None => spec.domain,
            Some("nonneg") => ImageDomain::NonNeg,
            Some("box") => ImageDomain::UnitBox,
            Some(other) => return Err(Error::Config(format!("unknown domain '{other}'"))),
        };

        let solvers = match map.get("solvers") {
            None => vec![SolverKind::Osga, SolverKind::Pga, SolverKind::Psga],
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(SolverKind::parse)
                .collect::<Result<Vec<_>>>()?,
        };
        let default_iter = if family.is_deblur() { 100 } else { 500 };
        let max_iter = num(map, "max_iter")?.unwrap_or(default_iter);
        let reference = match map.get("reference").map(String::as_str) {
            None | Some("best_found") => ReferencePolicy::BestFound,
            Some("analytic") => ReferencePolicy::Analytic,
            Some(other) => return Err(Error::Config(format!("unknown reference policy '{other}'"))),
        };
        let out_dir = PathBuf::from(map.get("out_dir").map(String::as_str).unwrap_or("out"));
        let time_budget = num::<f64>(map, "time_budget_s")?.map(Duration::from_secs_f64);

        let mut osga = OsgaParams {
            time_budget,
            ..Default::default()
        };
        let set = |field: &mut f64, key: &str| -> Result<()> {
            if let Some(v) = num(map, key)? {
                *field = v;
            }
            Ok(())
        };
        set(&mut osga.delta, "osga.delta")?;
        set(&mut osga.alpha_max, "osga.alpha_max")?;
        set(&mut osga.kappa, "osga.kappa")?;
        set(&mut osga.kappa_prime, "osga.kappa_prime")?;
        set(&mut osga.mu, "osga.mu")?;
        set(&mut osga.eta_tol, "osga.eta_tol")?;
        osga.subproblem = match map.get("osga.subproblem").map(String::as_str) {
            None | Some("auto") => SubproblemMethod::Auto,
            Some("closed_form") => SubproblemMethod::ClosedForm,
            Some("generic") => SubproblemMethod::Generic,
            Some("functional") => SubproblemMethod::Functional,
            Some(other) => return Err(Error::Config(format!("unknown subproblem method '{other}'"))),
        };
        let mut pga = PgaParams {
            time_budget,
            ..Default::default()
        };
        set(&mut pga.beta, "pga.beta")?;
        set(&mut pga.c, "pga.c")?;
        set(&mut pga.t0, "pga.t0")?;
        if let Some(v) = num(map, "pga.max_backtracks")? {
            pga.max_backtracks = v;
        }
        let mut psga = PsgaParams {
            time_budget,
            ..Default::default()
        };
        set(&mut psga.a, "psga.a")?;

        let cfg = ExperimentConfig {
            instance: spec,
            solvers,
            max_iter,
            reference,
            out_dir,
            osga,
            pga,
            psga,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::Config("at least one solver is required".into()));
        }
        let mut seen = self.solvers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.solvers.len() {
            return Err(Error::Config("solvers listed more than once".into()));
        }
        self.osga.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// Expands comma lists in [`GRID_KEYS`] into the cartesian product of
/// configurations. Each point gets its own subdirectory of `out_dir`, named
/// after the varying keys, e.g. `xi-10_seed-2`.
pub fn expand_grid(text: &str) -> Result<Vec<(String, ExperimentConfig)>> {
    expand_grid_raw(&parse_raw(text)?)
}

/// [`expand_grid`] on an already parsed config.
pub fn expand_grid_raw(raw: &RawConfig) -> Result<Vec<(String, ExperimentConfig)>> {
    let axes: Vec<(&str, Vec<String>)> = GRID_KEYS
        .iter()
        .filter_map(|&key| {
            let v = raw.get(key)?;
            v.contains(',')
                .then(|| (key, v.split(',').map(|s| s.trim().to_string()).collect()))
        })
        .collect();
    let mut points: Vec<Vec<(&str, String)>> = vec![Vec::new()];
    for (key, values) in &axes {
        if values.iter().any(String::is_empty) {
            return Err(Error::Config(format!("{key}: empty entry in list")));
        }
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((*key, v.clone()));
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .map(|point| {
            let mut map = raw.clone();
            let label = point
                .iter()
                .map(|(k, v)| format!("{k}-{v}"))
                .collect::<Vec<_>>()
                .join("_");
            for (k, v) in &point {
                map.insert(k.to_string(), v.clone());
            }
            let mut cfg = ExperimentConfig::from_raw(&map)?;
            if !label.is_empty() {
                cfg.out_dir = cfg.out_dir.join(&label);
            }
            Ok((label, cfg))
        })
        .collect()
}
