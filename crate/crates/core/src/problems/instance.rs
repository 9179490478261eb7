use crate::error::{Error, Result};
use crate::point::Point;
use crate::projections::Domain;

use super::generators::{gen_basis_pursuit, gen_deblur, gen_ridge, phantom, Blur, Noise};
use super::linear::{DenseMatrix, Identity};
use super::objective::{CompositeObjective, DataTerm, Regularizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ridge,
    BasisPursuit,
    DeblurL22Itv,
    DeblurL1Itv,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ridge" => Ok(Family::Ridge),
            "basis_pursuit" => Ok(Family::BasisPursuit),
            "deblur_l22itv" => Ok(Family::DeblurL22Itv),
            "deblur_l1itv" => Ok(Family::DeblurL1Itv),
            _ => Err(Error::Config(format!("unknown family '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Ridge => "ridge",
            Family::BasisPursuit => "basis_pursuit",
            Family::DeblurL22Itv => "deblur_l22itv",
            Family::DeblurL1Itv => "deblur_l1itv",
        }
    }

    pub fn is_deblur(&self) -> bool {
        matches!(self, Family::DeblurL22Itv | Family::DeblurL1Itv)
    }
}

/// Feasible set for the deblurring families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageDomain {
    NonNeg,
    /// Pixel values in `[0, 1]`.
    UnitBox,
}

/// Everything needed to regenerate a problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub seed: u64,
    /// Ridge dimension.
    pub n: usize,
    pub cond: f64,
    /// Ridge noise amplitude.
    pub noise: f64,
    pub xi: f64,
    pub lambda: f64,
    pub rows: usize,
    pub cols: usize,
    pub blur: Blur,
    pub image_noise: Noise,
    pub regularizer: Regularizer,
    pub domain: ImageDomain,
    /// Basis pursuit measurements.
    pub m: usize,
    /// Basis pursuit sparsity.
    pub k: usize,
}

impl InstanceSpec {
    /// Defaults for each family, matching the standard experiment setups.
    pub fn new(family: Family) -> Self {
        let (blur, image_noise, lambda) = match family {
            Family::DeblurL1Itv => (Blur::Gaussian { size: 7, sigma: 5.0 }, Noise::SaltPepper(0.5), 1e-1),
            _ => (Blur::Uniform(9), Noise::Gaussian(1e-3), 1e-4),
        };
        InstanceSpec {
            family,
            seed: 0,
            n: 200,
            cond: 1e6,
            noise: 0.1,
            xi: 10.0,
            lambda,
            rows: 64,
            cols: 64,
            blur,
            image_noise,
            regularizer: Regularizer::Itv,
            domain: ImageDomain::NonNeg,
            m: 40,
            k: 8,
        }
    }
}

/// A ready-to-solve problem.
#[derive(Debug)]
pub struct Instance {
    pub objective: CompositeObjective,
    pub domain: Domain,
    pub x0: Point,
    /// Ground truth signal or image.
    pub x_true: Option<Point>,
    /// Observed image for deblurring.
    pub observation: Option<Point>,
    /// Optimal value when known analytically.
    pub f_hat: Option<f64>,
}

pub fn build_instance(spec: &InstanceSpec) -> Result<Instance> {
    match spec.family {
        Family::Ridge => {
            let r = gen_ridge(spec.n, spec.cond, spec.noise, spec.xi, spec.seed)?;
            let objective = CompositeObjective::new(DataTerm::L22, Box::new(DenseMatrix(r.a)), r.y)?
                .with_known_minimum(r.f_hat);
            Ok(Instance {
                objective,
                domain: Domain::l2_ball(spec.xi)?,
                x0: Point::zeros(spec.n),
                x_true: Some(Point::new(r.x_true)),
                observation: None,
                f_hat: Some(r.f_hat),
            })
        }
        Family::BasisPursuit => {
            let bp = gen_basis_pursuit(spec.m, n_for_bp(spec), spec.k, spec.seed)?;
            let n = bp.x_true.len();
            let domain = Domain::affine(bp.a, bp.y)?;
            // start from the minimum-norm feasible point
            let x0 = domain.project(&Point::zeros(n))?;
            let objective = CompositeObjective::new(DataTerm::L1, Box::new(Identity(n)), vec![0.0; n])?;
            Ok(Instance {
                objective,
                domain,
                x0,
                x_true: Some(Point::new(bp.x_true)),
                observation: None,
                f_hat: None,
            })
        }
        Family::DeblurL22Itv | Family::DeblurL1Itv => {
            let image = phantom(spec.rows, spec.cols);
            let inst = gen_deblur(&image, spec.blur, spec.image_noise, spec.seed)?;
            if !matches!(spec.regularizer, Regularizer::Itv | Regularizer::Atv) {
                return Err(Error::Config("deblurring needs an itv or atv regularizer".into()));
            }
            let data = if spec.family == Family::DeblurL22Itv {
                DataTerm::L22
            } else {
                DataTerm::L1
            };
            let objective = CompositeObjective::new(data, Box::new(inst.op), inst.y.to_vec())?
                .with_image_shape(spec.rows, spec.cols)?
                .with_regularizer(spec.regularizer, spec.lambda)?;
            let npix = spec.rows * spec.cols;
            let domain = match spec.domain {
                ImageDomain::NonNeg => Domain::nonneg(),
                ImageDomain::UnitBox => Domain::boxed(vec![0.0; npix], vec![1.0; npix])?,
            };
            let x0 = domain.project(&inst.y)?;
            Ok(Instance {
                objective,
                domain,
                x0,
                x_true: Some(inst.x_true),
                observation: Some(inst.y),
                f_hat: None,
            })
        }
    }
}

/// Basis pursuit uses `n` as the signal length when it exceeds `m`,
/// otherwise `2.5·m`.
fn n_for_bp(spec: &InstanceSpec) -> usize {
    if spec.n > spec.m {
        spec.n
    } else {
        spec.m * 5 / 2
    }
}
