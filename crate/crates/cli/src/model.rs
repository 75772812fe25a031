use locstat::chain_models::{CountableKernelFamily, FiniteKernelFamily};
use locstat::coef::{CoefFn, UFn};
use locstat::simulate::{AffineModel, InarModel, WalkModel};
use locstat::{Result, StochasticMatrix};

use crate::config::ModelConfig;

pub struct WalkParts {
    pub p: UFn,
    pub q: UFn,
    pub r: UFn,
    pub family: CountableKernelFamily,
    pub model: WalkModel,
    pub z: f64,
    pub epsilon: f64,
}

pub struct InarParts {
    pub model: InarModel,
    pub alpha: Vec<CoefFn>,
    /// Truncated kernel family, for order-1 models.
    pub family: Option<CountableKernelFamily>,
}

pub enum Model {
    Finite(FiniteKernelFamily),
    Walk(WalkParts),
    Inar(InarParts),
    Affine(AffineModel),
}

impl Model {
    pub fn build(config: &ModelConfig) -> Result<Self> {
        Ok(match config {
            ModelConfig::FiniteAffine { a, b, .. } => {
                let a = StochasticMatrix::from_rows(a)?;
                let b = StochasticMatrix::from_rows(b)?;
                Model::Finite(FiniteKernelFamily::affine(&a, &b, "finite-affine")?)
            }
            ModelConfig::RandomWalk {
                p,
                q,
                r,
                truncation,
                z,
                epsilon,
                ..
            } => {
                let (p, q, r) = (p.to_ufn(), q.to_ufn(), r.to_ufn());
                Model::Walk(WalkParts {
                    family: CountableKernelFamily::random_walk(
                        p.clone(),
                        q.clone(),
                        r.clone(),
                        *truncation,
                    ),
                    model: WalkModel::new(p.clone(), q.clone(), r.clone())?,
                    p,
                    q,
                    r,
                    z: *z,
                    epsilon: *epsilon,
                })
            }
            ModelConfig::Inar1 {
                alpha,
                lambda,
                truncation,
                ..
            } => {
                let fns: Vec<UFn> = alpha.iter().map(CoefFn::to_ufn).collect();
                let family = (alpha.len() == 1).then(|| {
                    CountableKernelFamily::inar1(fns[0].clone(), lambda.to_ufn(), *truncation)
                });
                Model::Inar(InarParts {
                    model: InarModel::new(fns, lambda.to_ufn(), "inar")?,
                    alpha: alpha.clone(),
                    family,
                })
            }
            ModelConfig::TvAr1 { a, sigma, .. } => {
                Model::Affine(AffineModel::tv_ar1(a.to_ufn(), sigma.to_ufn()))
            }
            ModelConfig::TvArch1Squared { a0, a1, .. } => {
                Model::Affine(AffineModel::tv_arch1_squared(a0.to_ufn(), a1.to_ufn()))
            }
        })
    }
}
