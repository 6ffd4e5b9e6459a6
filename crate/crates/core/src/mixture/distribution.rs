use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma_cdf, gamma_quantile, normal_cdf, normal_pdf, normal_quantile, ln_gamma};

/// A univariate marginal with a closed-form or numerically inverted quantile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    Frechet { shape: f64, scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Uniform { lo: f64, hi: f64 },
    /// N(θ, 1).
    ShiftedNormal { theta: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Self::Frechet { shape, scale } | Self::Gamma { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
            Self::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Self::ShiftedNormal { theta } => theta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("invalid distribution parameters: {self:?}")))
        }
    }

    /// Inverse CDF at `u` in [0, 1]. Unbounded endpoints map to ±∞.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("probability {u} outside [0, 1]")));
        }
        Ok(match *self {
            Self::Normal { mean, sd } => mean + sd * normal_quantile(u),
            Self::ShiftedNormal { theta } => theta + normal_quantile(u),
            Self::Frechet { shape, scale } => scale * (-u.ln()).powf(-1.0 / shape),
            Self::Gamma { shape, scale } => gamma_quantile(shape, scale, u)?,
            Self::Uniform { lo, hi } => lo + (hi - lo) * u,
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Self::ShiftedNormal { theta } => normal_cdf(x - theta),
            Self::Frechet { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-(x / scale).powf(-shape)).exp()
                }
            }
            Self::Gamma { shape, scale } => gamma_cdf(shape, scale, x),
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => normal_pdf((x - mean) / sd) / sd,
            Self::ShiftedNormal { theta } => normal_pdf(x - theta),
            Self::Frechet { shape, scale } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = x / scale;
                ((shape / scale).ln() - (1.0 + shape) * z.ln() - z.powf(-shape)).exp()
            }
            Self::Gamma { shape, scale } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = x / scale;
                ((shape - 1.0) * z.ln() - z - ln_gamma(shape)).exp() / scale
            }
            Self::Uniform { lo, hi } => {
                if (lo..hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }
}
