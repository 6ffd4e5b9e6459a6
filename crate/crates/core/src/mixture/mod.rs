//! Mixture specifications, stratum selection and per-stratum transforms.

mod distribution;
mod selector;

pub use distribution::DistributionSpec;
pub use selector::{build_selector, select_stratum, StratumLayout, StratumSelector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest and largest uniforms fed to a quantile function.
pub const U_MIN: f64 = 1.0 / (1u64 << 53) as f64;
pub const U_MAX: f64 = 1.0 - U_MIN;

/// One mixture component: its probability and its coordinate distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub weight: f64,
    pub coords: Vec<DistributionSpec>,
}

/// A mixture Σ α_ℓ P_ℓ where each P_ℓ is a product of independent marginals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub strata: Vec<Stratum>,
}

impl MixtureSpec {
    pub fn new(strata: Vec<Stratum>) -> Result<Self> {
        let spec = Self { strata };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.strata.first().ok_or_else(|| Error::Validation("mixture has no strata".into()))?;
        let s = first.coords.len();
        if s == 0 {
            return Err(Error::Validation("strata need at least one coordinate".into()));
        }
        for (l, st) in self.strata.iter().enumerate() {
            if !(st.weight > 0.0) || !st.weight.is_finite() {
                return Err(Error::Validation(format!("stratum {} has weight {}", l + 1, st.weight)));
            }
            if st.coords.len() != s {
                return Err(Error::Validation(format!(
                    "stratum {} has {} coordinates, expected {s}",
                    l + 1,
                    st.coords.len()
                )));
            }
            for c in &st.coords {
                c.validate()?;
            }
        }
        let total: f64 = self.alpha().iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn num_strata(&self) -> usize {
        self.strata.len()
    }

    /// Number of uniforms consumed per sample (s).
    pub fn input_dim(&self) -> usize {
        self.strata[0].coords.len()
    }

    /// Length of each sample point (D); the transform is coordinate-wise.
    pub fn output_dim(&self) -> usize {
        self.input_dim()
    }

    pub fn alpha(&self) -> Vec<f64> {
        self.strata.iter().map(|s| s.weight).collect()
    }

    /// x = φ_ℓ(u), written into `out`. Uniforms are clamped to [U_MIN, U_MAX].
    pub fn transform_into(&self, stratum: usize, u: &[f64], out: &mut [f64]) -> Result<()> {
        let st = self
            .strata
            .get(stratum)
            .ok_or_else(|| Error::Domain(format!("stratum index {stratum} out of range")))?;
        if u.len() != st.coords.len() || out.len() != st.coords.len() {
            return Err(Error::Domain("point length does not match the mixture".into()));
        }
        for ((o, &ui), dist) in out.iter_mut().zip(u).zip(&st.coords) {
            if !(0.0..=1.0).contains(&ui) {
                return Err(Error::Domain(format!("uniform {ui} outside [0, 1]")));
            }
            *o = dist.quantile(ui.clamp(U_MIN, U_MAX))?;
        }
        Ok(())
    }

    /// Σ α_ℓ Π_j p_ℓj(x_j).
    pub fn density(&self, x: &[f64]) -> f64 {
        self.strata
            .iter()
            .map(|st| st.weight * st.coords.iter().zip(x).map(|(c, &xi)| c.pdf(xi)).product::<f64>())
            .sum()
    }

    pub fn transform(&self, stratum: usize, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; u.len()];
        self.transform_into(stratum, u, &mut out)?;
        Ok(out)
    }
}

/// ω_ℓ = α_ℓ / β_ℓ.
pub fn weight(alpha: &[f64], beta: &[f64], stratum: usize) -> f64 {
    alpha[stratum] / beta[stratum]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        let alpha = [0.5, 0.25, 0.25];
        for l in 0..3 {
            assert_eq!(weight(&alpha, &alpha, l), 1.0);
        }
        assert!((weight(&[0.99, 0.01], &[0.875, 0.125], 1) - 0.08).abs() < 1e-15);
        let beta = [0.6, 0.3, 0.1];
        let total: f64 = (0..3).map(|l| weight(&alpha, &beta, l) * beta[l]).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let n = |mean| DistributionSpec::Normal { mean, sd: 1.0 };
        assert!(MixtureSpec::new(vec![Stratum { weight: 1.0, coords: vec![n(0.0)] }]).is_ok());
        let bad_sum = vec![
            Stratum { weight: 0.5, coords: vec![n(0.0)] },
            Stratum { weight: 0.4, coords: vec![n(1.0)] },
        ];
        assert!(MixtureSpec::new(bad_sum).is_err());
        let ragged = vec![
            Stratum { weight: 0.5, coords: vec![n(0.0)] },
            Stratum { weight: 0.5, coords: vec![n(1.0), n(2.0)] },
        ];
        assert!(MixtureSpec::new(ragged).is_err());
    }

    #[test]
    fn transform_at_medians() {
        let spec = MixtureSpec::new(vec![Stratum {
            weight: 1.0,
            coords: vec![
                DistributionSpec::ShiftedNormal { theta: 1.7 },
                DistributionSpec::Uniform { lo: 49.0, hi: 51.0 },
            ],
        }])
        .unwrap();
        let x = spec.transform(0, &[0.5, 0.25]).unwrap();
        assert_eq!(x, vec![1.7, 49.5]);
        assert!(spec.transform(1, &[0.5, 0.5]).is_err());
        assert!(spec.transform(0, &[1.5, 0.5]).is_err());
        // endpoints are nudged inward rather than rejected
        assert!(spec.transform(0, &[0.0, 1.0]).unwrap()[0].is_finite());
    }
}
