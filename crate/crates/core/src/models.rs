//! The two example mixtures (toy normal shifts and the Saint-Venant flood
//! depth), named integrands, and reference means by quadrature.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::allocation::Rate;
use crate::error::{Error, Result};
use crate::mixture::{DistributionSpec, MixtureSpec, Stratum};
use crate::quadrature::{integrate, integrate_real_line, integrate_to_infinity};

const REL_TOL: f64 = 1e-10;

/// River length and width held fixed in the flood model (meters).
pub const FLOOD_LENGTH: f64 = 5000.0;
pub const FLOOD_WIDTH: f64 = 300.0;

pub type IntegrandFn = dyn Fn(usize, &[f64]) -> f64 + Send + Sync;

/// g(ℓ, x): the function averaged over the mixture. Receives the stratum
/// index so per-stratum integrands are possible.
#[derive(Clone)]
pub struct Integrand {
    pub name: String,
    f: Arc<IntegrandFn>,
}

impl Integrand {
    pub fn new(name: impl Into<String>, f: impl Fn(usize, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    #[inline]
    pub fn eval(&self, stratum: usize, x: &[f64]) -> f64 {
        (self.f)(stratum, x)
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand").field("name", &self.name).finish()
    }
}

/// Integrands selectable by name from a model file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedIntegrand {
    /// exp(−x₁²) cos(x₁).
    Toy,
    /// H = (Q / (K_s B √((Z_m − Z_v)/L)))^{3/5} on x = (Q, K_s, Z_v, Z_m).
    FloodDepth,
    /// x₁.
    FirstCoordinate,
}

impl NamedIntegrand {
    fn arity(self) -> usize {
        match self {
            Self::Toy | Self::FirstCoordinate => 1,
            Self::FloodDepth => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Toy => "toy",
            Self::FloodDepth => "flood-depth",
            Self::FirstCoordinate => "first-coordinate",
        }
    }

    pub fn integrand(self) -> Integrand {
        match self {
            Self::Toy => Integrand::new(self.name(), |_, x| toy_g(x[0])),
            Self::FloodDepth => Integrand::new(self.name(), |_, x| flood_depth(x[0], x[1], x[2], x[3])),
            Self::FirstCoordinate => Integrand::new(self.name(), |_, x| x[0]),
        }
    }
}

#[inline]
pub fn toy_g(x: f64) -> f64 {
    (-x * x).exp() * x.cos()
}

#[inline]
pub fn flood_depth(q: f64, ks: f64, zv: f64, zm: f64) -> f64 {
    let slope = (zm - zv) / FLOOD_LENGTH;
    (q / (ks * FLOOD_WIDTH * slope.sqrt())).powf(0.6)
}

/// A mixture, an integrand and the experiment defaults that go with them.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub spec: MixtureSpec,
    pub integrand: Integrand,
    kind: NamedIntegrand,
    /// Rate used for general-integer allocations.
    pub adjusted_rate: Rate,
    /// Rate used for power-of-two allocations.
    pub pow2_rate: Rate,
}

impl Model {
    fn build(name: &str, spec: MixtureSpec, kind: NamedIntegrand, adjusted: f64, pow2: f64) -> Result<Self> {
        spec.validate()?;
        if spec.input_dim() < kind.arity() {
            return Err(Error::Validation(format!(
                "integrand {} needs {} coordinates, the mixture has {}",
                kind.name(),
                kind.arity(),
                spec.input_dim()
            )));
        }
        Ok(Self {
            name: name.to_string(),
            spec,
            integrand: kind.integrand(),
            kind,
            adjusted_rate: Rate::Finite(adjusted),
            pow2_rate: Rate::Finite(pow2),
        })
    }

    /// Eight unit-variance normals N(θ_ℓ, 1) with g(x) = exp(−x²) cos x.
    pub fn toy() -> Self {
        let alpha = [0.50, 0.44, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01];
        let theta = [0.7, 1.0, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0];
        let strata = alpha
            .iter()
            .zip(theta)
            .map(|(&weight, theta)| Stratum { weight, coords: vec![DistributionSpec::ShiftedNormal { theta }] })
            .collect();
        Self::build("toy", MixtureSpec { strata }, NamedIntegrand::Toy, 2.0, 3.0).expect("toy model is valid")
    }

    /// Flood depth with nominal/adverse discharge and roughness.
    /// Coordinates are (Q, K_s, Z_v, Z_m).
    pub fn flood() -> Self {
        let q = |adverse: bool| DistributionSpec::Frechet { shape: 6.0, scale: if adverse { 3900.0 } else { 1300.0 } };
        let ks = |adverse: bool| {
            if adverse {
                DistributionSpec::Gamma { shape: 15.0, scale: 1.0 }
            } else {
                DistributionSpec::Gamma { shape: 90.0, scale: 1.0 / 3.0 }
            }
        };
        let stratum = |weight: f64, q_adv: bool, ks_adv: bool| Stratum {
            weight,
            coords: vec![
                q(q_adv),
                ks(ks_adv),
                DistributionSpec::Uniform { lo: 49.0, hi: 51.0 },
                DistributionSpec::Uniform { lo: 54.0, hi: 56.0 },
            ],
        };
        let strata = vec![
            stratum(0.95, false, false),
            stratum(0.02, true, false),
            stratum(0.02, false, true),
            stratum(0.01, true, true),
        ];
        Self::build("flood", MixtureSpec { strata }, NamedIntegrand::FloodDepth, 2.0, 2.0)
            .expect("flood model is valid")
    }

    /// Loads `{"integrand": "<name>", "strata": [{"weight": .., "coords": [..]}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ModelFile {
            integrand: NamedIntegrand,
            strata: Vec<Stratum>,
        }
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        Self::build("file", MixtureSpec { strata: file.strata }, file.integrand, 2.0, 2.0)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `toy`, `flood` or `file:<path>`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "toy" => Ok(Self::toy()),
            "flood" => Ok(Self::flood()),
            other => match other.strip_prefix("file:") {
                Some(path) => Self::from_file(Path::new(path)),
                None => Err(Error::Validation(format!("unknown model {other:?}"))),
            },
        }
    }

    /// Points consumed per sample by the stratum-selecting estimators (s + 1).
    pub fn rqmc_dim(&self) -> usize {
        self.spec.input_dim() + 1
    }

    /// Per-stratum means μ_ℓ = E_ℓ[g(x)] by adaptive quadrature.
    pub fn stratum_means(&self) -> Result<Vec<f64>> {
        self.spec.strata.iter().map(|st| stratum_mean(self.kind, &st.coords)).collect()
    }

    /// μ = Σ α_ℓ μ_ℓ.
    pub fn reference_mean(&self) -> Result<f64> {
        let means = self.stratum_means()?;
        Ok(self.spec.alpha().iter().zip(means).map(|(a, m)| a * m).sum())
    }

    /// Per-stratum second moments E_ℓ[g²], for variance oracles.
    pub fn stratum_second_moments(&self) -> Result<Vec<f64>> {
        self.spec
            .strata
            .iter()
            .map(|st| match self.kind {
                NamedIntegrand::Toy => expect(&st.coords[0], |x| toy_g(x).powi(2)),
                NamedIntegrand::FirstCoordinate => expect(&st.coords[0], |x| x * x),
                NamedIntegrand::FloodDepth => flood_moment(&st.coords, 2.0),
            })
            .collect()
    }

    /// Variance of g(x) under the full mixture: Σα_ℓ E_ℓ[g²] − μ².
    pub fn mixture_variance(&self) -> Result<f64> {
        let alpha = self.spec.alpha();
        let second: f64 = alpha.iter().zip(self.stratum_second_moments()?).map(|(a, m)| a * m).sum();
        let mu = self.reference_mean()?;
        Ok(second - mu * mu)
    }
}

fn stratum_mean(kind: NamedIntegrand, coords: &[DistributionSpec]) -> Result<f64> {
    match kind {
        NamedIntegrand::Toy => expect(&coords[0], toy_g),
        NamedIntegrand::FirstCoordinate => expect(&coords[0], |x| x),
        NamedIntegrand::FloodDepth => flood_moment(coords, 1.0),
    }
}

/// E[H^k] for independent (Q, K_s, Z_v, Z_m): H^k factorizes into
/// Q^{0.6k} · K_s^{−0.6k} · (B √(1/L))^{−0.6k} · (Z_m − Z_v)^{−0.3k}.
fn flood_moment(coords: &[DistributionSpec], k: f64) -> Result<f64> {
    let p = 0.6 * k;
    let eq = expect(&coords[0], |q| q.powf(p))?;
    let eks = expect(&coords[1], |ks| ks.powf(-p))?;
    let zm = coords[3].clone();
    let ediff = expect(&coords[2], |zv| {
        expect(&zm, |zm| {
            let d = zm - zv;
            if d > 0.0 {
                d.powf(-p / 2.0)
            } else {
                f64::NAN
            }
        })
        .unwrap_or(f64::NAN)
    })?;
    let constant = (FLOOD_WIDTH / FLOOD_LENGTH.sqrt()).powf(-p);
    Ok(eq * eks * ediff * constant)
}

/// E[h(X)] for one marginal, by quadrature against its density.
pub fn expect<H: Fn(f64) -> f64>(dist: &DistributionSpec, h: H) -> Result<f64> {
    let guarded = |x: f64| {
        let d = dist.pdf(x);
        if d == 0.0 {
            0.0
        } else {
            h(x) * d
        }
    };
    match *dist {
        DistributionSpec::Normal { mean, .. } => integrate_real_line(guarded, mean, REL_TOL),
        DistributionSpec::ShiftedNormal { theta } => integrate_real_line(guarded, theta, REL_TOL),
        DistributionSpec::Uniform { lo, hi } => integrate(guarded, lo, hi, REL_TOL),
        DistributionSpec::Frechet { .. } | DistributionSpec::Gamma { .. } => {
            // split at the median so both pieces carry mass
            let med = dist.quantile(0.5)?;
            Ok(integrate(&guarded, 0.0, med, REL_TOL)? + integrate_to_infinity(&guarded, med, REL_TOL)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    #[test]
    fn toy_stratum_means_match_gaussian_integral() {
        // E exp(−X² + iX) for X ~ N(θ,1) has a closed form.
        let model = Model::toy();
        let means = model.stratum_means().unwrap();
        for (st, m) in model.spec.strata.iter().zip(means) {
            let theta = match st.coords[0] {
                DistributionSpec::ShiftedNormal { theta } => theta,
                _ => unreachable!(),
            };
            let exact = ((-theta * theta - 0.5) / 3.0).exp() * (theta / 3.0).cos() / 3f64.sqrt();
            assert!((m - exact).abs() < 1e-11, "θ={theta}: {m} vs {exact}");
        }
    }

    #[test]
    fn flood_factors_match_closed_forms() {
        let model = Model::flood();
        let means = model.stratum_means().unwrap();
        // E[Z_m − Z_v]^{-0.3}: triangular density on [3, 7] peaked at 5.
        let tri = integrate(|d| d.powf(-0.3) * (1.0 - (d - 5.0).abs() / 2.0) / 2.0, 3.0, 5.0, 1e-13).unwrap()
            + integrate(|d| d.powf(-0.3) * (1.0 - (d - 5.0).abs() / 2.0) / 2.0, 5.0, 7.0, 1e-13).unwrap();
        let const_part = (FLOOD_WIDTH / FLOOD_LENGTH.sqrt()).powf(-0.6) * tri;
        let eq = |s: f64| s.powf(0.6) * ln_gamma(0.9).exp();
        let eks = |a: f64, theta: f64| theta.powf(-0.6) * (ln_gamma(a - 0.6) - ln_gamma(a)).exp();
        let want = [
            eq(1300.0) * eks(90.0, 1.0 / 3.0),
            eq(3900.0) * eks(90.0, 1.0 / 3.0),
            eq(1300.0) * eks(15.0, 1.0),
            eq(3900.0) * eks(15.0, 1.0),
        ];
        for (m, w) in means.iter().zip(want) {
            assert!(((m - w * const_part) / m).abs() < 1e-9, "{m} vs {}", w * const_part);
        }
    }

    #[test]
    fn file_model_round_trip() {
        let text = r#"{"integrand": "first-coordinate", "strata": [
            {"weight": 0.25, "coords": [{"kind": "normal", "params": {"mean": 1.0, "sd": 2.0}}]},
            {"weight": 0.75, "coords": [{"kind": "uniform", "params": {"lo": 0.0, "hi": 2.0}}]}
        ]}"#;
        let model = Model::from_json(text).unwrap();
        assert!((model.reference_mean().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(model.rqmc_dim(), 2);
    }

    #[test]
    fn file_model_errors() {
        assert!(matches!(Model::from_json("{\n\"integrand\": 3}"), Err(Error::Parse { line: 2, .. })));
        let bad_weights = r#"{"integrand": "toy", "strata": [
            {"weight": 0.5, "coords": [{"kind": "shifted-normal", "params": {"theta": 0.0}}]}]}"#;
        assert!(matches!(Model::from_json(bad_weights), Err(Error::Validation(_))));
        let short = r#"{"integrand": "flood-depth", "strata": [
            {"weight": 1.0, "coords": [{"kind": "shifted-normal", "params": {"theta": 0.0}}]}]}"#;
        assert!(matches!(Model::from_json(short), Err(Error::Validation(_))));
        assert!(Model::by_name("nope").is_err());
    }

    #[test]
    fn flood_median_point() {
        let model = Model::flood();
        let x = model.spec.transform(0, &[0.5; 4]).unwrap();
        assert!((x[0] - 1300.0 * std::f64::consts::LN_2.powf(-1.0 / 6.0)).abs() < 1e-9);
        assert!((x[2] - 50.0).abs() < 1e-12 && (x[3] - 55.0).abs() < 1e-12);
        let h = model.integrand.eval(0, &x);
        assert!(h > 0.0 && h.is_finite());
    }
}
