//! Estimators of μ = Σ α_ℓ E_ℓ[g]: plain MC, plain RQMC, reweighted RQMC
//! with integer or power-of-two sampling fractions, independent per-stratum
//! RQMC, and mixture importance sampling.
//!
//! The conjoined estimators use one (s+1)-dimensional point set. The first
//! coordinate picks the stratum, the rest feed the stratum's quantile
//! transform, and μ̂ = (1/n) Σ ω_{ℓ(i)} g(x_i) is summed point by point so
//! empty strata simply contribute nothing.

mod replicate;
mod slope;

pub use replicate::{correlation, replicate_variance, EstimatorReport};
pub use slope::fit_log2_slope;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::allocation::{
    forward_power_of_two, integer_allocation, AllocationPlan, AllocationRule, Ansatz, Rate,
};
use crate::error::{Error, Result};
use crate::mixture::{MixtureSpec, StratumLayout};
use crate::models::{Integrand, Model};
use crate::qmc::{scramble, sobol_points, word_to_unit, DigitalPointSet, DirectionNumbers, ScrambleKind};
use crate::seed::{split, CounterRng};

/// Point-set randomization shared by every RQMC estimator.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub dirs: Arc<DirectionNumbers>,
    pub scramble: ScrambleKind,
    pub ansatz: Ansatz,
}

impl SamplerConfig {
    pub fn new(dirs: DirectionNumbers) -> Self {
        Self { dirs: Arc::new(dirs), scramble: ScrambleKind::NestedUniform, ansatz: Ansatz::Zero }
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self::new(DirectionNumbers::embedded(crate::qmc::EMBEDDED_DIMS).expect("embedded table parses"))
    }
}

/// One replicate: the estimate and how many points landed in each stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub estimate: f64,
    pub counts: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimatorKind {
    Mc,
    Rqmc,
    /// Integer allocation from the ideal fractions.
    RqmcAdjusted(Rate),
    /// Power-of-two allocation by forward doubling.
    RqmcPow2(Rate),
    /// Independent nets per stratum with the power-of-two sizes.
    RqmcPerStratum(Rate),
}

impl EstimatorKind {
    /// The five standard estimators with a model's default rates.
    pub fn standard(model: &Model) -> Vec<Self> {
        vec![
            Self::Mc,
            Self::Rqmc,
            Self::RqmcAdjusted(model.adjusted_rate),
            Self::RqmcPow2(model.pow2_rate),
            Self::RqmcPerStratum(model.pow2_rate),
        ]
    }

    pub fn base_name(&self) -> &'static str {
        match self {
            Self::Mc => "mc",
            Self::Rqmc => "rqmc",
            Self::RqmcAdjusted(_) => "rqmc-adj",
            Self::RqmcPow2(_) => "rqmc-2",
            Self::RqmcPerStratum(_) => "rqmc-l",
        }
    }

    pub fn rate(&self) -> Option<Rate> {
        match *self {
            Self::Mc | Self::Rqmc => None,
            Self::RqmcAdjusted(r) | Self::RqmcPow2(r) | Self::RqmcPerStratum(r) => Some(r),
        }
    }

    /// Position in the canonical reporting order.
    pub fn rank(&self) -> usize {
        match self {
            Self::Mc => 0,
            Self::Rqmc => 1,
            Self::RqmcAdjusted(_) => 2,
            Self::RqmcPow2(_) => 3,
            Self::RqmcPerStratum(_) => 4,
        }
    }

    /// The same estimator with its rate replaced (no-op for mc and rqmc).
    pub fn with_rate(self, rate: Rate) -> Self {
        match self {
            Self::Mc | Self::Rqmc => self,
            Self::RqmcAdjusted(_) => Self::RqmcAdjusted(rate),
            Self::RqmcPow2(_) => Self::RqmcPow2(rate),
            Self::RqmcPerStratum(_) => Self::RqmcPerStratum(rate),
        }
    }

    /// Parses a bare name; allocation estimators take the model's default rate.
    pub fn parse_for(name: &str, model: &Model) -> Result<Self> {
        let (base, rate) = match name.split_once(":rho=") {
            Some((b, r)) => (b, Some(r.parse::<Rate>()?)),
            None => (name, None),
        };
        let kind = match base {
            "mc" => Self::Mc,
            "rqmc" => Self::Rqmc,
            "rqmc-adj" => Self::RqmcAdjusted(rate.unwrap_or(model.adjusted_rate)),
            "rqmc-2" => Self::RqmcPow2(rate.unwrap_or(model.pow2_rate)),
            "rqmc-l" => Self::RqmcPerStratum(rate.unwrap_or(model.pow2_rate)),
            other => return Err(Error::Validation(format!("unknown estimator {other:?}"))),
        };
        Ok(kind)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rate() {
            Some(r) => write!(f, "{}:rho={r}", self.base_name()),
            None => f.write_str(self.base_name()),
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    /// Allocation estimators need an explicit `:rho=` suffix here.
    fn from_str(s: &str) -> Result<Self> {
        let (base, rate) = match s.split_once(":rho=") {
            Some((b, r)) => (b, Some(r.parse::<Rate>()?)),
            None => (s, None),
        };
        let need = || rate.ok_or_else(|| Error::Validation(format!("estimator {s:?} needs a :rho= suffix")));
        Ok(match base {
            "mc" => Self::Mc,
            "rqmc" => Self::Rqmc,
            "rqmc-adj" => Self::RqmcAdjusted(need()?),
            "rqmc-2" => Self::RqmcPow2(need()?),
            "rqmc-l" => Self::RqmcPerStratum(need()?),
            other => return Err(Error::Validation(format!("unknown estimator {other:?}"))),
        })
    }
}

enum Plan {
    Mc { layout: StratumLayout },
    Conjoined { layout: StratumLayout, base: DigitalPointSet },
    PerStratum { sizes: Vec<u64>, bases: Vec<DigitalPointSet> },
}

/// An estimator bound to a mixture, an integrand and a sample size, with the
/// allocation and unscrambled point sets computed once for all replicates.
pub struct Prepared<'a> {
    spec: &'a MixtureSpec,
    g: &'a Integrand,
    n: u64,
    scramble: ScrambleKind,
    allocation: Option<AllocationPlan>,
    plan: Plan,
}

impl<'a> Prepared<'a> {
    pub fn new(
        spec: &'a MixtureSpec,
        g: &'a Integrand,
        kind: EstimatorKind,
        m: u32,
        cfg: &SamplerConfig,
    ) -> Result<Self> {
        let n = 1u64 << m;
        let alpha = spec.alpha();
        let d = spec.input_dim() + 1;
        let conjoined = |plan: &AllocationPlan| -> Result<Plan> {
            Ok(Plan::Conjoined {
                layout: StratumLayout::from_sizes(&alpha, &plan.sizes)?,
                base: sobol_points(&cfg.dirs, d, m)?,
            })
        };
        let (allocation, plan) = match kind {
            EstimatorKind::Mc => (None, Plan::Mc { layout: StratumLayout::from_fractions(&alpha, &alpha)? }),
            EstimatorKind::Rqmc => (
                None,
                Plan::Conjoined {
                    layout: StratumLayout::from_fractions(&alpha, &alpha)?,
                    base: sobol_points(&cfg.dirs, d, m)?,
                },
            ),
            EstimatorKind::RqmcAdjusted(rate) => {
                let a = integer_allocation(&alpha, &AllocationRule::new(cfg.ansatz, rate), n)?;
                let p = conjoined(&a)?;
                (Some(a), p)
            }
            EstimatorKind::RqmcPow2(rate) => {
                let a = forward_power_of_two(&alpha, &AllocationRule::new(cfg.ansatz, rate), n)?;
                let p = conjoined(&a)?;
                (Some(a), p)
            }
            EstimatorKind::RqmcPerStratum(rate) => {
                let a = forward_power_of_two(&alpha, &AllocationRule::new(cfg.ansatz, rate), n)?;
                let p = per_stratum_plan(spec, &a.sizes, cfg)?;
                (Some(a), p)
            }
        };
        Ok(Self { spec, g, n, scramble: cfg.scramble, allocation, plan })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn allocation(&self) -> Option<&AllocationPlan> {
        self.allocation.as_ref()
    }

    /// One independent replicate.
    pub fn sample(&self, seed: u64) -> Result<Sample> {
        match &self.plan {
            Plan::Mc { layout } => mc_sum(self.spec, self.g, layout, self.n, seed),
            Plan::Conjoined { layout, base } => {
                conjoined_sum(self.spec, self.g, layout, &scramble(base, self.scramble, seed)?)
            }
            Plan::PerStratum { sizes, bases } => {
                per_stratum_sum(self.spec, self.g, sizes, bases, self.scramble, seed)
            }
        }
    }
}

fn per_stratum_plan(spec: &MixtureSpec, sizes: &[u64], cfg: &SamplerConfig) -> Result<Plan> {
    let s = spec.input_dim();
    let bases = sizes
        .iter()
        .map(|&n| {
            if !n.is_power_of_two() {
                return Err(Error::Infeasible(format!("per-stratum size {n} is not a power of two")));
            }
            sobol_points(&cfg.dirs, s, n.trailing_zeros())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Plan::PerStratum { sizes: sizes.to_vec(), bases })
}

#[inline]
fn checked(v: f64, stratum: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("integrand returned {v} in stratum {}", stratum + 1)))
    }
}

fn conjoined_sum(spec: &MixtureSpec, g: &Integrand, layout: &StratumLayout, pts: &DigitalPointSet) -> Result<Sample> {
    let s = spec.input_dim();
    let mut u = vec![0.0; s];
    let mut x = vec![0.0; s];
    let mut counts = vec![0u64; spec.num_strata()];
    let mut total = 0.0;
    for i in 0..pts.len() {
        let p = pts.point(i);
        let l = layout.stratum(word_to_unit(p[0]));
        for (uj, &w) in u.iter_mut().zip(&p[1..]) {
            *uj = word_to_unit(w);
        }
        spec.transform_into(l, &u, &mut x)?;
        total += layout.weights[l] * checked(g.eval(l, &x), l)?;
        counts[l] += 1;
    }
    Ok(Sample { estimate: total / pts.len() as f64, counts })
}

fn mc_sum(spec: &MixtureSpec, g: &Integrand, layout: &StratumLayout, n: u64, seed: u64) -> Result<Sample> {
    let s = spec.input_dim();
    let d = (s + 1) as u64;
    let rng = CounterRng::new(seed);
    let mut u = vec![0.0; s];
    let mut x = vec![0.0; s];
    let mut counts = vec![0u64; spec.num_strata()];
    let mut total = 0.0;
    for i in 0..n {
        let l = layout.stratum(rng.uniform(i * d));
        for (j, uj) in u.iter_mut().enumerate() {
            *uj = rng.uniform(i * d + 1 + j as u64);
        }
        spec.transform_into(l, &u, &mut x)?;
        total += layout.weights[l] * checked(g.eval(l, &x), l)?;
        counts[l] += 1;
    }
    Ok(Sample { estimate: total / n as f64, counts })
}

fn per_stratum_sum(
    spec: &MixtureSpec,
    g: &Integrand,
    sizes: &[u64],
    bases: &[DigitalPointSet],
    kind: ScrambleKind,
    seed: u64,
) -> Result<Sample> {
    let s = spec.input_dim();
    let mut u = vec![0.0; s];
    let mut x = vec![0.0; s];
    let mut estimate = 0.0;
    for (l, (st, base)) in spec.strata.iter().zip(bases).enumerate() {
        let pts = scramble(base, kind, split(seed, l as u64))?;
        let mut sum = 0.0;
        for i in 0..pts.len() {
            pts.write_unit(i, &mut u);
            spec.transform_into(l, &u, &mut x)?;
            sum += checked(g.eval(l, &x), l)?;
        }
        estimate += st.weight * sum / pts.len() as f64;
    }
    Ok(Sample { estimate, counts: sizes.to_vec() })
}

/// Plain Monte Carlo with n i.i.d. points; strata drawn with probability α.
pub fn estimate_mc(spec: &MixtureSpec, g: &Integrand, n: u64, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let alpha = spec.alpha();
    mc_sum(spec, g, &StratumLayout::from_fractions(&alpha, &alpha)?, n, seed)
}

/// Scrambled Sobol' in s+1 dimensions with β = α.
pub fn estimate_rqmc_plain(spec: &MixtureSpec, g: &Integrand, m: u32, cfg: &SamplerConfig, seed: u64) -> Result<Sample> {
    Prepared::new(spec, g, EstimatorKind::Rqmc, m, cfg)?.sample(seed)
}

/// Sampling fractions from the integer allocation under `rule`.
pub fn estimate_rqmc_adjusted(
    spec: &MixtureSpec,
    g: &Integrand,
    rule: &AllocationRule,
    m: u32,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<Sample> {
    let alpha = spec.alpha();
    let plan = integer_allocation(&alpha, rule, 1u64 << m)?;
    let layout = StratumLayout::from_sizes(&alpha, &plan.sizes)?;
    let base = sobol_points(&cfg.dirs, spec.input_dim() + 1, m)?;
    conjoined_sum(spec, g, &layout, &scramble(&base, cfg.scramble, seed)?)
}

/// Dyadic sampling fractions from forward doubling under `rule`.
pub fn estimate_rqmc_pow2(
    spec: &MixtureSpec,
    g: &Integrand,
    rule: &AllocationRule,
    m: u32,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<Sample> {
    let alpha = spec.alpha();
    let plan = forward_power_of_two(&alpha, rule, 1u64 << m)?;
    let layout = StratumLayout::from_sizes(&alpha, &plan.sizes)?;
    let base = sobol_points(&cfg.dirs, spec.input_dim() + 1, m)?;
    conjoined_sum(spec, g, &layout, &scramble(&base, cfg.scramble, seed)?)
}

/// Σ α_ℓ μ̂_ℓ with an independent s-dimensional scrambled net of `sizes[ℓ]`
/// points in each stratum.
pub fn estimate_rqmc_per_stratum(
    spec: &MixtureSpec,
    g: &Integrand,
    sizes: &[u64],
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<Sample> {
    if sizes.len() != spec.num_strata() {
        return Err(Error::Domain(format!("{} sizes for {} strata", sizes.len(), spec.num_strata())));
    }
    match per_stratum_plan(spec, sizes, cfg)? {
        Plan::PerStratum { sizes, bases } => per_stratum_sum(spec, g, &sizes, &bases, cfg.scramble, seed),
        _ => unreachable!(),
    }
}

/// How mixture draws are generated for [`estimate_mixture_is`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    Mc,
    Rqmc,
}

/// (1/n) Σ g(x_i) p(x_i) / Σ_ℓ α_ℓ p_ℓ(x_i) with x_i drawn from the mixture.
/// `n = 2^m`.
pub fn estimate_mixture_is(
    spec: &MixtureSpec,
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    target: &(dyn Fn(&[f64]) -> f64 + Sync),
    sampler: Sampler,
    m: u32,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<f64> {
    let alpha = spec.alpha();
    let layout = StratumLayout::from_fractions(&alpha, &alpha)?;
    let s = spec.input_dim();
    let n = 1u64 << m;
    let mut u = vec![0.0; s];
    let mut x = vec![0.0; s];
    let mut total = 0.0;
    let pts = match sampler {
        Sampler::Rqmc => Some(scramble(&sobol_points(&cfg.dirs, s + 1, m)?, cfg.scramble, seed)?),
        Sampler::Mc => None,
    };
    let rng = CounterRng::new(seed);
    let d = (s + 1) as u64;
    for i in 0..n {
        let v = match &pts {
            Some(p) => {
                let w = p.point(i as usize);
                for (uj, &wj) in u.iter_mut().zip(&w[1..]) {
                    *uj = word_to_unit(wj);
                }
                word_to_unit(w[0])
            }
            None => {
                for (j, uj) in u.iter_mut().enumerate() {
                    *uj = rng.uniform(i * d + 1 + j as u64);
                }
                rng.uniform(i * d)
            }
        };
        let l = layout.stratum(v);
        spec.transform_into(l, &u, &mut x)?;
        let num = g(&x) * target(&x);
        if num == 0.0 {
            continue;
        }
        let q = spec.density(&x);
        if !(q > 0.0) {
            return Err(Error::Numeric(format!("mixture density vanishes at {x:?}")));
        }
        total += num / q;
    }
    Ok(total / n as f64)
}
