//! Stratum sample-size allocation: ideal fractions, integer and power-of-two
//! rounding, inefficiency of mis-specified rates, and minimax designs.

mod fractions;
mod inefficiency;
mod minimax;
mod partitions;
mod pow2;

pub use fractions::{ideal_fractions, integer_allocation};
pub use inefficiency::{inefficiency_i0, inefficiency_i1, minimax_gamma, rate_grid, MinimaxGamma};
pub use minimax::{
    brute_force_minimax, minimax_allocation, minimax_allocation_pow2, suboptimality_ratio,
    worst_case_ratio, BruteForceMinimax,
};
pub use partitions::{enumerate_partitions, PartitionCatalogue};
pub use pow2::forward_power_of_two;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which between-stratum correlation the criterion assumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ansatz {
    /// Uncorrelated stratum estimates: minimize Σ α_ℓ² n_ℓ^{-ρ}.
    Zero,
    /// Perfectly correlated bound: minimize Σ α_ℓ n_ℓ^{-ρ/2}.
    One,
}

impl Ansatz {
    pub fn from_index(a: u8) -> Result<Self> {
        match a {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            _ => Err(Error::Domain(format!("ansatz must be 0 or 1, got {a}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::Zero => 0,
            Self::One => 1,
        }
    }
}

/// Variance rate ρ in Var(μ̂_ℓ) = τ_ℓ n_ℓ^{-ρ}; `Infinite` gives equal fractions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rate {
    Finite(f64),
    Infinite,
}

impl Rate {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_infinite() && rho > 0.0 {
            return Ok(Self::Infinite);
        }
        if !(rho >= 1.0) {
            return Err(Error::Domain(format!("rate must be >= 1, got {rho}")));
        }
        Ok(Self::Finite(rho))
    }

    /// Power of the weight in the ideal fraction.
    pub fn exponent(self, ansatz: Ansatz) -> f64 {
        match (self, ansatz) {
            (Self::Infinite, _) => 0.0,
            (Self::Finite(r), Ansatz::Zero) => 2.0 / (r + 1.0),
            (Self::Finite(r), Ansatz::One) => 2.0 / (r + 2.0),
        }
    }
}

impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "+inf" | "∞" => Ok(Self::Infinite),
            t => Self::new(t.parse::<f64>().map_err(|e| Error::Domain(format!("rate {t:?}: {e}")))?),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(r) => write!(f, "{r}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RateSpec {
    Common(Rate),
    PerStratum(Vec<Rate>),
}

/// How to turn mixture weights into sampling fractions.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationRule {
    pub ansatz: Ansatz,
    pub rate: RateSpec,
    /// Relative within-stratum variance constants τ_ℓ ≥ 0.
    pub tau: Option<Vec<f64>>,
    /// Per-sample costs c_ℓ > 0.
    pub costs: Option<Vec<f64>>,
    pub power_of_two: bool,
}

impl AllocationRule {
    pub fn new(ansatz: Ansatz, rate: Rate) -> Self {
        Self { ansatz, rate: RateSpec::Common(rate), tau: None, costs: None, power_of_two: false }
    }

    pub fn per_stratum(ansatz: Ansatz, rates: Vec<Rate>) -> Self {
        Self { ansatz, rate: RateSpec::PerStratum(rates), tau: None, costs: None, power_of_two: false }
    }

    pub fn with_tau(mut self, tau: Vec<f64>) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_costs(mut self, costs: Vec<f64>) -> Self {
        self.costs = Some(costs);
        self
    }

    pub fn pow2(mut self, on: bool) -> Self {
        self.power_of_two = on;
        self
    }

    pub(crate) fn rate_of(&self, stratum: usize) -> Rate {
        match &self.rate {
            RateSpec::Common(r) => *r,
            RateSpec::PerStratum(rs) => rs[stratum],
        }
    }
}

/// Sample sizes for each stratum together with the implied fractions and
/// importance weights. Vectors are indexed by stratum in input order.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationPlan {
    pub alpha: Vec<f64>,
    /// Ideal (unrounded) fractions the sizes were rounded from.
    pub xi: Vec<f64>,
    pub sizes: Vec<u64>,
    pub n: u64,
    pub beta: Vec<f64>,
    pub weights: Vec<f64>,
    /// log2 of each size when every size is a power of two.
    pub exponents: Option<Vec<u32>>,
    /// `order[slot]` = stratum placed in the slot-th interval of [0,1),
    /// slots sorted by non-increasing β (stable).
    pub order: Vec<usize>,
    pub rule: Option<AllocationRule>,
}

impl AllocationPlan {
    pub(crate) fn from_sizes(
        alpha: &[f64],
        xi: Vec<f64>,
        sizes: Vec<u64>,
        rule: Option<AllocationRule>,
    ) -> Self {
        let n: u64 = sizes.iter().sum();
        let beta: Vec<f64> = sizes.iter().map(|&s| s as f64 / n as f64).collect();
        let weights = alpha.iter().zip(&beta).map(|(a, b)| a / b).collect();
        let exponents = sizes
            .iter()
            .all(|s| s.is_power_of_two())
            .then(|| sizes.iter().map(|s| s.trailing_zeros()).collect());
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]));
        Self { alpha: alpha.to_vec(), xi, sizes, n, beta, weights, exponents, order, rule }
    }

    pub fn num_strata(&self) -> usize {
        self.sizes.len()
    }

    /// Number of doublings Algorithm-1 style growth needs from all-ones.
    pub fn doubling_steps(&self) -> Option<u32> {
        self.exponents.as_ref().map(|e| e.iter().sum())
    }

    /// Sizes in slot order (non-increasing).
    pub fn sorted_sizes(&self) -> Vec<u64> {
        self.order.iter().map(|&l| self.sizes[l]).collect()
    }
}

/// Integer or power-of-two allocation according to `rule.power_of_two`.
pub fn allocate(alpha: &[f64], rule: &AllocationRule, n: u64) -> Result<AllocationPlan> {
    if rule.power_of_two {
        forward_power_of_two(alpha, rule, n)
    } else {
        integer_allocation(alpha, rule, n)
    }
}

pub(crate) fn validate_alpha(alpha: &[f64]) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::Domain("no mixture weights".into()));
    }
    if let Some(a) = alpha.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::Domain(format!("mixture weight {a} is not positive")));
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("mixture weights sum to {total}, not 1")));
    }
    Ok(())
}
