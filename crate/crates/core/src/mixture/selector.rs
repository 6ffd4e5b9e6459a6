use crate::error::{Error, Result};

/// Maps the first RQMC coordinate v to a slot via B_{ℓ−1} ≤ v < B_ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumSelector {
    beta: Vec<f64>,
    /// Upper bounds B_1..B_L; B_L is exactly 1.
    bounds: Vec<f64>,
}

impl StratumSelector {
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Exact bounds B_ℓ = (n_1 + ... + n_ℓ) / n from integer sizes.
    pub fn from_sizes(sizes: &[u64]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Contract("sizes must be positive".into()));
        }
        if sizes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Contract(format!("sizes {sizes:?} are not non-increasing")));
        }
        let n: u64 = sizes.iter().sum();
        let nf = n as f64;
        let mut acc = 0u64;
        let bounds = sizes
            .iter()
            .map(|&s| {
                acc += s;
                acc as f64 / nf
            })
            .collect();
        Ok(Self { beta: sizes.iter().map(|&s| s as f64 / nf).collect(), bounds })
    }

    #[inline]
    pub fn select(&self, v: f64) -> usize {
        let slot = self.bounds.partition_point(|&b| b <= v);
        slot.min(self.bounds.len() - 1)
    }
}

/// Builds the selector for fractions that are positive, non-increasing and
/// sum to one (within 1e-12).
pub fn build_selector(beta: &[f64]) -> Result<StratumSelector> {
    if beta.is_empty() {
        return Err(Error::Contract("no strata".into()));
    }
    if beta.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::Contract(format!("fractions {beta:?} must be positive")));
    }
    if beta.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Contract(format!("fractions {beta:?} are not non-increasing")));
    }
    let total: f64 = beta.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!("fractions sum to {total}, not 1")));
    }
    let mut acc = 0.0;
    let mut bounds: Vec<f64> = beta
        .iter()
        .map(|&b| {
            acc += b;
            acc
        })
        .collect();
    *bounds.last_mut().unwrap() = 1.0;
    Ok(StratumSelector { beta: beta.to_vec(), bounds })
}

/// Slot index ℓ(v); v = 1 maps to the last slot.
pub fn select_stratum(sel: &StratumSelector, v: f64) -> usize {
    sel.select(v)
}

/// Sampling fractions for strata in their original order, laid out on [0,1)
/// with non-increasing interval lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumLayout {
    /// `order[slot]` is the stratum occupying the slot-th interval.
    pub order: Vec<usize>,
    pub selector: StratumSelector,
    /// ω_ℓ = α_ℓ / β_ℓ indexed by stratum.
    pub weights: Vec<f64>,
}

impl StratumLayout {
    /// Layout for per-stratum fractions `beta` (stable descending sort).
    pub fn from_fractions(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        let order = descending_order(beta);
        let sorted: Vec<f64> = order.iter().map(|&l| beta[l]).collect();
        let selector = build_selector(&sorted)?;
        Ok(Self { order, selector, weights: weights(alpha, beta) })
    }

    /// Layout for per-stratum integer sizes, with exact interval bounds.
    pub fn from_sizes(alpha: &[f64], sizes: &[u64]) -> Result<Self> {
        let as_f: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        let order = descending_order(&as_f);
        let sorted: Vec<u64> = order.iter().map(|&l| sizes[l]).collect();
        let selector = StratumSelector::from_sizes(&sorted)?;
        let n: u64 = sizes.iter().sum();
        let beta: Vec<f64> = sizes.iter().map(|&s| s as f64 / n as f64).collect();
        Ok(Self { order, selector, weights: weights(alpha, &beta) })
    }

    /// Stratum for first coordinate `v`.
    #[inline]
    pub fn stratum(&self, v: f64) -> usize {
        self.order[self.selector.select(v)]
    }
}

fn weights(alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    alpha.iter().zip(beta).map(|(a, b)| a / b).collect()
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
    order
}
