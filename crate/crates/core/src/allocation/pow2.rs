use super::{ideal_fractions, AllocationPlan, AllocationRule};
use crate::error::{Error, Result};

/// Forward stratified allocation: start every stratum at one sample and
/// repeatedly double the eligible stratum (n_ℓ ≤ remaining budget) with the
/// largest ξ_ℓ / n_ℓ, ties to the lowest index, until the budget is spent.
pub fn forward_power_of_two(alpha: &[f64], rule: &AllocationRule, n: u64) -> Result<AllocationPlan> {
    let xi = ideal_fractions(alpha, rule)?;
    let l = xi.len() as u64;
    if !n.is_power_of_two() {
        return Err(Error::Infeasible(format!("n = {n} is not a power of two")));
    }
    if n < l {
        return Err(Error::Infeasible(format!("n = {n} is smaller than the {l} strata")));
    }
    let mut sizes = vec![1u64; xi.len()];
    let mut remaining = n - l;
    let mut steps = 0u64;
    while remaining > 0 {
        let mut pick = None::<(usize, f64)>;
        for (i, (&s, &x)) in sizes.iter().zip(&xi).enumerate() {
            if s > remaining {
                continue;
            }
            let score = x / s as f64;
            if pick.map_or(true, |(_, best)| score > best) {
                pick = Some((i, score));
            }
        }
        // The smallest n_ℓ divides both n and the allocated total, so it
        // always fits in a positive remainder.
        let (i, _) = pick.ok_or_else(|| Error::Numeric("no eligible stratum to double".into()))?;
        remaining -= sizes[i];
        sizes[i] *= 2;
        steps += 1;
        debug_assert!(steps <= n - l);
    }
    Ok(AllocationPlan::from_sizes(alpha, xi, sizes, Some(rule.clone().pow2(true))))
}
