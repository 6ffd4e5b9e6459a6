use super::{validate_alpha, AllocationPlan, AllocationRule, RateSpec};
use crate::error::{Error, Result};

/// Ideal sampling fractions ξ_ℓ ∝ w_ℓ^{e_ℓ} with w_ℓ = α_ℓ (τ_ℓ/c_ℓ)^{1/2}
/// and e_ℓ = 2/(ρ_ℓ+1) under ansatz 0 or 2/(ρ_ℓ+2) under ansatz 1.
pub fn ideal_fractions(alpha: &[f64], rule: &AllocationRule) -> Result<Vec<f64>> {
    validate_alpha(alpha)?;
    let l = alpha.len();
    if let RateSpec::PerStratum(r) = &rule.rate {
        if r.len() != l {
            return Err(Error::Domain(format!("{} rates for {l} strata", r.len())));
        }
    }
    if let Some(tau) = &rule.tau {
        if tau.len() != l {
            return Err(Error::Domain(format!("{} variance weights for {l} strata", tau.len())));
        }
        if tau.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
            return Err(Error::Domain("variance weights must be finite and non-negative".into()));
        }
        if tau.iter().all(|&t| t == 0.0) {
            return Err(Error::Domain("variance weights are all zero".into()));
        }
    }
    if let Some(costs) = &rule.costs {
        if costs.len() != l {
            return Err(Error::Domain(format!("{} costs for {l} strata", costs.len())));
        }
        if costs.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::Domain("costs must be strictly positive".into()));
        }
    }

    let raw: Vec<f64> = (0..l)
        .map(|i| {
            let tau = rule.tau.as_ref().map_or(1.0, |t| t[i]);
            let cost = rule.costs.as_ref().map_or(1.0, |c| c[i]);
            let w = alpha[i] * (tau / cost).sqrt();
            w.powf(rule.rate_of(i).exponent(rule.ansatz))
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Rounds n·ξ to integers summing to n with every stratum getting at least
/// one sample: floor, lift to 1, then move units by largest remainder
/// (ties to the lowest index).
pub fn integer_allocation(alpha: &[f64], rule: &AllocationRule, n: u64) -> Result<AllocationPlan> {
    let xi = ideal_fractions(alpha, rule)?;
    let l = xi.len() as u64;
    if n < l {
        return Err(Error::Infeasible(format!("n = {n} is smaller than the {l} strata")));
    }
    let target: Vec<f64> = xi.iter().map(|x| x * n as f64).collect();
    let mut sizes: Vec<u64> = target.iter().map(|t| (t.floor() as u64).max(1)).collect();
    let mut total: u64 = sizes.iter().sum();
    while total < n {
        let i = argmax_by(&sizes, |i| target[i] - sizes[i] as f64, |_| true);
        sizes[i] += 1;
        total += 1;
    }
    while total > n {
        let i = argmax_by(&sizes, |i| sizes[i] as f64 - target[i], |s| s > 1);
        sizes[i] -= 1;
        total -= 1;
    }
    Ok(AllocationPlan::from_sizes(alpha, xi, sizes, Some(rule.clone())))
}

fn argmax_by(sizes: &[u64], key: impl Fn(usize) -> f64, eligible: impl Fn(u64) -> bool) -> usize {
    let mut best = None::<(usize, f64)>;
    for (i, &s) in sizes.iter().enumerate() {
        if !eligible(s) {
            continue;
        }
        let k = key(i);
        if best.map_or(true, |(_, b)| k > b) {
            best = Some((i, k));
        }
    }
    best.expect("an adjustable stratum exists").0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{Ansatz, Rate};

    fn rule(rho: f64) -> AllocationRule {
        AllocationRule::new(Ansatz::Zero, Rate::new(rho).unwrap())
    }

    #[test]
    fn proportional_at_rate_one() {
        let xi = ideal_fractions(&[0.5, 0.25, 0.25], &rule(1.0)).unwrap();
        assert_eq!(xi, vec![0.5, 0.25, 0.25]);
    }

    #[test]
    fn square_root_at_rate_three() {
        let xi = ideal_fractions(&[0.9, 0.1], &rule(3.0)).unwrap();
        assert!((xi[0] - 0.75).abs() < 1e-15 && (xi[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn infinite_rate_is_equal() {
        let r = AllocationRule::new(Ansatz::One, Rate::Infinite);
        let xi = ideal_fractions(&[0.7, 0.2, 0.05, 0.05], &r).unwrap();
        assert!(xi.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn ansatz_one_table_entries() {
        // ρ = 1, 2, 3 give α^{2/3}, α^{1/2}, α^{2/5}
        let alpha = [0.8, 0.2];
        for (rho, p) in [(1.0, 2.0 / 3.0), (2.0, 0.5), (3.0, 0.4)] {
            let r = AllocationRule::new(Ansatz::One, Rate::new(rho).unwrap());
            let xi = ideal_fractions(&alpha, &r).unwrap();
            let want = 0.8f64.powf(p) / (0.8f64.powf(p) + 0.2f64.powf(p));
            assert!((xi[0] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn variance_and_cost_weights() {
        // Neyman: ρ = 1, ansatz 0, ξ ∝ α τ^{1/2}
        let r = rule(1.0).with_tau(vec![1.0, 9.0]);
        let xi = ideal_fractions(&[0.5, 0.5], &r).unwrap();
        assert!((xi[0] - 0.25).abs() < 1e-15);
        let r = rule(1.0).with_tau(vec![1.0, 9.0]).with_costs(vec![1.0, 9.0]);
        let xi = ideal_fractions(&[0.5, 0.5], &r).unwrap();
        assert!((xi[0] - 0.5).abs() < 1e-15);
        assert!(ideal_fractions(&[0.5, 0.5], &rule(1.0).with_tau(vec![0.0, 0.0])).is_err());
        assert!(ideal_fractions(&[0.5, 0.5], &rule(1.0).with_costs(vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn per_stratum_rates() {
        let r = AllocationRule::per_stratum(Ansatz::Zero, vec![Rate::Finite(1.0), Rate::Finite(3.0)]);
        let xi = ideal_fractions(&[0.64, 0.36], &r).unwrap();
        let raw = [0.64, 0.6];
        assert!((xi[0] - raw[0] / (raw[0] + raw[1])).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(ideal_fractions(&[1.0, 0.0], &rule(1.0)), Err(Error::Domain(_))));
        assert!(matches!(ideal_fractions(&[0.5, 0.4], &rule(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn integer_examples() {
        let p = integer_allocation(&[0.5, 0.25, 0.25], &rule(1.0), 8).unwrap();
        assert_eq!(p.sizes, vec![4, 2, 2]);
        let p = integer_allocation(&[0.9999, 0.0001], &rule(2.0), 4).unwrap();
        assert_eq!(p.sizes.iter().sum::<u64>(), 4);
        assert!(p.sizes.iter().all(|&s| s >= 1));
        assert!(matches!(
            integer_allocation(&[0.5, 0.25, 0.25], &rule(1.0), 2),
            Err(Error::Infeasible(_))
        ));
    }
}
