use super::{validate_alpha, AllocationPlan, Ansatz};
use crate::error::{Error, Result};

/// Near-equal integer allocation: the first r = N − L⌊N/L⌋ strata get
/// ⌊N/L⌋ + 1, the rest ⌊N/L⌋.
pub fn minimax_allocation(total: u64, strata: usize) -> Result<Vec<u64>> {
    let l = strata as u64;
    if strata == 0 || total < l {
        return Err(Error::Infeasible(format!("N = {total} cannot give {strata} strata a sample each")));
    }
    let base = total / l;
    let r = (total - l * base) as usize;
    Ok((0..strata).map(|i| if i < r { base + 1 } else { base }).collect())
}

/// Near-equal power-of-two allocation: with r = ⌈log2 L⌉, the first
/// s = 2^r − L strata get β = 2^{1−r} and the rest 2^{−r}.
pub fn minimax_allocation_pow2(alpha: &[f64], n: u64) -> Result<AllocationPlan> {
    validate_alpha(alpha)?;
    let l = alpha.len() as u64;
    let r = l.next_power_of_two().trailing_zeros();
    if !n.is_power_of_two() || n < 1u64 << r {
        return Err(Error::Infeasible(format!("n = {n} must be a power of two >= 2^{r}")));
    }
    let s = ((1u64 << r) - l) as usize;
    let sizes: Vec<u64> = (0..alpha.len())
        .map(|i| if i < s { n >> (r - 1) } else { n >> r })
        .collect();
    let xi = sizes.iter().map(|&x| x as f64 / n as f64).collect();
    Ok(AllocationPlan::from_sizes(alpha, xi, sizes, None))
}

/// R_a(n | ñ; τ): the criterion at sizes `n` relative to sizes `alt`.
pub fn suboptimality_ratio(
    ansatz: Ansatz,
    n: &[u64],
    alt: &[u64],
    tau: &[f64],
    alpha: &[f64],
    rho: f64,
) -> Result<f64> {
    let l = alpha.len();
    if n.len() != l || alt.len() != l || tau.len() != l {
        return Err(Error::Domain("vectors must have one entry per stratum".into()));
    }
    if n.iter().chain(alt).any(|&x| x == 0) {
        return Err(Error::Domain("sample sizes must be positive".into()));
    }
    if tau.iter().any(|&t| !(t >= 0.0)) || tau.iter().all(|&t| t == 0.0) {
        return Err(Error::Domain("need τ ≥ 0 with at least one τ_ℓ > 0".into()));
    }
    let crit = |sizes: &[u64]| -> f64 {
        (0..l)
            .map(|i| match ansatz {
                Ansatz::Zero => alpha[i] * alpha[i] * tau[i] * (sizes[i] as f64).powf(-rho),
                Ansatz::One => alpha[i] * tau[i].sqrt() * (sizes[i] as f64).powf(-rho / 2.0),
            })
            .sum()
    };
    Ok(crit(n) / crit(alt))
}

/// Positive compositions of `total` into `parts` parts, lexicographically
/// descending.
fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn go(total: u64, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in (1..=total - (parts as u64 - 1)).rev() {
            cur.push(first);
            go(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 && total >= parts as u64 {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Largest suboptimality of `n` over every alternative in Δ_N and every
/// single-stratum τ, with uniform α (α cancels for such τ).
pub fn worst_case_ratio(n: &[u64], rho: f64, ansatz: Ansatz) -> Result<f64> {
    let l = n.len();
    let total: u64 = n.iter().sum();
    let alpha = vec![1.0 / l as f64; l];
    let mut worst = 0.0f64;
    for alt in compositions(total, l) {
        for k in 0..l {
            let mut tau = vec![0.0; l];
            tau[k] = 1.0;
            worst = worst.max(suboptimality_ratio(ansatz, n, &alt, &tau, &alpha, rho)?);
        }
    }
    Ok(worst)
}

/// Result of exhaustive minimax search.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceMinimax {
    /// Most balanced minimizer (smallest Σn_ℓ², then lexicographically largest).
    pub best: Vec<u64>,
    pub value: f64,
    pub minimizers: Vec<Vec<u64>>,
}

pub const BRUTE_FORCE_MAX_N: u64 = 14;
pub const BRUTE_FORCE_MAX_L: usize = 4;

/// min over n ∈ Δ_N of max over ñ ∈ Δ_N and τ of R_a(n | ñ; τ), by enumeration.
pub fn brute_force_minimax(total: u64, strata: usize, rho: f64, ansatz: Ansatz) -> Result<BruteForceMinimax> {
    if total > BRUTE_FORCE_MAX_N || strata > BRUTE_FORCE_MAX_L || strata == 0 {
        return Err(Error::Capability(format!(
            "enumeration supports N <= {BRUTE_FORCE_MAX_N}, 1 <= L <= {BRUTE_FORCE_MAX_L}"
        )));
    }
    if total < strata as u64 {
        return Err(Error::Infeasible(format!("N = {total} < L = {strata}")));
    }
    let mut scored = Vec::new();
    for n in compositions(total, strata) {
        let v = worst_case_ratio(&n, rho, ansatz)?;
        scored.push((n, v));
    }
    let value = scored.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let minimizers: Vec<Vec<u64>> = scored
        .into_iter()
        .filter(|(_, v)| *v <= value * (1.0 + 1e-12))
        .map(|(n, _)| n)
        .collect();
    let best = minimizers
        .iter()
        .min_by_key(|n| n.iter().map(|x| x * x).sum::<u64>())
        .cloned()
        .expect("Δ_N is non-empty");
    Ok(BruteForceMinimax { best, value, minimizers })
}
