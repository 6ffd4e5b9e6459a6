use super::validate_alpha;
use crate::error::{Error, Result};

fn check_rates(gamma: f64, rho: f64) -> Result<()> {
    for (name, r) in [("gamma", gamma), ("rho", rho)] {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::Domain(format!("{name} must be a finite rate >= 1, got {r}")));
        }
    }
    Ok(())
}

fn power_sum(alpha: &[f64], p: f64) -> f64 {
    alpha.iter().map(|a| a.powf(p)).sum()
}

/// Ratio of Σα_ℓ² n_ℓ^{-ρ} when designing with rate γ to its optimum:
/// Σα^{2−2ρ/(γ+1)} (Σα^{2/(γ+1)})^ρ / (Σα^{2/(ρ+1)})^{ρ+1}.
pub fn inefficiency_i0(gamma: f64, rho: f64, alpha: &[f64]) -> Result<f64> {
    check_rates(gamma, rho)?;
    validate_alpha(alpha)?;
    let num = power_sum(alpha, 2.0 - 2.0 * rho / (gamma + 1.0)) * power_sum(alpha, 2.0 / (gamma + 1.0)).powf(rho);
    Ok(num / power_sum(alpha, 2.0 / (rho + 1.0)).powf(rho + 1.0))
}

/// Squared-error analogue for ansatz 1:
/// (Σα^{1−ρ/(γ+2)})² (Σα^{2/(γ+2)})^ρ / (Σα^{2/(ρ+2)})^{ρ+2}.
pub fn inefficiency_i1(gamma: f64, rho: f64, alpha: &[f64]) -> Result<f64> {
    check_rates(gamma, rho)?;
    validate_alpha(alpha)?;
    let num = power_sum(alpha, 1.0 - rho / (gamma + 2.0)).powi(2) * power_sum(alpha, 2.0 / (gamma + 2.0)).powf(rho);
    Ok(num / power_sum(alpha, 2.0 / (rho + 2.0)).powf(rho + 2.0))
}

// Values within this relative distance count as tied (rounding noise).
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimaxGamma {
    pub gamma: f64,
    pub max_inefficiency: f64,
    /// A ρ attaining the maximum for the chosen γ.
    pub worst_rho: f64,
}

pub fn rate_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("empty grid [{lo}, {hi}] with step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + i as f64 * step).collect())
}

/// argmin over γ of max over ρ of I0(γ | ρ) on a common grid of spacing
/// `step`. Every interior ρ is scanned; ties go to the smallest γ.
pub fn minimax_gamma(
    alpha: &[f64],
    gamma_range: (f64, f64),
    rho_range: (f64, f64),
    step: f64,
) -> Result<MinimaxGamma> {
    let gammas = rate_grid(gamma_range.0, gamma_range.1, step)?;
    let rhos = rate_grid(rho_range.0, rho_range.1, step)?;
    let mut best: Option<MinimaxGamma> = None;
    for &g in &gammas {
        let mut worst = (f64::NEG_INFINITY, rhos[0]);
        for &r in &rhos {
            let v = inefficiency_i0(g, r, alpha)?;
            if v > worst.0 * (1.0 + TIE_TOL) {
                worst = (v, r);
            }
        }
        if best.map_or(true, |b| worst.0 < b.max_inefficiency * (1.0 - TIE_TOL)) {
            best = Some(MinimaxGamma { gamma: g, max_inefficiency: worst.0, worst_rho: worst.1 });
        }
    }
    Ok(best.expect("grids are non-empty"))
}
