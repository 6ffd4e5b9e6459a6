use crate::error::{Error, Result};

/// Least-squares slope of log2(variance) against log2(n).
pub fn fit_log2_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Domain(format!("slope fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, v)) = points.iter().find(|&&(n, v)| !(n > 0.0) || !(v > 0.0)) {
        return Err(Error::Domain(format!("cannot take logs of n = {n}, variance = {v}")));
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, v)| (n.log2(), v.log2())).collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all sample sizes are equal".into()));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}
