use rayon::prelude::*;

use super::Sample;
use crate::error::{Error, Result};
use crate::seed::split;

/// R replicate estimates and their summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub name: String,
    pub n: u64,
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance (divisor R − 1).
    pub variance: f64,
    /// `counts[r][ℓ]`: points in stratum ℓ during replicate r.
    pub counts: Vec<Vec<u64>>,
}

impl EstimatorReport {
    pub fn from_samples(name: impl Into<String>, n: u64, samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!("need at least 2 replicates, got {}", samples.len())));
        }
        let (estimates, counts): (Vec<f64>, Vec<Vec<u64>>) =
            samples.into_iter().map(|s| (s.estimate, s.counts)).unzip();
        let r = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / r;
        let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (r - 1.0);
        Ok(Self { name: name.into(), n, estimates, mean, variance, counts })
    }

    pub fn reps(&self) -> usize {
        self.estimates.len()
    }

    /// Standard error of the replicate mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.reps() as f64).sqrt()
    }
}

/// Runs `estimate(split(master, r))` for r = 0..reps (in parallel on the
/// current rayon pool) and summarizes. Results do not depend on scheduling.
pub fn replicate_variance<F>(name: &str, n: u64, reps: usize, master: u64, estimate: F) -> Result<EstimatorReport>
where
    F: Fn(u64) -> Result<Sample> + Sync,
{
    if reps < 2 {
        return Err(Error::Domain(format!("need at least 2 replicates, got {reps}")));
    }
    let samples = (0..reps as u64)
        .into_par_iter()
        .map(|r| estimate(split(master, r)))
        .collect::<Result<Vec<_>>>()?;
    EstimatorReport::from_samples(name, n, samples)
}

/// Pearson correlation of two equally long series.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Domain("correlation needs two series of equal length >= 2".into()));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Numeric("correlation of a constant series".into()));
    }
    Ok(sab / (saa * sbb).sqrt())
}
