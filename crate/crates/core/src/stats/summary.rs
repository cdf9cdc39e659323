use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream;

/// Resamples used for the bootstrap standard error of the CV.
pub const BOOTSTRAP_RESAMPLES: usize = 2000;
/// Minimum sample size for [`cv_report`].
pub const CV_MIN_N: usize = 100;

const BOOTSTRAP_SEED: u64 = 0x5eed_b007;
const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `sqrt(variance) / mean`, defined when `mean > 0`.
    pub cv: Option<f64>,
    /// Bootstrap standard error of `cv`.
    pub cv_se: Option<f64>,
    /// `(level, value)` pairs, linear interpolation between order statistics.
    pub quantiles: Vec<(f64, f64)>,
}

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean, variance, CV and quantiles (no bootstrap).
pub fn summarize(samples: &[f64]) -> Result<SampleSummary> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite sample".into()));
    }
    let (mean, variance) = moments(samples);
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(SampleSummary {
        n: samples.len(),
        mean,
        variance,
        cv: (mean > 0.0).then(|| variance.sqrt() / mean),
        cv_se: None,
        quantiles: QUANTILE_LEVELS.iter().map(|&q| (q, quantile(&sorted, q))).collect(),
    })
}

/// Summary with the coefficient of variation and its bootstrap standard
/// error. The bootstrap uses a fixed internal stream, so the result depends
/// on the samples only.
pub fn cv_report(samples: &[f64]) -> Result<SampleSummary> {
    if samples.len() < CV_MIN_N {
        return Err(Error::InvalidParameter(format!(
            "CV report needs at least {CV_MIN_N} samples, got {}",
            samples.len()
        )));
    }
    let mut summary = summarize(samples)?;
    if !(summary.mean > 0.0) {
        return Err(Error::InvalidParameter(format!("mean {} is not positive", summary.mean)));
    }
    let mut rng = stream(BOOTSTRAP_SEED, samples.len() as u64);
    let n = samples.len();
    let mut cvs = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = samples[rng.random_range(0..n)];
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let var = ((s2 - s * mean) / (n as f64 - 1.0)).max(0.0);
        cvs.push(var.sqrt() / mean);
    }
    let (_, var_cv) = moments(&cvs);
    summary.cv_se = Some(var_cv.sqrt());
    Ok(summary)
}
