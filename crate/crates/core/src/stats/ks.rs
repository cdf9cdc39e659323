use statrs::distribution::{ContinuousCDF, Gamma};

use super::{GoFResult, DEFAULT_LEVEL};
use crate::error::{Error, Result};

/// Smallest sample accepted by the KS tests.
pub const KS_MIN_N: usize = 20;

const SERIES_TERMS: usize = 100;

/// Reference law for a one-sample KS test, or a second sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { low: f64, high: f64 },
    /// Law of the maximum of `k` independent `U(0,1)`: cdf `r^k` on `(0,1)`.
    PowerMax { k: u32 },
    Empirical(Vec<f64>),
}

impl Reference {
    fn name(&self) -> String {
        match self {
            Reference::Exponential { rate } => format!("Exp({rate})"),
            Reference::Gamma { shape, rate } => format!("Gamma({shape},{rate})"),
            Reference::Uniform { low, high } => format!("U({low},{high})"),
            Reference::PowerMax { k } => format!("PowerMax({k})"),
            Reference::Empirical(s) => format!("empirical(n={})", s.len()),
        }
    }

    fn cdf_fn(&self) -> Result<Box<dyn Fn(f64) -> f64>> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        Ok(match *self {
            Reference::Exponential { rate } => {
                if !(rate > 0.0) {
                    return bad("exponential rate must be positive");
                }
                Box::new(move |x: f64| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() })
            }
            Reference::Gamma { shape, rate } => {
                let g = Gamma::new(shape, rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                Box::new(move |x: f64| if x <= 0.0 { 0.0 } else { g.cdf(x) })
            }
            Reference::Uniform { low, high } => {
                if !(low < high) {
                    return bad("uniform needs low < high");
                }
                Box::new(move |x: f64| ((x - low) / (high - low)).clamp(0.0, 1.0))
            }
            Reference::PowerMax { k } => {
                if k == 0 {
                    return bad("PowerMax needs k >= 1");
                }
                Box::new(move |x: f64| x.clamp(0.0, 1.0).powi(k as i32))
            }
            Reference::Empirical(_) => return bad("empirical reference has no closed-form cdf"),
        })
    }
}

/// `P(K > λ)` for the Kolmogorov distribution, from its two theta-series
/// (100 terms each).
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        let pi2 = std::f64::consts::PI.powi(2);
        let s: f64 = (1..=SERIES_TERMS)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * pi2 / (8.0 * lambda * lambda)).exp()
            })
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        2.0 * (1..=SERIES_TERMS)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("sample contains NaN".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Kolmogorov–Smirnov test of `samples` against `reference` with the
/// asymptotic p-value. An [`Reference::Empirical`] reference gives the
/// two-sample test.
pub fn ks_test(samples: &[f64], reference: &Reference) -> Result<GoFResult> {
    if let Reference::Empirical(other) = reference {
        return ks_two_sample(samples, other);
    }
    if samples.len() < KS_MIN_N {
        return Err(Error::InvalidParameter(format!(
            "KS needs at least {KS_MIN_N} samples, got {}",
            samples.len()
        )));
    }
    let cdf = reference.cdf_fn()?;
    let xs = sorted_finite(samples)?;
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let p = kolmogorov_survival(n.sqrt() * d);
    Ok(GoFResult::new(format!("KS vs {}", reference.name()), d, p, xs.len(), DEFAULT_LEVEL))
}

/// Two-sample Kolmogorov–Smirnov test. Ties are handled by stepping both
/// empirical distribution functions over each distinct value together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GoFResult> {
    if a.len() < KS_MIN_N || b.len() < KS_MIN_N {
        return Err(Error::InvalidParameter(format!(
            "two-sample KS needs at least {KS_MIN_N} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let xa = sorted_finite(a)?;
    let xb = sorted_finite(b)?;
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let p = kolmogorov_survival(ne.sqrt() * d);
    Ok(GoFResult::new("two-sample KS", d, p, xa.len() + xb.len(), DEFAULT_LEVEL))
}
