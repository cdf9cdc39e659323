use std::fmt;

use super::ZeroCellChain;
use crate::error::{Error, Result};
use crate::geometry::{lifetime_rate, CellGeometry, DirectionalDistribution, LifetimeRule};

/// Chains shorter than this always get [`Verdict::Inconclusive`].
pub const MIN_DIAGNOSTIC_DEPTH: usize = 50;

/// Increment size below which the tail of the series counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-6;

/// Heuristic reading of the partial sums of `Σ 1/G(z̃_(i))`. It is an
/// exploratory signal, not a proof either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every increment in the last quartile is below
    /// [`CONVERGENCE_THRESHOLD`].
    Converging,
    /// The last-quartile increments stay above the threshold and above half
    /// the mean increment of the third quartile.
    Diverging,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converging => "converging",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Partial sums `Σ_{i=-j}^{0} G(z̃_(i))^{-1}` along a zero-cell chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplosionReport {
    pub rule: LifetimeRule,
    pub depth: usize,
    /// `1 / G(z̃_(-j))` for `j = 0..depth`.
    pub increments: Vec<f64>,
    /// Running sums of `increments`.
    pub partial_sums: Vec<f64>,
    /// Largest increment in the last quartile.
    pub tail_max: f64,
    /// Smallest increment in the last quartile.
    pub tail_min: f64,
    /// Mean increment in the third quartile.
    pub third_quartile_mean: f64,
    pub verdict: Verdict,
}

impl ExplosionReport {
    /// One-line statement of how the verdict was reached.
    pub fn note(&self) -> String {
        format!(
            "heuristic: converging if last-quartile increments < {CONVERGENCE_THRESHOLD:e}, \
             diverging if they stay >= {CONVERGENCE_THRESHOLD:e} and >= half the third-quartile mean; \
             depth < {MIN_DIAGNOSTIC_DEPTH} is inconclusive"
        )
    }
}

fn classify(increments: &[f64]) -> (f64, f64, f64, Verdict) {
    let n = increments.len();
    let tail = &increments[n - n / 4..];
    let third = &increments[n / 2..n - n / 4];
    let tail_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let third_mean = if third.is_empty() {
        f64::NAN
    } else {
        third.iter().sum::<f64>() / third.len() as f64
    };
    let verdict = if n < MIN_DIAGNOSTIC_DEPTH {
        Verdict::Inconclusive
    } else if tail_max < CONVERGENCE_THRESHOLD {
        Verdict::Converging
    } else if tail_min > CONVERGENCE_THRESHOLD && tail_min >= 0.5 * third_mean {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    (tail_max, tail_min, third_mean, verdict)
}

/// Evaluates the non-explosion series for `rule` along `chain`.
pub fn explosion_diagnostic(chain: &ZeroCellChain, rule: &LifetimeRule) -> Result<ExplosionReport> {
    rule.validate(chain.dim())?;
    let phi = DirectionalDistribution::mondrian(chain.weights().to_vec())?;
    let mut increments = Vec::with_capacity(chain.depth());
    for b in chain.boxes() {
        let g = lifetime_rate(rule, &CellGeometry::Cuboid(b.clone()), &phi)?;
        if !(g > 0.0) {
            return Err(Error::DegenerateCell(format!("G = {g} on a zero cell")));
        }
        increments.push(1.0 / g);
    }
    let partial_sums = increments
        .iter()
        .scan(0.0, |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect();
    let (tail_max, tail_min, third_quartile_mean, verdict) = classify(&increments);
    Ok(ExplosionReport {
        rule: *rule,
        depth: chain.depth(),
        increments,
        partial_sums,
        tail_max,
        tail_min,
        third_quartile_mean,
        verdict,
    })
}
