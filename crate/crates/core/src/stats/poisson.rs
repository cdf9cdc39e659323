use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use super::{GoFResult, DEFAULT_LEVEL};
use crate::error::{Error, Result};

/// Minimum expected count per bin in the chi-square goodness-of-fit test.
const MIN_EXPECTED: f64 = 5.0;

fn chi2_sf(stat: f64, df: f64) -> Result<f64> {
    let chi = ChiSquared::new(df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(chi.sf(stat))
}

/// Tests whether `counts` are i.i.d. Poisson(`mean`).
///
/// Two checks are combined: the index-of-dispersion test
/// `Σ(x - x̄)²/x̄ ~ χ²(n-1)` (two-sided) and a chi-square goodness-of-fit test
/// against the Poisson(`mean`) pmf with bins merged until each expects at
/// least 5 observations. The reported p-value is the smaller of the two and
/// the test passes only if both exceed the level.
pub fn poisson_count_test(counts: &[u64], mean: f64) -> Result<GoFResult> {
    let n = counts.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 counts".into()));
    }
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad Poisson mean {mean}")));
    }
    if mean == 0.0 {
        let all_zero = counts.iter().all(|&c| c == 0);
        let p = if all_zero { 1.0 } else { 0.0 };
        return Ok(GoFResult::new("Poisson(0) counts", 0.0, p, n, DEFAULT_LEVEL));
    }

    let xbar = counts.iter().sum::<u64>() as f64 / n as f64;
    let (p_disp, dispersion) = if xbar > 0.0 {
        let stat = counts.iter().map(|&c| (c as f64 - xbar).powi(2)).sum::<f64>() / xbar;
        let upper = chi2_sf(stat, (n - 1) as f64)?;
        ((2.0 * upper.min(1.0 - upper)).min(1.0), stat / (n - 1) as f64)
    } else {
        (0.0, 0.0)
    };

    let (chi_stat, df) = poisson_chi_square(counts, mean)?;
    let p_chi = if df >= 1 { chi2_sf(chi_stat, df as f64)? } else { 1.0 };

    let mut result = GoFResult::new(format!("Poisson({mean}) counts"), chi_stat, p_disp.min(p_chi), n, DEFAULT_LEVEL);
    result.passed = p_disp > result.level && p_chi > result.level;
    result.note = format!("dispersion index {dispersion:.4} (p = {p_disp:.4}); chi-square df {df} (p = {p_chi:.4})");
    Ok(result)
}

/// Chi-square statistic and degrees of freedom against Poisson(`mean`).
fn poisson_chi_square(counts: &[u64], mean: f64) -> Result<(f64, usize)> {
    let pois = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let n = counts.len() as f64;
    let max_seen = counts.iter().copied().max().unwrap_or(0);
    let kmax = max_seen.max((mean + 10.0 * mean.sqrt() + 10.0).ceil() as u64);

    let mut observed = vec![0u64; kmax as usize + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }

    // Bins are [start, end]; the last one is open to the right.
    let mut bins: Vec<(f64, u64)> = Vec::new();
    let (mut exp_acc, mut obs_acc) = (0.0, 0u64);
    for k in 0..=kmax {
        exp_acc += n * pois.pmf(k);
        obs_acc += observed[k as usize];
        if exp_acc >= MIN_EXPECTED {
            bins.push((exp_acc, obs_acc));
            exp_acc = 0.0;
            obs_acc = 0;
        }
    }
    let tail = n * pois.sf(kmax);
    exp_acc += tail;
    match bins.last_mut() {
        Some(last) if exp_acc < MIN_EXPECTED => {
            last.0 += exp_acc;
            last.1 += obs_acc;
        }
        _ => bins.push((exp_acc, obs_acc)),
    }
    let stat = bins
        .iter()
        .map(|&(e, o)| (o as f64 - e).powi(2) / e)
        .sum::<f64>();
    Ok((stat, bins.len().saturating_sub(1)))
}

/// Pearson chi-square test of independence on a contingency table.
/// Empty rows and columns are dropped.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<GoFResult> {
    let cols = table.first().map(Vec::len).unwrap_or(0);
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParameter("ragged contingency table".into()));
    }
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().sum::<u64>() > 0).collect();
    let keep: Vec<usize> = (0..cols).filter(|&j| rows.iter().map(|r| r[j]).sum::<u64>() > 0).collect();
    if rows.len() < 2 || keep.len() < 2 {
        return Err(Error::InvalidParameter("contingency table needs 2x2 non-empty cells".into()));
    }
    let row_sums: Vec<f64> = rows.iter().map(|r| keep.iter().map(|&j| r[j]).sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = keep.iter().map(|&j| rows.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = row_sums.iter().sum();
    let mut stat = 0.0;
    for (i, r) in rows.iter().enumerate() {
        for (jj, &j) in keep.iter().enumerate() {
            let e = row_sums[i] * col_sums[jj] / total;
            stat += (r[j] as f64 - e).powi(2) / e;
        }
    }
    let df = (rows.len() - 1) * (keep.len() - 1);
    let p = chi2_sf(stat, df as f64)?;
    Ok(GoFResult::new("chi-square independence", stat, p, total as usize, DEFAULT_LEVEL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand_distr::Distribution;

    #[test]
    fn all_zero_counts_with_zero_mean_pass() {
        let r = poisson_count_test(&[0; 300], 0.0).unwrap();
        assert!(r.passed);
        assert!(!poisson_count_test(&[0, 1, 0], 0.0).unwrap().passed);
    }

    #[test]
    fn poisson_counts_pass_and_shifted_mean_fails() {
        let mut rng = stream(21, 0);
        let pois = rand_distr::Poisson::new(50.0).unwrap();
        let counts: Vec<u64> = (0..2000).map(|_| pois.sample(&mut rng) as u64).collect();
        assert!(poisson_count_test(&counts, 50.0).unwrap().passed);
        assert!(!poisson_count_test(&counts, 53.0).unwrap().passed);
    }

    #[test]
    fn overdispersed_counts_fail() {
        let mut rng = stream(22, 0);
        // Geometric on {0,1,...} with mean e-1, the Yule count at time 1 minus one.
        let geo = rand_distr::Geometric::new((-1.0f64).exp()).unwrap();
        let counts: Vec<u64> = (0..500).map(|_| geo.sample(&mut rng)).collect();
        let r = poisson_count_test(&counts, std::f64::consts::E - 1.0).unwrap();
        assert!(!r.passed, "{r:?}");
    }

    #[test]
    fn independence_table() {
        let indep = vec![vec![100, 200], vec![50, 100]];
        assert!(chi_square_independence(&indep).unwrap().p_value > 0.99);
        let dep = vec![vec![200, 10], vec![10, 200]];
        assert!(!chi_square_independence(&dep).unwrap().passed);
        assert!(chi_square_independence(&[vec![1, 2]]).is_err());
    }
}
