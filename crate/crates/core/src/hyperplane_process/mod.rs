//! The birth-time-marked Poisson hyperplane process and the backward chain
//! of zero cells built from it.
//!
//! Marks are birth times. The hyperplanes born in `(0, t)` form a Poisson
//! hyperplane process with intensity `t·Λ`. Going backwards from time 1
//! towards 0 the zero cell (the cell containing the origin) grows, one
//! directed extent at a time.

mod chain;
mod explosion;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::{lambda_hit_rate, sample_hitting_hyperplane, CellGeometry, Cuboid, DirectionalDistribution, Hyperplane};

pub use chain::{build_zero_cell_chain, sample_axis_chain, AxisChain, Sign, ZeroCellChain};
pub use explosion::{explosion_diagnostic, ExplosionReport, Verdict, CONVERGENCE_THRESHOLD, MIN_DIAGNOSTIC_DEPTH};

/// A hyperplane together with its birth time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedHyperplane {
    pub plane: Hyperplane,
    pub birth: f64,
}

/// The marked hyperplanes hitting `c` with births in `(t_lo, t_hi)`, sorted
/// by birth.
///
/// The count is Poisson with mean `Λ([c])·(t_hi - t_lo)`; given the count,
/// planes are i.i.d. from `Λ` restricted to `[c]` and births are i.i.d.
/// uniform.
pub fn sample_marked_hyperplanes<R: Rng + ?Sized>(
    c: &Cuboid,
    t_lo: f64,
    t_hi: f64,
    phi: &DirectionalDistribution,
    rng: &mut R,
) -> Result<Vec<MarkedHyperplane>> {
    if !(t_lo >= 0.0 && t_lo < t_hi && t_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "birth interval ({t_lo}, {t_hi}) must satisfy 0 <= t_lo < t_hi < inf"
        )));
    }
    let cell = CellGeometry::Cuboid(c.clone());
    let mean = lambda_hit_rate(&cell, phi)? * (t_hi - t_lo);
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng) as usize
    } else {
        0
    };
    let mut planes = Vec::with_capacity(count);
    for _ in 0..count {
        let plane = sample_hitting_hyperplane(&cell, phi, rng)?;
        let birth = t_lo + rng.random::<f64>() * (t_hi - t_lo);
        planes.push(MarkedHyperplane { plane, birth });
    }
    planes.sort_by(|a, b| a.birth.total_cmp(&b.birth));
    Ok(planes)
}
