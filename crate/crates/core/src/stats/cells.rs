use rand::Rng;

use super::{ks_two_sample, GoFResult};
use crate::division::{Cell, TessellationSnapshot};
use crate::error::{Error, Result};
use crate::geometry::{CellGeometry, Cuboid};

/// Minimum number of replicates per time in [`scaling_check`].
pub const SCALING_MIN_REPS: usize = 1000;

/// Minus-sampling estimator of the typical cell: the cells whose reference
/// point (lower corner of a cuboid, lexicographically smallest vertex of a
/// polygon) lies in `window` shrunk by `margin`. Selected cells are kept
/// whole, even if they reach outside the shrunk window.
pub fn typical_cell_samples(snapshot: &TessellationSnapshot, window: &CellGeometry, margin: f64) -> Result<Vec<Cell>> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::InvalidParameter(format!("erosion margin {margin} must be >= 0")));
    }
    if margin == 0.0 {
        return Ok(snapshot.cells.clone());
    }
    let inside: Box<dyn Fn(&[f64]) -> bool> = match window {
        CellGeometry::Cuboid(w) => {
            let lower: Vec<f64> = w.lower().iter().map(|x| x + margin).collect();
            let upper: Vec<f64> = w.upper().iter().map(|x| x - margin).collect();
            let eroded = Cuboid::new(lower, upper)
                .map_err(|_| Error::InvalidParameter(format!("window eroded by {margin} is empty")))?;
            Box::new(move |p| eroded.contains_point(p))
        }
        CellGeometry::Polygon(w) => {
            let eroded = w
                .eroded(margin)
                .ok_or_else(|| Error::InvalidParameter(format!("window eroded by {margin} is empty")))?;
            Box::new(move |p| eroded.contains_point([p[0], p[1]], 0.0))
        }
    };
    Ok(snapshot
        .cells
        .iter()
        .filter(|c| inside(&c.geometry.reference_point()))
        .cloned()
        .collect())
}

/// Tests `t·V_d(z^o_t)` at `t1` against the same quantity at `t2` with a
/// two-sample KS test. `sampler(t, rng)` must return one independent draw
/// of `V_d(z^o_t)`.
pub fn scaling_check<R, F>(sampler: F, t1: f64, t2: f64, reps: usize, rng: &mut R) -> Result<GoFResult>
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R) -> Result<f64>,
{
    scaling_check_with_exponent(sampler, t1, t2, reps, 1.0, rng)
}

/// [`scaling_check`] with the samples multiplied by `t^exponent`. Exponent
/// 0 compares the raw volumes, a negative control.
pub fn scaling_check_with_exponent<R, F>(
    mut sampler: F,
    t1: f64,
    t2: f64,
    reps: usize,
    exponent: f64,
    rng: &mut R,
) -> Result<GoFResult>
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R) -> Result<f64>,
{
    if reps < SCALING_MIN_REPS {
        return Err(Error::InvalidParameter(format!(
            "scaling check needs at least {SCALING_MIN_REPS} replicates, got {reps}"
        )));
    }
    if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(Error::InvalidParameter("times must be positive and finite".into()));
    }
    let mut draw = |t: f64, rng: &mut R| -> Result<Vec<f64>> {
        let f = t.powf(exponent);
        (0..reps).map(|_| sampler(t, rng).map(|v| f * v)).collect()
    };
    let a = draw(t1, rng)?;
    let b = draw(t2, rng)?;
    let mut r = ks_two_sample(&a, &b)?;
    r.test = format!("scaling t^{exponent}·V_d at t={t1} vs t={t2}");
    Ok(r)
}
