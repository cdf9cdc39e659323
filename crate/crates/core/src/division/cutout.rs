use rand::Rng;

use super::{run_in_window, snapshot_at, Caps, EventLog, TessellationSnapshot};
use crate::error::{Error, Result};
use crate::geometry::{CellGeometry, Cuboid, DirectionalDistribution, Hyperplane, LifetimeRule};
use crate::hyperplane_process::{sample_marked_hyperplanes, MarkedHyperplane};

/// Upper bound on the enlargement rounds of [`enclosing_zero_cell`].
pub const MAX_CUTOUT_ROUNDS: usize = 10_000;

/// The zero cell of axis-aligned `planes` inside `bounds`: on each side of
/// the origin along each axis, the nearest plane. Sides with no plane fall
/// back to the face of `bounds`; the flag reports whether that happened.
pub fn zero_cell_of_planes(planes: &[MarkedHyperplane], bounds: &Cuboid) -> Result<(Cuboid, bool)> {
    let d = bounds.dim();
    let origin = vec![0.0; d];
    if !bounds.contains_point_strictly(&origin) {
        return Err(Error::InvalidGeometry("bounds must contain the origin in their interior".into()));
    }
    let mut lower = bounds.lower().to_vec();
    let mut upper = bounds.upper().to_vec();
    let mut hit_lower = vec![false; d];
    let mut hit_upper = vec![false; d];
    for mp in planes {
        let (axis, x) = match mp.plane {
            Hyperplane::Axis { axis, offset } if axis < d => (axis, offset),
            _ => return Err(Error::Mismatch("zero cell of planes needs axis-aligned planes".into())),
        };
        if x >= 0.0 {
            if x < upper[axis] {
                upper[axis] = x;
                hit_upper[axis] = true;
            }
        } else if x > lower[axis] {
            lower[axis] = x;
            hit_lower[axis] = true;
        }
    }
    let clipped = hit_lower.iter().chain(&hit_upper).any(|h| !h);
    Ok((Cuboid::new(lower, upper)?, clipped))
}

/// Zero cell of the Mondrian Poisson hyperplane process `t·Λ` at `t = s`,
/// from the planes hitting `[-half_width, half_width]^d`. Errors if a side
/// of the zero cell is not determined inside that box.
pub fn sample_poisson_zero_cell<R: Rng + ?Sized>(
    phi: &DirectionalDistribution,
    s: f64,
    half_width: f64,
    rng: &mut R,
) -> Result<Cuboid> {
    if !phi.is_mondrian() {
        return Err(Error::Mismatch("the Poisson zero cell sampler needs a Mondrian distribution".into()));
    }
    let bounds = Cuboid::centered_cube(phi.dim(), half_width)?;
    let planes = sample_marked_hyperplanes(&bounds, 0.0, s, phi, rng)?;
    let (cell, clipped) = zero_cell_of_planes(&planes, &bounds)?;
    if clipped {
        return Err(Error::LimitReached(format!(
            "zero cell at time {s} reaches the sampling box of half-width {half_width}"
        )));
    }
    Ok(cell)
}

/// An accepted zero cell together with the round that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingZeroCell {
    pub cell: Cuboid,
    /// The accepted `n`: planes hitting `[-nR, nR]^d` with births in
    /// `(0, 1/n)`.
    pub rounds: usize,
    pub radius: f64,
}

/// Finds a zero cell of the marked Mondrian hyperplane process that
/// strictly contains the closed box `[lower, upper]` (which may be a single
/// point).
///
/// For `n = 2, 3, …` the planes hitting `[-nR, nR]^d` with births in
/// `(0, 1/n)` are sampled, `R` being the largest distance from the origin
/// to a corner of the box (`R = 1` if the box is the origin). A candidate
/// is accepted when it contains the box and none of its sides is a face of
/// the sampling cube, since such a side would be censored.
pub fn enclosing_zero_cell<R: Rng + ?Sized>(
    lower: &[f64],
    upper: &[f64],
    phi: &DirectionalDistribution,
    rng: &mut R,
) -> Result<EnclosingZeroCell> {
    let d = phi.dim();
    if !phi.is_mondrian() {
        return Err(Error::Mismatch("the cut-out construction needs a Mondrian distribution".into()));
    }
    if lower.len() != d || upper.len() != d {
        return Err(Error::Mismatch(format!("region must have dimension {d}")));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
        return Err(Error::InvalidGeometry("region needs finite lower <= upper".into()));
    }
    let r = (0..d)
        .map(|k| lower[k].abs().max(upper[k].abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    let radius = if r > 0.0 { r } else { 1.0 };
    for n in 2..2 + MAX_CUTOUT_ROUNDS {
        let bounds = Cuboid::centered_cube(d, n as f64 * radius)?;
        let planes = sample_marked_hyperplanes(&bounds, 0.0, 1.0 / n as f64, phi, rng)?;
        let (cell, clipped) = zero_cell_of_planes(&planes, &bounds)?;
        let contains = (0..d).all(|k| cell.lower()[k] < lower[k] && upper[k] < cell.upper()[k]);
        if contains && !clipped {
            return Ok(EnclosingZeroCell { cell, rounds: n, radius });
        }
    }
    Err(Error::LimitReached(format!(
        "no enclosing zero cell after {MAX_CUTOUT_ROUNDS} rounds"
    )))
}

/// Result of the cut-out construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoutResult {
    pub window: Cuboid,
    pub zero_cell: EnclosingZeroCell,
    /// The process run inside the zero cell.
    pub inner: EventLog,
    /// Always true: times are measured from the unknown moment the zero
    /// cell was separated, not from time 0 of the whole-space process.
    pub relative_time: bool,
}

impl CutoutResult {
    /// The inner tessellation at relative time `t` intersected with the
    /// window. Cells missing the window's interior are dropped.
    pub fn snapshot(&self, t: f64) -> Result<TessellationSnapshot> {
        let mut snap = snapshot_at(&self.inner, t)?;
        snap.cells.retain_mut(|c| {
            let clipped = c.geometry.as_cuboid().and_then(|g| g.intersection(&self.window));
            match clipped {
                Some(g) => {
                    c.geometry = CellGeometry::Cuboid(g);
                    true
                }
                None => false,
            }
        });
        Ok(snap)
    }
}

/// Embeds `window` in a sampled zero cell of the whole-space process and
/// runs the (L-`G`)(D-Λ) process inside it for `t_run`.
pub fn cutout_construction<R: Rng + ?Sized>(
    window: &Cuboid,
    rule: &LifetimeRule,
    phi: &DirectionalDistribution,
    t_run: f64,
    rng: &mut R,
    caps: Caps,
) -> Result<CutoutResult> {
    rule.validate(window.dim())?;
    if rule.window_only() {
        return Err(Error::InvalidRule(format!("{rule} is only supported in a bounded window")));
    }
    let zero_cell = enclosing_zero_cell(window.lower(), window.upper(), phi, rng)?;
    let mut inner = run_in_window(&CellGeometry::Cuboid(zero_cell.cell.clone()), rule, phi, t_run, rng, caps)?;
    inner.add_note(format!(
        "cut-out: times are relative to the unknown separation time of the zero cell (accepted at n = {})",
        zero_cell.rounds
    ));
    inner.add_note("cut-out: candidates whose sides touch the sampling cube are rejected");
    Ok(CutoutResult {
        window: window.clone(),
        zero_cell,
        inner,
        relative_time: true,
    })
}
