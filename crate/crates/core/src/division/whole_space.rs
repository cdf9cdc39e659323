use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{divide_keeping, simulate, Caps, EventLog};
use crate::error::{Error, Result};
use crate::geometry::{lifetime_rate, CellGeometry, Cuboid, DirectionalDistribution, LifetimeRule};
use crate::hyperplane_process::build_zero_cell_chain;

/// Largest backward chain [`whole_space_zero_cell`] builds before giving up.
pub const MAX_BACKWARD_DEPTH: usize = 1 << 16;

const INITIAL_DEPTH: usize = 64;
/// The backward chain is deep enough once `1/G` of its last cell is below
/// this fraction of the target time.
const TAIL_TOLERANCE: f64 = 1e-13;
const MAX_FORWARD_STEPS: usize = 10_000_000;

/// The zero cell of the whole-space (L-`G`)(D-Λ) process at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct WholeSpaceZeroCell {
    pub cell: Cuboid,
    /// Index `i` of the cell in the zero-cell sequence: `i ≤ 0` for cells
    /// of the backward chain, `i > 0` for cells reached by dividing
    /// `z̃_(0)` forward in time.
    pub index: i64,
    /// Number of backward cells used to approximate the clock series.
    pub backward_depth: usize,
}

/// Samples `z^o_t` for the Mondrian distribution `phi` by time-changing the
/// backward zero-cell chain.
///
/// The chain `z̃_(0) ⊂ z̃_(-1) ⊂ …` gets holding times `τ'_i / G(z̃_(i))`
/// with i.i.d. `Exp(1)` variables `τ'_i`, and `z^o_t = z̃_(i)` on
/// `[τ_i, τ_{i+1})` where `τ_i` sums the holding times of all deeper cells.
/// The series is truncated once a cell's mean holding time falls below
/// `1e-13·t`; chains that do not get there within
/// [`MAX_BACKWARD_DEPTH`] cells are reported as exploding. If `t` lies past
/// the end of `z̃_(0)`'s holding time, the cell keeps dividing by the Λ rule
/// and the child containing the origin is followed.
pub fn whole_space_zero_cell<R: Rng + ?Sized>(
    rule: &LifetimeRule,
    phi: &DirectionalDistribution,
    t: f64,
    rng: &mut R,
) -> Result<WholeSpaceZeroCell> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t} must be positive and finite")));
    }
    rule.validate(phi.dim())?;
    if rule.window_only() {
        return Err(Error::InvalidRule(format!("{rule} is only supported in a bounded window")));
    }
    let mut chain = build_zero_cell_chain(phi, INITIAL_DEPTH, rng)?;
    let mut holds: Vec<f64> = Vec::new();
    loop {
        for b in &chain.boxes()[holds.len()..] {
            let g = lifetime_rate(rule, &CellGeometry::Cuboid(b.clone()), phi)?;
            let e: f64 = Exp1.sample(rng);
            holds.push(e / g);
        }
        let last = chain.boxes().last().expect("chain is non-empty");
        let g_last = lifetime_rate(rule, &CellGeometry::Cuboid(last.clone()), phi)?;
        if 1.0 / g_last < TAIL_TOLERANCE * t {
            break;
        }
        if chain.depth() >= MAX_BACKWARD_DEPTH {
            return Err(Error::LimitReached(format!(
                "clock series of {rule} not converged after {MAX_BACKWARD_DEPTH} zero cells"
            )));
        }
        chain.grow(2 * chain.depth(), rng)?;
    }

    // start[j] = τ_{-j}; the deepest cell starts at 0 (its tail is dropped).
    let depth = chain.depth();
    let mut start = vec![0.0; depth];
    for j in (0..depth - 1).rev() {
        start[j] = start[j + 1] + holds[j + 1];
    }
    if let Some(j) = (0..depth).find(|&j| start[j] <= t && t < start[j] + holds[j]) {
        return Ok(WholeSpaceZeroCell {
            cell: chain.boxes()[j].clone(),
            index: -(j as i64),
            backward_depth: depth,
        });
    }

    let origin = vec![0.0; phi.dim()];
    let mut cell = CellGeometry::Cuboid(chain.boxes()[0].clone());
    let mut now = start[0] + holds[0];
    for i in 1..=MAX_FORWARD_STEPS {
        cell = divide_keeping(&cell, phi, &origin, rng)?;
        let g = lifetime_rate(rule, &cell, phi)?;
        let e: f64 = Exp1.sample(rng);
        let hold = if g > 0.0 { e / g } else { f64::INFINITY };
        if t < now + hold {
            return Ok(WholeSpaceZeroCell {
                cell: cell.as_cuboid().expect("Mondrian cells are cuboids").clone(),
                index: i as i64,
                backward_depth: depth,
            });
        }
        now += hold;
    }
    Err(Error::LimitReached(format!(
        "zero cell still dividing after {MAX_FORWARD_STEPS} forward steps"
    )))
}

/// Launch time of [`whole_space_window_run`] as a fraction of the target
/// time.
pub const LAUNCH_FRACTION: f64 = 1e-6;

const MAX_LAUNCH_ATTEMPTS: usize = 100;

/// The whole-space process seen through a window, built from the zero cell
/// at an early time.
#[derive(Debug, Clone, PartialEq)]
pub struct WholeSpaceWindowRun {
    pub window: Cuboid,
    /// `z^o_s` at the launch time `s`; it strictly contains the window.
    pub launch_cell: Cuboid,
    pub launch_time: f64,
    /// The process inside `launch_cell`, with times counted from the
    /// launch. Cells that never meet the window are left undivided.
    pub inner: EventLog,
}

impl WholeSpaceWindowRun {
    /// Complete cells of `T_t` whose lower corner lies in the window. For
    /// the stationary whole-space tessellation this selects cells with
    /// equal weight, i.e. samples of the typical cell.
    pub fn typical_cells(&self) -> Vec<&Cuboid> {
        let end = self.inner.t_max();
        self.inner
            .cells()
            .iter()
            .filter(|c| c.alive_at(end))
            .filter_map(|c| c.geometry.as_cuboid())
            .filter(|c| self.window.contains_point(c.lower()))
            .collect()
    }
}

/// Samples the cells of the whole-space (L-`G`)(D-Λ) process `T_t` that
/// meet `window`.
///
/// The zero cell `z^o_s` at `s = LAUNCH_FRACTION · t` is drawn with
/// [`whole_space_zero_cell`]; by the Markov property the process inside it
/// from time `s` on is an ordinary in-window run. A zero cell that does not
/// strictly contain the window is redrawn, which conditions on the window
/// not being cut before `s`; keep the window around the origin so that
/// this event is negligible.
pub fn whole_space_window_run<R: Rng + ?Sized>(
    window: &Cuboid,
    rule: &LifetimeRule,
    phi: &DirectionalDistribution,
    t: f64,
    rng: &mut R,
    caps: Caps,
) -> Result<WholeSpaceWindowRun> {
    let s = LAUNCH_FRACTION * t;
    for attempt in 0..MAX_LAUNCH_ATTEMPTS {
        let z = whole_space_zero_cell(rule, phi, s, rng)?;
        let d = window.dim();
        if !(0..d).all(|k| z.cell.lower()[k] < window.lower()[k] && window.upper()[k] < z.cell.upper()[k]) {
            continue;
        }
        let mut inner = simulate(&CellGeometry::Cuboid(z.cell.clone()), rule, phi, t - s, rng, caps, Some(window))?;
        inner.add_note(format!("whole-space run: launched in z^o_s at s = {s}; times are relative to s"));
        if attempt > 0 {
            inner.add_note(format!("zero cell redrawn {attempt} times to contain the window"));
        }
        return Ok(WholeSpaceWindowRun {
            window: window.clone(),
            launch_cell: z.cell,
            launch_time: s,
            inner,
        });
    }
    Err(Error::LimitReached(format!(
        "zero cell at s = {s} missed the window {MAX_LAUNCH_ATTEMPTS} times"
    )))
}
