//! Event-driven simulation of cell-division processes in a bounded window.
//!
//! Every cell carries an exponential clock with rate `G(z)`, sampled once at
//! its birth. When the clock rings the cell is cut by a hyperplane from the
//! Λ division rule and its two children get fresh clocks. The simulation
//! keeps the pending deaths in a binary heap.

mod cutout;
mod snapshot;
mod whole_space;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::geometry::{
    lifetime_rate, sample_dividing_hyperplane, split_cell, CellGeometry, Cuboid, DirectionalDistribution, Hyperplane,
    LifetimeRule, MAX_RESAMPLE,
};

pub use cutout::{
    cutout_construction, enclosing_zero_cell, sample_poisson_zero_cell, zero_cell_of_planes, CutoutResult, EnclosingZeroCell,
    MAX_CUTOUT_ROUNDS,
};
pub use snapshot::{snapshot_at, TessellationSnapshot};
pub use whole_space::{
    whole_space_window_run, whole_space_zero_cell, WholeSpaceWindowRun, WholeSpaceZeroCell, LAUNCH_FRACTION, MAX_BACKWARD_DEPTH,
};

/// Default for [`Caps::max_events`].
pub const DEFAULT_MAX_EVENTS: usize = 10_000_000;

/// Safety limits for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Caps {
    /// Stop after this many divisions and mark the log truncated.
    pub max_events: usize,
    /// Cells with a smaller volume get no clock and never divide. `0`
    /// disables the check.
    pub min_cell_volume: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_events: DEFAULT_MAX_EVENTS,
            min_cell_volume: 0.0,
        }
    }
}

/// A cell of the trajectory. Ids are assigned in order of birth, the window
/// being cell 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub geometry: CellGeometry,
    pub birth: f64,
    /// Time of division, if it happened before the end of the run.
    pub death: Option<f64>,
    pub parent: Option<usize>,
    /// The dividing hyperplane, present together with `death`.
    pub split: Option<Hyperplane>,
    /// Children on the lower and upper side of `split`.
    pub children: Option<(usize, usize)>,
}

impl Cell {
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && self.death.is_none_or(|d| d > t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionEvent {
    pub time: f64,
    pub parent: usize,
    pub plane: Hyperplane,
    /// `(lower, upper)`: the child with `⟨y,u⟩ ≤ x` comes first.
    pub children: (usize, usize),
}

/// Complete trajectory of a run: the configuration, every division and the
/// cells it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    window: CellGeometry,
    rule: LifetimeRule,
    phi: DirectionalDistribution,
    seed: Option<u64>,
    t_max: f64,
    caps: Caps,
    events: Vec<DivisionEvent>,
    cells: Vec<Cell>,
    truncated: bool,
    notes: Vec<String>,
}

impl EventLog {
    /// Rebuilds a log by replaying `events` from `window`. Fails if the
    /// events are not a valid trajectory (times not increasing, unknown
    /// parents, child ids out of sequence, planes missing the cell).
    #[allow(clippy::too_many_arguments)]
    pub fn from_events(
        window: CellGeometry,
        rule: LifetimeRule,
        phi: DirectionalDistribution,
        seed: Option<u64>,
        t_max: f64,
        caps: Caps,
        events: Vec<DivisionEvent>,
        truncated: bool,
        notes: Vec<String>,
    ) -> Result<Self> {
        let mut log = EventLog {
            cells: vec![root_cell(window.clone())],
            window,
            rule,
            phi,
            seed,
            t_max,
            caps,
            events: Vec::with_capacity(events.len()),
            truncated,
            notes,
        };
        let mut last = 0.0;
        for ev in events {
            if !(ev.time > last && ev.time <= t_max) {
                return Err(Error::InvalidParameter(format!(
                    "event time {} out of order (previous {last}, t_max {t_max})",
                    ev.time
                )));
            }
            let parent = log
                .cells
                .get(ev.parent)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown parent cell {}", ev.parent)))?;
            if !parent.alive_at(ev.time) || parent.death.is_some() {
                return Err(Error::InvalidParameter(format!("cell {} is not alive at {}", ev.parent, ev.time)));
            }
            let next = log.cells.len();
            if ev.children != (next, next + 1) {
                return Err(Error::InvalidParameter(format!(
                    "children {:?} should be ({next}, {})",
                    ev.children,
                    next + 1
                )));
            }
            let (a, b) = split_cell(&parent.geometry, &ev.plane)?;
            log.apply(ev, a, b);
            last = ev.time;
        }
        Ok(log)
    }

    fn apply(&mut self, ev: DivisionEvent, a: CellGeometry, b: CellGeometry) {
        let p = &mut self.cells[ev.parent];
        p.death = Some(ev.time);
        p.split = Some(ev.plane);
        p.children = Some(ev.children);
        for (id, geometry) in [(ev.children.0, a), (ev.children.1, b)] {
            self.cells.push(Cell {
                id,
                geometry,
                birth: ev.time,
                death: None,
                parent: Some(ev.parent),
                split: None,
                children: None,
            });
        }
        self.events.push(ev);
    }

    pub fn window(&self) -> &CellGeometry {
        &self.window
    }

    pub fn rule(&self) -> &LifetimeRule {
        &self.rule
    }

    pub fn phi(&self) -> &DirectionalDistribution {
        &self.phi
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn events(&self) -> &[DivisionEvent] {
        &self.events
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// True when [`Caps::max_events`] stopped the run before `t_max`.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Last time up to which the log is complete: `t_max`, or the time of
    /// the last event when truncated.
    pub fn horizon(&self) -> f64 {
        if self.truncated {
            self.events.last().map_or(0.0, |e| e.time)
        } else {
            self.t_max
        }
    }

    /// Free-form remarks attached to the run.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn add_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Cells alive at the end of the run that never got a clock: `G(z) = 0`
    /// or volume below [`Caps::min_cell_volume`].
    pub fn frozen_cells(&self) -> Vec<usize> {
        self.cells
            .iter()
            .filter(|c| c.death.is_none() && !has_clock(&c.geometry, &self.rule, &self.phi, &self.caps))
            .map(|c| c.id)
            .collect()
    }

    /// Number of cells alive at time `t`.
    pub fn count_at(&self, t: f64) -> usize {
        1 + self.events.iter().take_while(|e| e.time <= t).count()
    }
}

fn root_cell(window: CellGeometry) -> Cell {
    Cell {
        id: 0,
        geometry: window,
        birth: 0.0,
        death: None,
        parent: None,
        split: None,
        children: None,
    }
}

fn has_clock(z: &CellGeometry, rule: &LifetimeRule, phi: &DirectionalDistribution, caps: &Caps) -> bool {
    z.volume() >= caps.min_cell_volume && lifetime_rate(rule, z, phi).is_ok_and(|g| g > 0.0)
}

#[derive(Debug, Clone, Copy)]
struct Clock {
    death: f64,
    id: usize,
}

impl PartialEq for Clock {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Clock {}

impl PartialOrd for Clock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Clock {
    // Reversed so that `BinaryHeap` pops the earliest death.
    fn cmp(&self, other: &Self) -> Ordering {
        other.death.total_cmp(&self.death).then(other.id.cmp(&self.id))
    }
}

/// Normalizes the window for `phi`: atomic distributions act on polygons,
/// so a cuboid window is converted.
fn prepare_window(window: &CellGeometry, phi: &DirectionalDistribution) -> Result<CellGeometry> {
    if window.dim() != phi.dim() {
        return Err(Error::Mismatch(format!(
            "window has dimension {}, distribution has dimension {}",
            window.dim(),
            phi.dim()
        )));
    }
    if !(window.volume() > 0.0) {
        return Err(Error::InvalidGeometry("window has zero volume".into()));
    }
    Ok(match window {
        CellGeometry::Cuboid(_) if !phi.is_mondrian() => CellGeometry::Polygon(window.to_polygon()?),
        _ => window.clone(),
    })
}

/// Runs the (L-`G`)(D-Λ) process started from `{window}` at time 0 up to
/// `t_max`, with `G = rule`.
///
/// With an atomic planar distribution a cuboid window is turned into a
/// polygon. The seed is not known here; [`EventLog::seed`] is `None` until
/// set by [`run_in_window_seeded`].
pub fn run_in_window<R: Rng + ?Sized>(
    window: &CellGeometry,
    rule: &LifetimeRule,
    phi: &DirectionalDistribution,
    t_max: f64,
    rng: &mut R,
    caps: Caps,
) -> Result<EventLog> {
    simulate(window, rule, phi, t_max, rng, caps, None)
}

/// The simulation loop. Cuboid cells whose interior misses `focus` get no
/// clock: their descendants could never meet `focus`, and clocks of
/// different cells are independent.
pub(crate) fn simulate<R: Rng + ?Sized>(
    window: &CellGeometry,
    rule: &LifetimeRule,
    phi: &DirectionalDistribution,
    t_max: f64,
    rng: &mut R,
    caps: Caps,
    focus: Option<&Cuboid>,
) -> Result<EventLog> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_max = {t_max} must be positive and finite")));
    }
    rule.validate(window.dim())?;
    let window = prepare_window(window, phi)?;
    // Surfaces rule/geometry mismatches before the run starts.
    lifetime_rate(rule, &window, phi)?;

    let mut log = EventLog {
        cells: vec![root_cell(window.clone())],
        window,
        rule: *rule,
        phi: phi.clone(),
        seed: None,
        t_max,
        caps,
        events: Vec::new(),
        truncated: false,
        notes: Vec::new(),
    };
    let mut heap = BinaryHeap::new();
    schedule(&log.cells[0], &log, focus, &mut heap, rng)?;

    while let Some(Clock { death, id }) = heap.pop() {
        if death > t_max {
            break;
        }
        if log.events.len() >= caps.max_events {
            log.truncated = true;
            log.add_note(format!("stopped after {} events (max_events)", caps.max_events));
            break;
        }
        let parent = &log.cells[id];
        let (plane, a, b) = divide(&parent.geometry, phi, rng)?;
        let next = log.cells.len();
        log.apply(
            DivisionEvent {
                time: death,
                parent: id,
                plane,
                children: (next, next + 1),
            },
            a,
            b,
        );
        schedule(&log.cells[next], &log, focus, &mut heap, rng)?;
        schedule(&log.cells[next + 1], &log, focus, &mut heap, rng)?;
    }
    Ok(log)
}

/// [`run_in_window`] with the seed recorded in the log. The generator must
/// be the one derived from `seed`.
pub fn run_in_window_seeded<R: Rng + ?Sized>(
    window: &CellGeometry,
    rule: &LifetimeRule,
    phi: &DirectionalDistribution,
    t_max: f64,
    seed: u64,
    rng: &mut R,
    caps: Caps,
) -> Result<EventLog> {
    let mut log = run_in_window(window, rule, phi, t_max, rng, caps)?;
    log.seed = Some(seed);
    Ok(log)
}

fn schedule<R: Rng + ?Sized>(
    cell: &Cell,
    log: &EventLog,
    focus: Option<&Cuboid>,
    heap: &mut BinaryHeap<Clock>,
    rng: &mut R,
) -> Result<()> {
    if cell.geometry.volume() < log.caps.min_cell_volume {
        return Ok(());
    }
    if let (Some(f), CellGeometry::Cuboid(c)) = (focus, &cell.geometry) {
        if f.intersection(c).is_none() {
            return Ok(());
        }
    }
    let g = lifetime_rate(&log.rule, &cell.geometry, &log.phi)?;
    if g > 0.0 {
        let e: f64 = Exp1.sample(rng);
        heap.push(Clock {
            death: cell.birth + e / g,
            id: cell.id,
        });
    }
    Ok(())
}

/// Draws a Λ-distributed hyperplane through `z` and splits along it.
fn divide<R: Rng + ?Sized>(
    z: &CellGeometry,
    phi: &DirectionalDistribution,
    rng: &mut R,
) -> Result<(Hyperplane, CellGeometry, CellGeometry)> {
    for _ in 0..MAX_RESAMPLE {
        let plane = sample_dividing_hyperplane(z, phi, rng)?;
        match split_cell(z, &plane) {
            Ok((a, b)) => return Ok((plane, a, b)),
            Err(Error::SplitMissesInterior) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateCell(format!("no valid split in {MAX_RESAMPLE} attempts")))
}

/// The STIT process: [`run_in_window`] with `G = Λ`.
///
/// STIT is spatially consistent, so the run equals the whole-space STIT
/// tessellation restricted to the window; the log carries a note saying so.
pub fn stit_reference_run<R: Rng + ?Sized>(
    window: &CellGeometry,
    phi: &DirectionalDistribution,
    t_max: f64,
    rng: &mut R,
    caps: Caps,
) -> Result<EventLog> {
    let mut log = run_in_window(window, &LifetimeRule::LambdaMeasure, phi, t_max, rng, caps)?;
    log.add_note("STIT is spatially consistent: this run is the whole-space STIT tessellation restricted to the window");
    Ok(log)
}

/// Splits `z` by a fresh Λ-distributed hyperplane and returns the child that
/// contains `point` (the lower child if `point` lies on the plane).
pub(crate) fn divide_keeping<R: Rng + ?Sized>(
    z: &CellGeometry,
    phi: &DirectionalDistribution,
    point: &[f64],
    rng: &mut R,
) -> Result<CellGeometry> {
    let (plane, a, b) = divide(z, phi, rng)?;
    Ok(if plane.signed_distance(point) <= 0.0 { a } else { b })
}
