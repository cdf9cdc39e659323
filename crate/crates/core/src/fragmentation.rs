//! The mass-partition chain of the volume-weighted process in a window.
//!
//! With `G = V_d` and a window of volume 1, the sorted cell volumes of the
//! in-window process form a self-similar fragmentation chain with index 1:
//! the state is held for an `Exp(1)` time, a fragment is picked with
//! probability equal to its mass, and it breaks into `U·m` and `(1-U)·m`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::division::{EventLog, TessellationSnapshot};
use crate::error::{Error, Result};
use crate::geometry::{lifetime_rate, LifetimeRule};
use crate::stats::{ks_two_sample, GoFResult};

/// Number of largest masses recorded with each event.
pub const TOP_MASSES: usize = 5;

/// A finite collection of positive masses. Stored in insertion order;
/// [`MassPartition::sorted`] gives the descending state.
#[derive(Debug, Clone, PartialEq)]
pub struct MassPartition {
    masses: Vec<f64>,
}

impl MassPartition {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidParameter("masses must be positive and finite".into()));
        }
        Ok(MassPartition { masses })
    }

    /// The single fragment `(1)`.
    pub fn unit() -> Self {
        MassPartition { masses: vec![1.0] }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Masses in descending order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.masses.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn largest(&self) -> f64 {
        self.masses.iter().copied().fold(0.0, f64::max)
    }

    fn top(&self) -> Vec<f64> {
        let mut v = self.sorted();
        v.truncate(TOP_MASSES);
        v
    }

    /// Position of `masses[i]` in the descending order (ties broken by
    /// storage position).
    fn rank(&self, i: usize) -> usize {
        let m = self.masses[i];
        self.masses
            .iter()
            .enumerate()
            .filter(|&(j, &x)| x > m || (x == m && j < i))
            .count()
    }

    /// Replaces fragment `i` by `larger` and `smaller`.
    fn split(&mut self, i: usize, larger: f64, smaller: f64) {
        self.masses[i] = larger;
        self.masses.push(smaller);
    }
}

/// One jump of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FragEvent {
    pub time: f64,
    /// Time since the previous jump.
    pub holding: f64,
    /// Rank of the broken fragment in the descending state before the jump
    /// (0 is the largest).
    pub index: usize,
    pub parent_mass: f64,
    /// Fraction going to the first child.
    pub u: f64,
    /// `max(u, 1-u)`.
    pub xi: f64,
    /// Number of fragments after the jump.
    pub fragments: usize,
    /// Total mass after the jump.
    pub mass_sum: f64,
    /// Up to [`TOP_MASSES`] largest masses after the jump.
    pub top: Vec<f64>,
}

/// Splits `parent` into the fractions `(u, 1-u)`, returned as
/// `(larger, smaller)` with `larger + smaller == parent` exactly.
fn dislocate(parent: f64, u: f64) -> (f64, f64) {
    let xi = u.max(1.0 - u);
    let larger = (xi * parent).min(parent);
    // Exact by Sterbenz's lemma, since larger >= parent/2.
    (larger, parent - larger)
}

/// One step from `state` at time `now`: an `Exp(total)` holding time, a
/// fragment picked with probability proportional to its mass, and a split
/// by an independent uniform fraction.
pub fn frag_step<R: Rng + ?Sized>(state: &mut MassPartition, now: f64, rng: &mut R) -> FragEvent {
    let total = state.total();
    let e: f64 = Exp1.sample(rng);
    let holding = e / total;
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut i = state.len() - 1;
    for (j, &m) in state.masses.iter().enumerate() {
        acc += m;
        if target < acc {
            i = j;
            break;
        }
    }
    let index = state.rank(i);
    let parent_mass = state.masses[i];
    let u: f64 = rng.random();
    let (larger, smaller) = dislocate(parent_mass, u);
    state.split(i, larger, smaller);
    FragEvent {
        time: now + holding,
        holding,
        index,
        parent_mass,
        u,
        xi: u.max(1.0 - u),
        fragments: state.len(),
        mass_sum: state.total(),
        top: state.top(),
    }
}

/// A sequence of jumps and the final state, from either the abstract chain
/// or a geometric run.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentationRun {
    pub events: Vec<FragEvent>,
    pub state: MassPartition,
    pub notes: Vec<String>,
}

/// `n_jumps` steps of the chain started from `(1)` at time 0.
pub fn run_fragmentation<R: Rng + ?Sized>(n_jumps: usize, rng: &mut R) -> Result<FragmentationRun> {
    if n_jumps == 0 {
        return Err(Error::InvalidParameter("need at least one jump".into()));
    }
    let mut state = MassPartition::unit();
    let mut events = Vec::with_capacity(n_jumps);
    let mut now = 0.0;
    for _ in 0..n_jumps {
        let ev = frag_step(&mut state, now, rng);
        now = ev.time;
        events.push(ev);
    }
    Ok(FragmentationRun {
        events,
        state,
        notes: Vec::new(),
    })
}

/// The mass-partition chain induced by a geometric run: masses are cell
/// volumes divided by the window volume and times are multiplied by the
/// window volume, which turns a window of any size into the unit-mass
/// chain (self-similarity with index 1).
pub fn induced_chain(log: &EventLog) -> Result<FragmentationRun> {
    let dim = log.window().dim();
    let mut notes = Vec::new();
    if *log.rule() != LifetimeRule::volume(dim) {
        notes.push(format!(
            "rule {} is not the volume rule; the induced chain is not the fragmentation chain",
            log.rule()
        ));
    }
    let wv = log.window().volume();
    if wv != 1.0 {
        notes.push(format!("window volume {wv}: masses divided and times multiplied by it"));
    }
    let cells = log.cells();
    let mut state = MassPartition::unit();
    // slot[cell id] = position of that cell's mass in `state`.
    let mut slot = vec![usize::MAX; cells.len()];
    slot[0] = 0;
    let mut events = Vec::with_capacity(log.events().len());
    let mut prev = 0.0;
    for ev in log.events() {
        let i = slot[ev.parent];
        let index = state.rank(i);
        let parent_mass = state.masses[i];
        let va = cells[ev.children.0].geometry.volume();
        let vb = cells[ev.children.1].geometry.volume();
        let u = va / (va + vb);
        let (larger, smaller) = dislocate(parent_mass, u);
        state.split(i, larger, smaller);
        let n = state.len() - 1;
        if va >= vb {
            slot[ev.children.0] = i;
            slot[ev.children.1] = n;
        } else {
            slot[ev.children.0] = n;
            slot[ev.children.1] = i;
        }
        let time = ev.time * wv;
        events.push(FragEvent {
            time,
            holding: time - prev,
            index,
            parent_mass,
            u,
            xi: u.max(1.0 - u),
            fragments: state.len(),
            mass_sum: state.total(),
            top: state.top(),
        });
        prev = time;
    }
    Ok(FragmentationRun { events, state, notes })
}

/// `G`-values of the cells of a snapshot divided by `G(window)`, the state
/// of the induced process for a general rule. Only for `G = V_d` do they
/// add up to 1.
pub fn g_partition(snapshot: &TessellationSnapshot, log: &EventLog) -> Result<MassPartition> {
    let gw = lifetime_rate(log.rule(), log.window(), log.phi())?;
    let masses = snapshot
        .cells
        .iter()
        .map(|c| lifetime_rate(log.rule(), &c.geometry, log.phi()).map(|g| g / gw))
        .collect::<Result<Vec<_>>>()?;
    MassPartition::new(masses)
}

/// Compares geometric and abstract chains over their first `n_jumps`
/// jumps with three two-sample KS tests: dislocation fractions `ξ`,
/// holding times, and the largest mass after `n_jumps` jumps.
pub fn equivalence_check(
    geometric: &[FragmentationRun],
    abstract_runs: &[FragmentationRun],
    n_jumps: usize,
) -> Result<Vec<GoFResult>> {
    let collect = |runs: &[FragmentationRun], what: &str| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let (mut xi, mut hold, mut top) = (Vec::new(), Vec::new(), Vec::new());
        for r in runs {
            if r.events.len() < n_jumps {
                return Err(Error::InvalidParameter(format!(
                    "{what} run has {} jumps, need {n_jumps}",
                    r.events.len()
                )));
            }
            for e in &r.events[..n_jumps] {
                xi.push(e.xi);
                hold.push(e.holding);
            }
            top.push(r.events[n_jumps - 1].top[0]);
        }
        Ok((xi, hold, top))
    };
    let (gx, gh, gt) = collect(geometric, "geometric")?;
    let (ax, ah, at) = collect(abstract_runs, "abstract")?;
    let label = |mut r: GoFResult, name: &str| {
        r.test = format!("{name}: geometric vs abstract (two-sample KS)");
        r
    };
    Ok(vec![
        label(ks_two_sample(&gx, &ax)?, "dislocation xi"),
        label(ks_two_sample(&gh, &ah)?, "holding times"),
        label(ks_two_sample(&gt, &at)?, &format!("largest mass after {n_jumps} jumps")),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::division::{run_in_window, snapshot_at, Caps};
    use crate::geometry::{CellGeometry, Cuboid, DirectionalDistribution};
    use crate::rng::stream;

    #[test]
    fn one_step_from_unit() {
        let mut s = MassPartition::unit();
        let ev = frag_step(&mut s, 0.0, &mut stream(1, 0));
        let v = s.sorted();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0] + v[1], 1.0);
        assert_eq!(v[0], ev.xi.min(1.0));
        assert!(ev.xi >= 0.5 && ev.xi <= 1.0);
        assert_eq!(ev.index, 0);
        assert_eq!(ev.top, v);
    }

    #[test]
    fn conservation_and_order() {
        let run = run_fragmentation(500, &mut stream(2, 0)).unwrap();
        assert_eq!(run.state.len(), 501);
        assert!((run.state.total() - 1.0).abs() < 1e-12);
        for e in &run.events {
            assert!(e.top.windows(2).all(|w| w[0] >= w[1]));
        }
        assert!(run.events.windows(2).all(|w| w[0].time < w[1].time));
        assert!(run_fragmentation(0, &mut stream(2, 0)).is_err());
    }

    #[test]
    fn dislocation_is_exact() {
        for &(m, u) in &[(1.0, 0.3), (0.1, 0.999_999), (3.7e-5, 0.5), (0.77, 1e-17)] {
            let (a, b) = dislocate(m, u);
            assert_eq!(a + b, m);
            assert!(a >= b);
        }
    }

    #[test]
    fn single_split_log_maps_to_child_volumes() {
        let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
        let w: CellGeometry = Cuboid::unit(2).unwrap().into();
        let caps = Caps { max_events: 1, ..Caps::default() };
        let log = run_in_window(&w, &LifetimeRule::volume(2), &phi, 1e9, &mut stream(3, 0), caps).unwrap();
        let run = induced_chain(&log).unwrap();
        assert_eq!(run.events.len(), 1);
        let mut vols: Vec<f64> = log.cells()[1..].iter().map(|c| c.geometry.volume()).collect();
        vols.sort_by(|a, b| b.total_cmp(a));
        let got = run.state.sorted();
        assert!((got[0] - vols[0]).abs() < 1e-15 && (got[1] - vols[1]).abs() < 1e-15);
        assert!(run.notes.is_empty());
    }

    #[test]
    fn scaled_window_is_normalized() {
        let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
        let w: CellGeometry = Cuboid::from_sides(&[2.0, 3.0]).unwrap().into();
        let log = run_in_window(&w, &LifetimeRule::volume(2), &phi, 5.0, &mut stream(4, 0), Caps::default()).unwrap();
        let run = induced_chain(&log).unwrap();
        assert!((run.state.total() - 1.0).abs() < 1e-12);
        assert_eq!(run.notes.len(), 1);
    }

    #[test]
    fn sum_of_sides_is_not_conservative() {
        let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
        let w: CellGeometry = Cuboid::unit(2).unwrap().into();
        let caps = Caps { max_events: 1, ..Caps::default() };
        let log = run_in_window(&w, &LifetimeRule::SumOfSides, &phi, 1e9, &mut stream(5, 0), caps).unwrap();
        let snap = snapshot_at(&log, log.horizon()).unwrap();
        assert!(g_partition(&snap, &log).unwrap().total() > 1.0);
        assert!(!induced_chain(&log).unwrap().notes.is_empty());
    }
}
