use celldiv::division::*;
use celldiv::geometry::*;
use celldiv::rng::stream;
use celldiv::stats::*;
use rand::Rng;

fn unit_square() -> CellGeometry {
    Cuboid::unit(2).unwrap().into()
}

fn mondrian2() -> DirectionalDistribution {
    DirectionalDistribution::mondrian_uniform(2).unwrap()
}

fn final_count(window: &CellGeometry, rule: &LifetimeRule, phi: &DirectionalDistribution, t: f64, seed: u64, r: u64) -> u64 {
    let log = run_in_window(window, rule, phi, t, &mut stream(seed, r), Caps::default()).unwrap();
    log.count_at(t) as u64
}

/// Constant rate 1 per cell is a Yule process: N(1) is geometric with
/// success probability e^{-1}, checked against a direct birth-process
/// simulation and the closed-form mean.
#[test]
fn constant_rule_counts_are_yule() {
    let rule = LifetimeRule::Constant(1.0);
    let n = 4000;
    let geo: Vec<f64> = (0..n).map(|r| final_count(&unit_square(), &rule, &mondrian2(), 1.0, 200, r) as f64).collect();
    let oracle: Vec<f64> = (0..n)
        .map(|r| {
            let mut rng = stream(201, r);
            let (mut k, mut t) = (1u64, 0.0);
            loop {
                let e: f64 = rng.sample(rand_distr::Exp1);
                t += e / k as f64;
                if t > 1.0 {
                    return k as f64;
                }
                k += 1;
            }
        })
        .collect();
    let mean = geo.iter().sum::<f64>() / n as f64 - 1.0;
    let e = std::f64::consts::E;
    let sd = (e * e - e).sqrt() / (n as f64).sqrt();
    assert!((mean - (e - 1.0)).abs() < 4.0 * sd, "mean {mean}");
    let r = ks_two_sample(&geo, &oracle).unwrap();
    assert!(r.passed, "{r}");
}

/// For the volume rule in the unit interval the divisions form a Poisson
/// process of intensity t, so #cells - 1 ~ Poisson(t).
#[test]
fn volume_rule_counts_are_poisson_in_one_dimension() {
    let w: CellGeometry = Cuboid::unit(1).unwrap().into();
    let phi = DirectionalDistribution::mondrian(vec![1.0]).unwrap();
    let counts: Vec<u64> = (0..2000).map(|r| final_count(&w, &LifetimeRule::volume(1), &phi, 30.0, 202, r) - 1).collect();
    let res = poisson_count_test(&counts, 30.0).unwrap();
    assert!(res.passed, "{res}");
}

/// In d = 1 with p = 1 every rule with G = length consumes the same
/// random numbers, so the logs coincide.
#[test]
fn one_dimensional_stit_is_the_volume_rule() {
    let w: CellGeometry = Cuboid::from_sides(&[3.0]).unwrap().into();
    let phi = DirectionalDistribution::mondrian(vec![1.0]).unwrap();
    for r in 0..20 {
        let a = run_in_window(&w, &LifetimeRule::LambdaMeasure, &phi, 4.0, &mut stream(203, r), Caps::default()).unwrap();
        let b = run_in_window(&w, &LifetimeRule::volume(1), &phi, 4.0, &mut stream(203, r), Caps::default()).unwrap();
        assert_eq!(a.events(), b.events());
    }
}

/// With p_k = 1/d, Λ = S/d, so STIT at time t has the law of the
/// sum-of-sides process at time t/d.
#[test]
fn stit_is_time_scaled_sum_of_sides() {
    let (t, n) = (6.0, 2000);
    let stit: Vec<f64> = (0..n).map(|r| final_count(&unit_square(), &LifetimeRule::LambdaMeasure, &mondrian2(), t, 204, r) as f64).collect();
    let sos: Vec<f64> = (0..n).map(|r| final_count(&unit_square(), &LifetimeRule::SumOfSides, &mondrian2(), t / 2.0, 205, r) as f64).collect();
    let res = ks_two_sample(&stit, &sos).unwrap();
    assert!(res.passed, "{res}");
    let wrong: Vec<f64> = (0..n).map(|r| final_count(&unit_square(), &LifetimeRule::SumOfSides, &mondrian2(), t, 206, r) as f64).collect();
    assert!(!ks_two_sample(&stit, &wrong).unwrap().passed);
}

/// Restarting from the snapshot at s with fresh clocks gives the same law
/// at s + Δ as continuing the run.
#[test]
fn restart_from_snapshot_has_the_same_law() {
    let (s, dt, n) = (2.0, 2.0, 1500);
    let rule = LifetimeRule::SumOfSides;
    let phi = mondrian2();
    let cont: Vec<f64> = (0..n).map(|r| final_count(&unit_square(), &rule, &phi, s + dt, 207, r) as f64).collect();
    let restarted: Vec<f64> = (0..n)
        .map(|r| {
            let mut rng = stream(208, r);
            let log = run_in_window(&unit_square(), &rule, &phi, s, &mut rng, Caps::default()).unwrap();
            let snap = snapshot_at(&log, s).unwrap();
            snap.cells
                .iter()
                .map(|c| run_in_window(&c.geometry, &rule, &phi, dt, &mut rng, Caps::default()).unwrap().count_at(dt) as f64)
                .sum()
        })
        .collect();
    let res = ks_two_sample(&cont, &restarted).unwrap();
    assert!(res.passed, "{res}");
}

/// With a constant rule c the count chain is a pure birth process with
/// rate c·#cells. Runs stop after a fixed number of events so that no
/// interval is censored by the horizon.
#[test]
fn constant_rule_inter_jump_times() {
    let c = 2.0;
    let rule = LifetimeRule::Constant(c);
    let caps = Caps { max_events: 20, ..Caps::default() };
    let mut scaled = Vec::new();
    for r in 0..300 {
        let log = run_in_window(&unit_square(), &rule, &mondrian2(), f64::MAX, &mut stream(209, r), caps).unwrap();
        assert_eq!(log.events().len(), 20);
        let mut prev = 0.0;
        for (i, e) in log.events().iter().enumerate() {
            scaled.push((e.time - prev) * c * (i + 1) as f64);
            prev = e.time;
        }
    }
    let res = ks_test(&scaled, &Reference::Exponential { rate: 1.0 }).unwrap();
    assert!(res.passed, "{res}");
}

/// Sides of interior STIT cells in direction k are Exp(p_k t). Cells of
/// one realization are dependent, so the sample pools many small windows.
#[test]
fn stit_typical_sides_are_exponential() {
    let t = 8.0;
    let phi = DirectionalDistribution::mondrian(vec![0.25, 0.75]).unwrap();
    let w: CellGeometry = Cuboid::from_sides(&[6.0, 6.0]).unwrap().into();
    let mut sides = [Vec::new(), Vec::new()];
    for r in 0..1500 {
        let log = stit_reference_run(&w, &phi, t, &mut stream(210, r), Caps::default()).unwrap();
        let snap = snapshot_at(&log, t).unwrap();
        for c in typical_cell_samples(&snap, &w, 2.5).unwrap() {
            let b = c.geometry.as_cuboid().unwrap();
            sides[0].push(b.side(0));
            sides[1].push(b.side(1));
        }
    }
    for (k, p) in [(0, 0.25), (1, 0.75)] {
        let res = ks_test(&sides[k], &Reference::Exponential { rate: p * t }).unwrap();
        assert!(res.passed, "axis {k}: {res}");
    }
}

#[test]
fn snapshots_tile_refine_and_conserve_volume() {
    let phi = DirectionalDistribution::isotropic_grid(6).unwrap();
    let w = unit_square();
    let log = run_in_window(&w, &LifetimeRule::LambdaMeasure, &phi, 12.0, &mut stream(211, 0), Caps::default()).unwrap();
    let wp: CellGeometry = w.to_polygon().unwrap().into();
    let mut rng = stream(211, 1);
    let mut times: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..12.0)).collect();
    times.sort_by(f64::total_cmp);
    let mut prev = snapshot_at(&log, 0.0).unwrap();
    assert_eq!(prev.len(), 1);
    for t in times {
        let snap = snapshot_at(&log, t).unwrap();
        snap.check_tiling(&wp).unwrap();
        assert!((snap.total_volume() - 1.0).abs() < 1e-9);
        assert!(snap.refines(&prev, &log));
        prev = snap;
    }
}

#[test]
fn seeded_runs_are_bit_identical() {
    let w = unit_square();
    let run = || run_in_window_seeded(&w, &LifetimeRule::volume(2), &mondrian2(), 30.0, 42, &mut stream(42, 0), Caps::default()).unwrap();
    assert_eq!(run(), run());
}

/// The Poisson zero cell never touches the sampling box and its extents
/// are Gamma(2, p_k s).
#[test]
fn cutout_zero_cells() {
    let phi = DirectionalDistribution::mondrian(vec![0.3, 0.7]).unwrap();
    let mut rng = stream(212, 0);
    for _ in 0..200 {
        let z = enclosing_zero_cell(&[0.0, 0.0], &[0.0, 0.0], &phi, &mut rng).unwrap();
        assert!(z.cell.contains_point_strictly(&[0.0, 0.0]));
        let r = z.radius * z.rounds as f64;
        assert!(z.cell.lower().iter().chain(z.cell.upper()).all(|x| x.abs() < r));
    }
    let s = 2.0;
    let cells: Vec<Cuboid> = (0..5000).map(|_| sample_poisson_zero_cell(&phi, s, 60.0, &mut rng).unwrap()).collect();
    for (k, p) in [(0, 0.3), (1, 0.7)] {
        let sides: Vec<f64> = cells.iter().map(|c| c.side(k)).collect();
        let res = ks_test(&sides, &Reference::Gamma { shape: 2.0, rate: p * s }).unwrap();
        assert!(res.passed, "axis {k}: {res}");
    }
}

/// The zero cell of the whole-space volume-rule process at time t has a
/// Gamma(2, t) volume.
#[test]
fn whole_space_zero_cell_volume() {
    let phi = mondrian2();
    for t in [0.5, 3.0] {
        let v: Vec<f64> = (0..3000)
            .map(|r| whole_space_zero_cell(&LifetimeRule::volume(2), &phi, t, &mut stream(213, r)).unwrap().cell.volume())
            .collect();
        let res = ks_test(&v, &Reference::Gamma { shape: 2.0, rate: t }).unwrap();
        assert!(res.passed, "t = {t}: {res}");
    }
}

#[test]
fn cutout_run_covers_the_window() {
    let w = Cuboid::new(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap();
    let res = cutout_construction(&w, &LifetimeRule::SumOfSides, &mondrian2(), 3.0, &mut stream(214, 0), Caps::default()).unwrap();
    assert!(res.relative_time);
    let snap = res.snapshot(3.0).unwrap();
    snap.check_tiling(&w.clone().into()).unwrap();
}
