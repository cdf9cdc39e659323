//! The acceptance suite: one check per documented criterion, each reduced
//! to a pass/fail line.
//!
//! Every check derives its generators from `(seed, criterion)` with
//! [`stream`], so the whole suite is reproducible from one seed.

use std::fmt;

use rand::Rng;

use crate::division::{
    run_in_window, run_in_window_seeded, sample_poisson_zero_cell, snapshot_at, stit_reference_run,
    whole_space_window_run, whole_space_zero_cell, Caps,
};
use crate::error::Result;
use crate::fragmentation::{equivalence_check, induced_chain, run_fragmentation, FragmentationRun};
use crate::geometry::{intrinsic_volume, split_cell, CellGeometry, ConvexPolygon2, Cuboid, DirectionalDistribution, Hyperplane, LifetimeRule};
use crate::hyperplane_process::{build_zero_cell_chain, explosion_diagnostic, Verdict};
use crate::io::write_event_log;
use crate::rng::{stream, SimRng};
use crate::stats::{
    cv_report, ks_test, poisson_count_test, scaling_check, scaling_check_with_exponent, typical_cell_samples, GoFResult,
    Reference, DEFAULT_LEVEL,
};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Result of one criterion: an overall verdict and the individual checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// One line of evidence inside an [`Outcome`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn gof(name: impl Into<String>, r: &GoFResult) -> Self {
        Check {
            name: name.into(),
            passed: r.passed,
            detail: format!("statistic={:.5} p={:.4} n={}", r.statistic, r.p_value, r.n),
        }
    }

    fn gof_expect_fail(name: impl Into<String>, r: &GoFResult) -> Self {
        Check {
            name: name.into(),
            passed: !r.passed,
            detail: format!("statistic={:.5} p={:.3e} n={} (must be rejected)", r.statistic, r.p_value, r.n),
        }
    }

    fn value(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl Outcome {
    fn new(id: &str, title: &str, checks: Vec<Check>) -> Self {
        Outcome {
            id: id.into(),
            title: title.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// `criterion <id>: PASS|FAIL <title> [name: detail; …]`.
    pub fn line(&self) -> String {
        let checks = self
            .checks
            .iter()
            .map(|c| format!("{}{}: {}", if c.passed { "" } else { "!" }, c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        format!(
            "criterion {}: {} {} [{checks}]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title
        )
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

fn rng_for(seed: u64, criterion: u64, replicate: u64) -> SimRng {
    stream(seed, (criterion << 32) | replicate)
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target
}

fn unit_square() -> CellGeometry {
    Cuboid::unit(2).expect("unit square").into()
}

fn mondrian2() -> DirectionalDistribution {
    DirectionalDistribution::mondrian_uniform(2).expect("uniform weights")
}

/// Criterion 1: the dislocation law of the abstract chain.
pub fn criterion_1(seed: u64) -> Result<Outcome> {
    let run = run_fragmentation(10_000, &mut rng_for(seed, 1, 0))?;
    let xi: Vec<f64> = run.events.iter().map(|e| e.xi).collect();
    // With total mass 1 the holding times are Exp(1).
    let hold: Vec<f64> = run.events.iter().map(|e| e.holding).collect();
    let a = ks_test(&xi, &Reference::Uniform { low: 0.5, high: 1.0 })?;
    let b = ks_test(&hold, &Reference::Exponential { rate: 1.0 })?;
    Ok(Outcome::new(
        "1",
        "fragmentation dislocation law",
        vec![Check::gof("xi vs U[1/2,1]", &a), Check::gof("holding vs Exp(1)", &b)],
    ))
}

/// Criterion 2: the (L-V_2)(D-Λ) Mondrian process in the unit square induces
/// the abstract fragmentation chain.
pub fn criterion_2(seed: u64) -> Result<Outcome> {
    const JUMPS: usize = 10;
    const REPS: u64 = 10_000;
    let phi = mondrian2();
    let rule = LifetimeRule::volume(2);
    let caps = Caps {
        max_events: JUMPS,
        ..Caps::default()
    };
    let mut geometric = Vec::with_capacity(REPS as usize);
    let mut abstract_runs: Vec<FragmentationRun> = Vec::with_capacity(REPS as usize);
    for r in 0..REPS {
        let log = run_in_window(&unit_square(), &rule, &phi, f64::MAX, &mut rng_for(seed, 2, r), caps)?;
        geometric.push(induced_chain(&log)?);
        abstract_runs.push(run_fragmentation(JUMPS, &mut rng_for(seed, 2, REPS + r))?);
    }
    let checks = equivalence_check(&geometric, &abstract_runs, JUMPS)?
        .iter()
        .map(|r| Check::gof(r.test.split(':').next().unwrap_or(&r.test).to_string(), r))
        .collect();
    Ok(Outcome::new("2", "geometric and abstract fragmentation agree", checks))
}

const T_COUNT: f64 = 50.0;
const REPS_COUNT: u64 = 2000;

fn count_runs(seed: u64) -> Result<Vec<crate::division::TessellationSnapshot>> {
    let phi = mondrian2();
    let rule = LifetimeRule::volume(2);
    (0..REPS_COUNT)
        .map(|r| {
            let log = run_in_window(&unit_square(), &rule, &phi, T_COUNT, &mut rng_for(seed, 3, r), Caps::default())?;
            snapshot_at(&log, T_COUNT)
        })
        .collect()
}

/// Criterion 3: division counts of (L-V_2) in the unit square are Poisson.
pub fn criterion_3(seed: u64) -> Result<Outcome> {
    let counts: Vec<u64> = count_runs(seed)?.iter().map(|s| s.len() as u64 - 1).collect();
    let r = poisson_count_test(&counts, T_COUNT)?.at_level(DEFAULT_LEVEL);
    Ok(Outcome::new(
        "3",
        "Poisson cell counts",
        vec![Check {
            detail: format!("{} ({})", Check::gof("", &r).detail, r.note),
            ..Check::gof("counts-1 vs Poisson(50)", &r)
        }],
    ))
}

/// Erosion margin for the interior cells of criterion 4, close to the
/// typical side length at t = 50.
pub const INTERIOR_MARGIN: f64 = 0.1;

/// Criterion 4: interior cell volumes of the criterion-3 runs against
/// `Exp(50)`, and their CV.
pub fn criterion_4(seed: u64) -> Result<Outcome> {
    let w = unit_square();
    let mut vols = Vec::new();
    for snap in count_runs(seed)? {
        vols.extend(typical_cell_samples(&snap, &w, INTERIOR_MARGIN)?.iter().map(|c| c.geometry.volume()));
    }
    let ks = ks_test(&vols, &Reference::Exponential { rate: T_COUNT })?;
    let cv = cv_report(&vols)?.cv.unwrap_or(f64::NAN);
    Ok(Outcome::new(
        "4",
        "typical-cell volume law in the unit square",
        vec![
            Check::gof("interior volumes vs Exp(50)", &ks),
            Check::value("CV", within(cv, 1.0, 0.1), format!("{cv:.4} (target 1 +- 10%)")),
        ],
    ))
}

/// Supplement to criterion 4: the same law for cells of the whole-space
/// (L-V_2) process seen through `[-1/2, 1/2]^2`, selected by lower corner.
pub fn criterion_4b(seed: u64) -> Result<Outcome> {
    let phi = mondrian2();
    let w = Cuboid::centered_cube(2, 0.5)?;
    let mut vols = Vec::new();
    for r in 0..REPS_COUNT {
        let run = whole_space_window_run(&w, &LifetimeRule::volume(2), &phi, T_COUNT, &mut rng_for(seed, 4, r), Caps::default())?;
        vols.extend(run.typical_cells().iter().map(|c| c.volume()));
    }
    let ks = ks_test(&vols, &Reference::Exponential { rate: T_COUNT })?;
    let cv = cv_report(&vols)?.cv.unwrap_or(f64::NAN);
    Ok(Outcome::new(
        "4b",
        "typical-cell volume law of the whole-space process",
        vec![
            Check::gof("typical volumes vs Exp(50)", &ks),
            Check::value("CV", within(cv, 1.0, 0.1), format!("{cv:.4} (target 1 +- 10%)")),
        ],
    ))
}

/// CVs of the STIT typical cell volume: closed-form samples for d = 2, 3
/// and minus-sampled cells of one in-window run (d = 2).
fn stit_cvs(seed: u64) -> Result<(Vec<(usize, f64)>, f64, usize)> {
    let t = 1.0;
    let mut closed = Vec::new();
    for d in [2usize, 3] {
        let p = 1.0 / d as f64;
        let mut rng = rng_for(seed, 5, d as u64);
        let vols: Vec<f64> = (0..100_000)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let e: f64 = rng.sample(rand_distr::Exp1);
                        e / (p * t)
                    })
                    .product()
            })
            .collect();
        closed.push((d, cv_report(&vols)?.cv.unwrap_or(f64::NAN)));
    }
    let w: CellGeometry = Cuboid::from_sides(&[20.0, 20.0])?.into();
    let log = stit_reference_run(&w, &mondrian2(), 30.0, &mut rng_for(seed, 5, 100), Caps::default())?;
    let snap = snapshot_at(&log, 30.0)?;
    let vols: Vec<f64> = typical_cell_samples(&snap, &w, 2.0)?.iter().map(|c| c.geometry.volume()).collect();
    Ok((closed, cv_report(&vols)?.cv.unwrap_or(f64::NAN), vols.len()))
}

fn stit_outcome(id: &str, title: &str, seed: u64, target: impl Fn(usize) -> f64, label: &str) -> Result<Outcome> {
    let (closed, in_window, n) = stit_cvs(seed)?;
    let mut checks: Vec<Check> = closed
        .into_iter()
        .map(|(d, cv)| {
            let t = target(d);
            Check::value(
                format!("closed form d={d}"),
                within(cv, t, 0.05),
                format!("CV {cv:.4} (target {label} = {t:.4} +- 5%)"),
            )
        })
        .collect();
    let t = target(2);
    checks.push(Check::value(
        "in-window run d=2",
        within(in_window, t, 0.15),
        format!("CV {in_window:.4} over {n} cells (target {label} = {t:.4} +- 15%)"),
    ));
    Ok(Outcome::new(id, title, checks))
}

/// Criterion 5: CV of the STIT typical cell volume against `2^d - 1`.
pub fn criterion_5(seed: u64) -> Result<Outcome> {
    stit_outcome("5", "STIT volume CV", seed, |d| ((1u32 << d) - 1) as f64, "2^d-1")
}

/// Supplement to criterion 5: the same samples against `sqrt(2^d - 1)`,
/// the CV of a product of `d` independent exponential sides.
pub fn criterion_5b(seed: u64) -> Result<Outcome> {
    stit_outcome("5b", "STIT volume CV (square-root form)", seed, |d| (((1u32 << d) - 1) as f64).sqrt(), "sqrt(2^d-1)")
}

/// Criterion 6: jump times of the backward zero-cell chain.
pub fn criterion_6(seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    for d in [2usize, 3] {
        let phi = DirectionalDistribution::mondrian_uniform(d)?;
        let (mut t0, mut ratio) = (Vec::new(), Vec::new());
        for r in 0..10_000 {
            let chain = build_zero_cell_chain(&phi, 2, &mut rng_for(seed, 6, ((d as u64) << 24) | r))?;
            t0.push(chain.time(0));
            ratio.push(chain.time(1) / chain.time(0));
        }
        let k = 2 * d as u32;
        checks.push(Check::gof(format!("t_0 d={d} vs r^{k}"), &ks_test(&t0, &Reference::PowerMax { k })?));
        checks.push(Check::gof(
            format!("t_-1/t_0 d={d} vs r^{k}"),
            &ks_test(&ratio, &Reference::PowerMax { k })?,
        ));
    }
    Ok(Outcome::new("6", "backward zero-cell chain times", checks))
}

/// Criterion 7: the explosion diagnostic separates a convergent clock
/// series from the constant rule.
pub fn criterion_7(seed: u64) -> Result<Outcome> {
    let phi = mondrian2();
    let (mut converging, mut diverging, mut exact) = (0, 0, 0);
    for r in 0..100 {
        let chain = build_zero_cell_chain(&phi, 400, &mut rng_for(seed, 7, r))?;
        if explosion_diagnostic(&chain, &LifetimeRule::SumOfSides)?.verdict == Verdict::Converging {
            converging += 1;
        }
        let c = explosion_diagnostic(&chain, &LifetimeRule::Constant(1.0))?;
        if c.verdict == Verdict::Diverging {
            diverging += 1;
        }
        if c.partial_sums.iter().enumerate().all(|(j, &s)| s == (j + 1) as f64) {
            exact += 1;
        }
    }
    Ok(Outcome::new(
        "7",
        "explosion diagnostic",
        vec![
            Check::value("sum-of-sides converging", converging >= 99, format!("{converging}/100")),
            Check::value("constant diverging", diverging == 100, format!("{diverging}/100")),
            Check::value("constant partial sums = j+1", exact == 100, format!("{exact}/100")),
        ],
    ))
}

/// Criterion 8: zero-cell extents of the Poisson hyperplane process and
/// the time scaling of the (L-V_2) zero cell.
pub fn criterion_8(seed: u64) -> Result<Outcome> {
    let phi = mondrian2();
    let t = 1.0;
    let mut sides = [Vec::new(), Vec::new()];
    for r in 0..10_000 {
        let z = sample_poisson_zero_cell(&phi, t, 60.0, &mut rng_for(seed, 8, r))?;
        for (k, s) in sides.iter_mut().enumerate() {
            s.push(z.side(k));
        }
    }
    let mut checks = Vec::new();
    for (k, s) in sides.iter().enumerate() {
        let rate = 0.5 * t;
        checks.push(Check::gof(
            format!("extent axis {k} vs Gamma(2,{rate})"),
            &ks_test(s, &Reference::Gamma { shape: 2.0, rate })?,
        ));
    }
    let rule = LifetimeRule::volume(2);
    let sampler = |t: f64, rng: &mut SimRng| whole_space_zero_cell(&rule, &phi, t, rng).map(|z| z.cell.volume());
    let mut rng = rng_for(seed, 8, 1 << 31);
    checks.push(Check::gof("t V_2(z_t) scaling, t=1 vs 4", &scaling_check(sampler, 1.0, 4.0, 10_000, &mut rng)?));
    let unscaled = scaling_check_with_exponent(sampler, 1.0, 4.0, 10_000, 0.0, &mut rng)?;
    checks.push(Check::gof_expect_fail("unscaled control", &unscaled));
    Ok(Outcome::new("8", "zero-cell law and scaling", checks))
}

/// `V_n` of a box with sides `s` as the sum over all `n`-subsets of the
/// products of their sides.
fn intrinsic_volume_by_subsets(s: &[f64], n: usize) -> f64 {
    (0u32..1 << s.len())
        .filter(|m| m.count_ones() as usize == n)
        .map(|m| (0..s.len()).filter(|&i| m & (1 << i) != 0).map(|i| s[i]).product::<f64>())
        .sum()
}

/// Criterion 9: oracle identities and reproducibility.
pub fn criterion_9(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 9, 0);
    // Integer sides keep every product and sum exact.
    let mut mismatches = 0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=6);
        let sides: Vec<f64> = (0..d).map(|_| rng.random_range(1..=30) as f64).collect();
        let b = Cuboid::from_sides(&sides)?;
        for n in 1..=d {
            if intrinsic_volume(&b, n)? != intrinsic_volume_by_subsets(&sides, n) {
                mismatches += 1;
            }
        }
    }

    let mut worst: f64 = 0.0;
    for i in 0..1_000_000 {
        let (z, h): (CellGeometry, Hyperplane) = if i % 2 == 0 {
            let d = rng.random_range(1..=4);
            let lower: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
            let upper: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0.01..5.0)).collect();
            let axis = rng.random_range(0..d);
            let x = rng.random_range(lower[axis]..upper[axis]);
            (Cuboid::new(lower, upper)?.into(), Hyperplane::axis(axis, x))
        } else {
            let c = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let k = rng.random_range(3..9);
            let phase: f64 = rng.random_range(0.0..1.0);
            let vs = (0..k)
                .map(|j| {
                    let a = std::f64::consts::TAU * (j as f64 + phase) / k as f64;
                    [c[0] + a.cos(), c[1] + a.sin()]
                })
                .collect();
            let poly = ConvexPolygon2::new(vs)?;
            let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let u = [a.cos(), a.sin()];
            let (lo, hi) = poly.support(u);
            let x = rng.random_range(lo..hi);
            (poly.into(), Hyperplane::line(u, x)?)
        };
        let (a, b) = match split_cell(&z, &h) {
            Ok(p) => p,
            Err(crate::Error::SplitMissesInterior) => continue,
            Err(e) => return Err(e),
        };
        let v = z.volume();
        worst = worst.max((a.volume() + b.volume() - v).abs() / v);
    }

    let rerun = || -> Result<String> {
        let log = run_in_window_seeded(
            &unit_square(),
            &LifetimeRule::LambdaMeasure,
            &mondrian2(),
            10.0,
            seed,
            &mut stream(seed, 0),
            Caps::default(),
        )?;
        Ok(write_event_log(&log))
    };
    let (first, second) = (rerun()?, rerun()?);

    Ok(Outcome::new(
        "9",
        "oracle identities",
        vec![
            Check::value("intrinsic volumes vs subsets", mismatches == 0, format!("{mismatches} mismatches over 1000 boxes")),
            Check::value("split volume conservation", worst <= 1e-9, format!("max relative error {worst:.2e} over 10^6 splits")),
            Check::value(
                "seeded rerun",
                first == second,
                format!("{} bytes, {}", first.len(), if first == second { "identical" } else { "different" }),
            ),
        ],
    ))
}

/// Identifiers accepted by [`run_criterion`], in suite order.
pub const CRITERIA: [&str; 11] = ["1", "2", "3", "4", "4b", "5", "5b", "6", "7", "8", "9"];

pub fn run_criterion(id: &str, seed: u64) -> Result<Outcome> {
    match id {
        "1" => criterion_1(seed),
        "2" => criterion_2(seed),
        "3" => criterion_3(seed),
        "4" => criterion_4(seed),
        "4b" => criterion_4b(seed),
        "5" => criterion_5(seed),
        "5b" => criterion_5b(seed),
        "6" => criterion_6(seed),
        "7" => criterion_7(seed),
        "8" => criterion_8(seed),
        "9" => criterion_9(seed),
        _ => Err(crate::Error::InvalidParameter(format!("unknown criterion {id:?}"))),
    }
}
