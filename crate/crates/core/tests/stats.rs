use celldiv::division::{run_in_window, snapshot_at, Caps};
use celldiv::geometry::{CellGeometry, Cuboid, DirectionalDistribution, LifetimeRule};
use celldiv::rng::stream;
use celldiv::stats::*;
use rand::Rng;
use rand_distr::{Distribution, Exp};

/// Under the null the KS p-value is uniform: 200 tests of 10^4 Exp(2)
/// draws reject at level 0.05 about 5% of the time.
#[test]
fn ks_is_calibrated() {
    let reps = 200;
    let exp = Exp::new(2.0).unwrap();
    let mut rejected = 0;
    let mut ps = Vec::with_capacity(reps);
    for r in 0..reps {
        let mut rng = stream(100, r as u64);
        let xs: Vec<f64> = (0..10_000).map(|_| exp.sample(&mut rng)).collect();
        let res = ks_test(&xs, &Reference::Exponential { rate: 2.0 }).unwrap();
        if res.p_value <= 0.05 {
            rejected += 1;
        }
        ps.push(res.p_value);
    }
    let rate = rejected as f64 / reps as f64;
    let sigma = (0.05 * 0.95 / reps as f64).sqrt();
    assert!((rate - 0.05).abs() <= 4.0 * sigma, "rejection rate {rate}");
    let uniform = ks_test(&ps, &Reference::Uniform { low: 0.0, high: 1.0 }).unwrap();
    assert!(uniform.p_value > 0.001, "{uniform}");
}

#[test]
fn two_sample_ks_is_calibrated_in_the_mean() {
    let exp = Exp::new(1.0).unwrap();
    let mut rejected = 0;
    for r in 0..200 {
        let mut rng = stream(101, r);
        let a: Vec<f64> = (0..2000).map(|_| exp.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..3000).map(|_| exp.sample(&mut rng)).collect();
        if ks_two_sample(&a, &b).unwrap().p_value <= 0.05 {
            rejected += 1;
        }
    }
    // The asymptotic two-sample p-value is slightly conservative.
    assert!(rejected <= 22, "{rejected}/200 rejected");
}

#[test]
fn tests_are_deterministic() {
    let mut rng = stream(102, 0);
    let xs: Vec<f64> = (0..500).map(|_| rng.random()).collect();
    let counts: Vec<u64> = (0..300).map(|_| rng.random_range(0..10)).collect();
    let r = Reference::Uniform { low: 0.0, high: 1.0 };
    assert_eq!(ks_test(&xs, &r).unwrap(), ks_test(&xs, &r).unwrap());
    assert_eq!(poisson_count_test(&counts, 4.5).unwrap(), poisson_count_test(&counts, 4.5).unwrap());
    assert_eq!(cv_report(&xs).unwrap(), cv_report(&xs).unwrap());
}

/// Yule process counts at time 1 are geometric with mean e and so
/// over-dispersed relative to Poisson(e-1).
#[test]
fn yule_counts_fail_the_poisson_test() {
    let counts: Vec<u64> = (0..2000)
        .map(|r| {
            let mut rng = stream(103, r);
            let (mut n, mut t) = (1u64, 0.0);
            loop {
                let e: f64 = rng.sample(rand_distr::Exp1);
                t += e / n as f64;
                if t > 1.0 {
                    return n - 1;
                }
                n += 1;
            }
        })
        .collect();
    let res = poisson_count_test(&counts, std::f64::consts::E - 1.0).unwrap();
    assert!(!res.passed, "{res}");
}

/// d = 1 interval splitting with G = length is a Poisson process of
/// intensity t; minus-sampled cell lengths have mean 1/t.
#[test]
fn minus_sampling_is_unbiased_in_one_dimension() {
    let t = 5.0;
    let w: CellGeometry = Cuboid::from_sides(&[20.0]).unwrap().into();
    let phi = DirectionalDistribution::mondrian(vec![1.0]).unwrap();
    let mut lengths = Vec::new();
    for r in 0..200 {
        let log = run_in_window(&w, &LifetimeRule::volume(1), &phi, t, &mut stream(104, r), Caps::default()).unwrap();
        let snap = snapshot_at(&log, t).unwrap();
        lengths.extend(typical_cell_samples(&snap, &w, 1.0).unwrap().iter().map(|c| c.geometry.volume()));
    }
    let n = lengths.len();
    let mean = lengths.iter().sum::<f64>() / n as f64;
    let mut rng = stream(104, 1 << 20);
    let boots: Vec<f64> = (0..500)
        .map(|_| (0..n).map(|_| lengths[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let bm = boots.iter().sum::<f64>() / boots.len() as f64;
    let se = (boots.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (boots.len() - 1) as f64).sqrt();
    assert!((mean - 1.0 / t).abs() < 3.0 * se, "mean {mean}, se {se}");
    let ks = ks_test(&lengths, &Reference::Exponential { rate: t }).unwrap();
    assert!(ks.passed, "{ks}");
}

#[test]
fn exponential_and_stit_cv() {
    let mut rng = stream(105, 0);
    let exp = Exp::new(3.0).unwrap();
    let xs: Vec<f64> = (0..100_000).map(|_| exp.sample(&mut rng)).collect();
    let cv = cv_report(&xs).unwrap().cv.unwrap();
    assert!((cv - 1.0).abs() < 0.05, "{cv}");

    // Product of Exp(p_k t) sides: Var/E^2 = 2^d - 1.
    let (a, b) = (Exp::new(0.5).unwrap(), Exp::new(0.5).unwrap());
    let vs: Vec<f64> = (0..100_000).map(|_| a.sample(&mut rng) * b.sample(&mut rng)).collect();
    let s = cv_report(&vs).unwrap();
    let cv2 = s.cv.unwrap().powi(2);
    assert!((cv2 - 3.0).abs() < 0.3, "squared CV {cv2}");
    assert!(s.cv_se.unwrap() > 0.0);
}

#[test]
fn independence_test_detects_dependence() {
    let mut rng = stream(106, 0);
    let mut indep = vec![vec![0u64; 3]; 3];
    let mut dep = vec![vec![0u64; 3]; 3];
    for _ in 0..5000 {
        let (i, j) = (rng.random_range(0..3), rng.random_range(0..3));
        indep[i][j] += 1;
        let k = if rng.random::<f64>() < 0.3 { i } else { rng.random_range(0..3) };
        dep[i][k] += 1;
    }
    assert!(chi_square_independence(&indep).unwrap().p_value > 0.001);
    assert!(!chi_square_independence(&dep).unwrap().passed);
}

#[test]
fn scaling_with_equal_times_passes() {
    let exp = Exp::new(1.0).unwrap();
    let r = scaling_check(|t, rng: &mut celldiv::rng::SimRng| Ok(exp.sample(rng) / t), 2.0, 2.0, 1000, &mut stream(107, 0)).unwrap();
    assert!(r.passed, "{r}");
}
