use approx::assert_relative_eq;
use celldiv::geometry::*;
use celldiv::rng::stream;
use proptest::prelude::*;

/// `V_n` as the sum over all `n`-subsets of sides of their products.
fn subsets_oracle(sides: &[f64], n: usize) -> f64 {
    let d = sides.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << d) {
        if mask.count_ones() as usize == n {
            total += (0..d).filter(|i| mask >> i & 1 == 1).map(|i| sides[i]).product::<f64>();
        }
    }
    total
}

fn cuboid_strategy() -> impl Strategy<Value = Cuboid> {
    (1usize..=4)
        .prop_flat_map(|d| (prop::collection::vec(-50.0..50.0f64, d), prop::collection::vec(0.01..20.0f64, d)))
        .prop_map(|(lo, len)| {
            let hi = lo.iter().zip(&len).map(|(l, s)| l + s).collect();
            Cuboid::new(lo, hi).unwrap()
        })
}

fn polygon_strategy() -> impl Strategy<Value = ConvexPolygon2> {
    (3usize..10, -5.0..5.0f64, -5.0..5.0f64, 0.1..4.0f64, 0.0..1.0f64).prop_map(|(k, cx, cy, r, phase)| {
        let vs = (0..k)
            .map(|j| {
                let a = std::f64::consts::TAU * (j as f64 + phase) / k as f64;
                [cx + r * a.cos(), cy + r * a.sin()]
            })
            .collect();
        ConvexPolygon2::new(vs).unwrap()
    })
}

proptest! {
    #[test]
    fn intrinsic_volume_matches_subset_enumeration(sides in prop::collection::vec(1u32..40, 1..=7)) {
        let s: Vec<f64> = sides.iter().map(|&x| x as f64).collect();
        let b = Cuboid::from_sides(&s).unwrap();
        for n in 1..=s.len() {
            prop_assert_eq!(intrinsic_volume(&b, n).unwrap(), subsets_oracle(&s, n));
        }
    }

    #[test]
    fn cuboid_split_conserves_volume_and_sides(b in cuboid_strategy(), axis_seed in 0usize..100, frac in 0.01..0.99f64) {
        let axis = axis_seed % b.dim();
        let x = b.lower()[axis] + frac * b.side(axis);
        let (l, r) = split_cell(&b.clone().into(), &Hyperplane::axis(axis, x)).unwrap();
        let (l, r) = (l.as_cuboid().unwrap().clone(), r.as_cuboid().unwrap().clone());
        assert_relative_eq!(l.volume() + r.volume(), b.volume(), max_relative = 1e-9);
        for k in 0..b.dim() {
            if k == axis {
                assert_relative_eq!(l.side(k) + r.side(k), b.side(k), max_relative = 1e-12);
            } else {
                prop_assert_eq!(l.side(k), b.side(k));
                prop_assert_eq!(r.side(k), b.side(k));
            }
        }
    }

    #[test]
    fn polygon_split_conserves_area(p in polygon_strategy(), angle in 0.0..std::f64::consts::TAU, frac in 0.01..0.99f64) {
        let u = [angle.cos(), angle.sin()];
        let (lo, hi) = p.support(u);
        let h = Hyperplane::line(u, lo + frac * (hi - lo)).unwrap();
        match split_cell(&p.clone().into(), &h) {
            Ok((a, b)) => assert_relative_eq!(a.volume() + b.volume(), p.area(), max_relative = 1e-9),
            Err(celldiv::Error::SplitMissesInterior) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn hit_rate_is_translation_invariant_and_homogeneous(b in cuboid_strategy(), shift in prop::collection::vec(-100.0..100.0f64, 4), c in 0.1..10.0f64) {
        let phi = DirectionalDistribution::mondrian_uniform(b.dim()).unwrap();
        let base = lambda_hit_rate(&b.clone().into(), &phi).unwrap();
        let moved = lambda_hit_rate(&b.translated(&shift[..b.dim()]).into(), &phi).unwrap();
        assert_relative_eq!(base, moved, max_relative = 1e-9);
        let scaled = lambda_hit_rate(&b.scaled(c).into(), &phi).unwrap();
        assert_relative_eq!(scaled, c * base, max_relative = 1e-9);
    }

    #[test]
    fn hit_rate_is_monotone_under_inclusion(b in cuboid_strategy(), frac in 0.05..1.0f64) {
        let phi = DirectionalDistribution::mondrian_uniform(b.dim()).unwrap();
        let inner = Cuboid::new(
            b.lower().to_vec(),
            b.lower().iter().zip(b.upper()).map(|(l, u)| l + frac * (u - l)).collect(),
        ).unwrap();
        prop_assert!(lambda_hit_rate(&inner.into(), &phi).unwrap() <= lambda_hit_rate(&b.into(), &phi).unwrap());
    }

    #[test]
    fn polygon_hit_rate_is_monotone_for_atoms(p in polygon_strategy(), frac in 0.05..1.0f64) {
        let phi = DirectionalDistribution::isotropic_grid(7).unwrap();
        let u = [0.3f64.cos(), 0.3f64.sin()];
        let (lo, hi) = p.support(u);
        if let Some(q) = p.clip_below(u, lo + frac * (hi - lo)) {
            prop_assert!(lambda_hit_rate(&q.into(), &phi).unwrap() <= lambda_hit_rate(&p.into(), &phi).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn uniform_mondrian_lambda_is_sum_of_sides_over_d(b in cuboid_strategy()) {
        let d = b.dim();
        let phi = DirectionalDistribution::mondrian_uniform(d).unwrap();
        let g: CellGeometry = b.into();
        let lam = lifetime_rate(&LifetimeRule::LambdaMeasure, &g, &phi).unwrap();
        let s = lifetime_rate(&LifetimeRule::SumOfSides, &g, &phi).unwrap();
        assert_relative_eq!(lam, s / d as f64, max_relative = 1e-14);
    }
}

#[test]
fn unit_cube_hit_rate_and_sides_example() {
    let phi3 = DirectionalDistribution::mondrian_uniform(3).unwrap();
    assert_relative_eq!(lambda_hit_rate(&Cuboid::unit(3).unwrap().into(), &phi3).unwrap(), 1.0, max_relative = 1e-15);
    let phi2 = DirectionalDistribution::mondrian_uniform(2).unwrap();
    assert_eq!(lambda_hit_rate(&Cuboid::from_sides(&[2.0, 3.0]).unwrap().into(), &phi2).unwrap(), 2.5);
}

/// 10^5 dividing planes on the box (2,3): axis 1 has probability 3/5.
#[test]
fn dividing_axis_frequency_follows_widths() {
    let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
    let z: CellGeometry = Cuboid::from_sides(&[2.0, 3.0]).unwrap().into();
    let mut rng = stream(11, 0);
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| matches!(sample_dividing_hyperplane(&z, &phi, &mut rng).unwrap(), Hyperplane::Axis { axis: 1, .. }))
        .count();
    let p = 0.6;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((hits as f64 / n as f64 - p).abs() < 4.0 * sigma, "frequency {}", hits as f64 / n as f64);
}

/// Offsets on the unit square are uniform on (0,1).
#[test]
fn dividing_offset_is_uniform() {
    let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
    let z: CellGeometry = Cuboid::unit(2).unwrap().into();
    let mut rng = stream(12, 0);
    let offsets: Vec<f64> = (0..20_000).map(|_| sample_dividing_hyperplane(&z, &phi, &mut rng).unwrap().offset()).collect();
    let r = celldiv::stats::ks_test(&offsets, &celldiv::stats::Reference::Uniform { low: 0.0, high: 1.0 }).unwrap();
    assert!(r.passed, "{r}");
}
