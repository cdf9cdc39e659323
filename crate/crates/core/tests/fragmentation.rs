use celldiv::division::{run_in_window, Caps};
use celldiv::fragmentation::*;
use celldiv::geometry::{Cuboid, DirectionalDistribution, LifetimeRule};
use celldiv::rng::stream;
use celldiv::stats::{chi_square_independence, ks_test, Reference};
use proptest::prelude::*;

#[test]
fn selection_is_proportional_to_mass() {
    let n = 100_000;
    let mut rng = stream(400, 0);
    let start = MassPartition::new(vec![0.7, 0.3]).unwrap();
    let largest = (0..n)
        .filter(|_| frag_step(&mut start.clone(), 0.0, &mut rng).index == 0)
        .count();
    let sigma = (0.7 * 0.3 / n as f64).sqrt();
    assert!((largest as f64 / n as f64 - 0.7).abs() < 4.0 * sigma);
}

#[test]
fn largest_fragment_after_one_jump_has_mean_three_quarters() {
    let n = 100_000;
    let mut rng = stream(401, 0);
    let mean = (0..n).map(|_| run_fragmentation(1, &mut rng).unwrap().state.largest()).sum::<f64>() / n as f64;
    // max(U, 1-U) is uniform on [1/2, 1]: sd sqrt(1/48).
    assert!((mean - 0.75).abs() < 4.0 * (1.0f64 / 48.0).sqrt() / (n as f64).sqrt(), "{mean}");
}

#[test]
fn holding_times_are_exponential_across_runs() {
    let holds: Vec<f64> = (0..10_000)
        .map(|r| run_fragmentation(5, &mut stream(402, r)).unwrap().events[4].holding)
        .collect();
    let res = ks_test(&holds, &Reference::Exponential { rate: 1.0 }).unwrap();
    assert!(res.passed, "{res}");
}

/// The dislocation fraction does not depend on which fragment broke.
#[test]
fn xi_is_independent_of_selected_rank() {
    let mut table = vec![vec![0u64; 5]; 4];
    for r in 0..5000 {
        for e in run_fragmentation(10, &mut stream(403, r)).unwrap().events {
            let bin = (((e.xi - 0.5) * 10.0) as usize).min(4);
            table[e.index.min(3)][bin] += 1;
        }
    }
    let res = chi_square_independence(&table).unwrap();
    assert!(res.passed, "{res}");
}

#[test]
fn geometric_induced_chain_is_conservative() {
    let phi = DirectionalDistribution::mondrian(vec![0.4, 0.6]).unwrap();
    let w = Cuboid::from_sides(&[2.0, 0.5]).unwrap().into();
    let log = run_in_window(&w, &LifetimeRule::volume(2), &phi, 20.0, &mut stream(404, 0), Caps::default()).unwrap();
    let run = induced_chain(&log).unwrap();
    assert_eq!(run.events.len(), log.events().len());
    for (i, e) in run.events.iter().enumerate() {
        assert_eq!(e.fragments, i + 2);
        assert!((e.mass_sum - 1.0).abs() < 1e-12);
        assert!(e.top.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_conserve_mass_and_order(seed in any::<u64>(), n in 1usize..300) {
        let run = run_fragmentation(n, &mut stream(seed, 0)).unwrap();
        prop_assert_eq!(run.state.len(), n + 1);
        for e in &run.events {
            prop_assert!((e.mass_sum - 1.0).abs() < 1e-12);
            prop_assert!(e.xi >= 0.5 && e.xi <= 1.0);
            prop_assert!(e.top.windows(2).all(|w| w[0] >= w[1]));
        }
        let sorted = run.state.sorted();
        prop_assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
    }
}
