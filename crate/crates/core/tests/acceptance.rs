//! The acceptance suite. Each test prints one line:
//! `criterion <id>: PASS|FAIL <title> [checks]`.
//!
//! Run with `cargo test -p celldiv --test acceptance -- --nocapture`.

use celldiv::acceptance::{run_criterion, DEFAULT_SEED};

fn check(id: &str) {
    let outcome = run_criterion(id, DEFAULT_SEED).unwrap_or_else(|e| panic!("criterion {id}: error {e}"));
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_dislocation_law() {
    check("1");
}

#[test]
fn criterion_2_geometric_fragmentation_equivalence() {
    check("2");
}

#[test]
fn criterion_3_poisson_cell_counts() {
    check("3");
}

#[test]
fn criterion_4_typical_cell_volume_law() {
    check("4");
}

#[test]
fn criterion_4b_whole_space_typical_cell_volume_law() {
    check("4b");
}

#[test]
fn criterion_5_stit_cv() {
    check("5");
}

#[test]
fn criterion_5b_stit_cv_square_root_form() {
    check("5b");
}

#[test]
fn criterion_6_backward_chain_times() {
    check("6");
}

#[test]
fn criterion_7_explosion_diagnostic() {
    check("7");
}

#[test]
fn criterion_8_zero_cell_law_and_scaling() {
    check("8");
}

#[test]
fn criterion_9_oracle_identities() {
    check("9");
}
