//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with its
//! measurements, then asserts. Criterion 10 is a long-running stretch goal
//! and is ignored by default:
//! `cargo test -p cubical --test acceptance -- --ignored --nocapture`.

use cubical::reproduce::{run, CriterionResult, DEFAULT_SEED, STRETCH};

fn check(id: u32) {
    let r: CriterionResult = run(id, DEFAULT_SEED);
    println!("{}", r.line());
    assert!(r.passed, "criterion {id} failed: {}", r.detail);
    assert!(
        r.elapsed <= r.limit,
        "criterion {id} took {:?}, limit {:?}",
        r.elapsed,
        r.limit
    );
}

#[test]
fn criterion_01_path_witness_images_and_distances() {
    check(1);
}

#[test]
fn criterion_02_path_layered_labellings_force_distance_four() {
    check(2);
}

#[test]
fn criterion_03_tree_layered_labellings_force_four_single_labels() {
    check(3);
}

#[test]
fn criterion_04_induced_tree_witness() {
    check(4);
}

#[test]
fn criterion_05_k4_construction_counts_girth_certificate() {
    check(5);
}

#[test]
fn criterion_06_k6_construction_girth_and_staged_distances() {
    check(6);
}

#[test]
fn criterion_07_induced_k6_construction() {
    check(7);
}

#[test]
fn criterion_08_property_suite() {
    check(8);
}

#[test]
fn criterion_09_known_answers() {
    check(9);
}

#[test]
#[ignore = "stretch goal: direct exact refutation on the k = 4 construction"]
fn criterion_10_direct_refutation_stretch() {
    check(STRETCH);
}

#[test]
fn sampling_seed_only_changes_samples() {
    let a = run(8, 7);
    assert!(a.passed, "{}", a.detail);
    assert!(a.detail.contains("seed 7"));
}
