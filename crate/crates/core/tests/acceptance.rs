//! Acceptance suite: every reproduction check at the canonical seed, one
//! pass/fail line per check (visible with `cargo test -- --nocapture`).

use coarray::repro::{
    check_ambiguity_and_recovery, check_full_rank_waveforms, check_pattern_fidelity,
    check_rank_counterexample, check_rank_equivalence_properties,
    check_rank_revealing_invariance, check_singular_value_profile, check_tradeoff_curves,
    CheckRecord,
};

const SEED: u64 = 0;

fn assert_all_pass(checks: Vec<CheckRecord>) {
    let mut failed = 0usize;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {} | expected: {} | observed: {}",
            c.name, c.expected, c.observed
        );
        if !c.pass {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} of {} checks failed", checks.len());
}

#[test]
fn criterion_1_coarray_and_pattern_fidelity() {
    assert_all_pass(check_pattern_fidelity());
}

#[test]
fn criterion_2_tradeoff_curves() {
    assert_all_pass(check_tradeoff_curves());
}

#[test]
fn criterion_3_singular_value_profile() {
    assert_all_pass(check_singular_value_profile(SEED));
}

#[test]
fn criterion_4_kruskal_rank_counterexample() {
    assert_all_pass(check_rank_counterexample(SEED));
}

#[test]
fn criterion_5_ambiguity_and_exhaustive_recovery() {
    assert_all_pass(check_ambiguity_and_recovery(SEED));
}

#[test]
fn criterion_6_rank_equivalence_property_suite() {
    assert_all_pass(check_rank_equivalence_properties(SEED));
}

#[test]
fn criterion_7_full_waveform_rank_reaches_coarray_size() {
    assert_all_pass(check_full_rank_waveforms(SEED));
}

#[test]
fn criterion_8_rank_revealing_invariance() {
    assert_all_pass(check_rank_revealing_invariance(SEED));
}
