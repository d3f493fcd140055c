//! Acceptance suite: one test per shipped guarantee, each printing a
//! single PASS/FAIL line with the measured margin.
//!
//! Tolerances and budgets live in the checks themselves
//! (`localmath::selftest`), so the CLI `selftest` subcommand and this suite
//! can never drift apart.

use localmath::selftest::{
    check_constant_alpha_reduction, check_derivative_oracle, check_field_axioms,
    check_gamma_algebra, check_gauge_invariance, check_geodesic_straight_line, check_group_laws,
    check_integral_oracle, check_norm_transport, check_restriction_validator,
    check_value_table, check_variational_cross, CheckResult, SelftestOptions,
};

const SEED: u64 = 0;

fn report(result: CheckResult) {
    let verdict = if result.passed { "PASS" } else { "FAIL" };
    println!(
        "[{verdict}] {}: {} ({:.2} s)",
        result.name, result.detail, result.seconds
    );
    assert!(result.passed, "{}: {}", result.name, result.detail);
}

#[test]
fn prerequisite_gamma_algebra() {
    report(check_gamma_algebra(&SelftestOptions::default()));
}

#[test]
fn criterion_01_value_table_exactness() {
    report(check_value_table());
}

#[test]
fn criterion_02_map_group_laws() {
    report(check_group_laws(SEED));
}

#[test]
fn criterion_03_axiom_preservation() {
    report(check_field_axioms(SEED));
}

#[test]
fn criterion_04_norm_transport_and_product_gap() {
    report(check_norm_transport(SEED));
}

#[test]
fn criterion_05_reduction_to_standard() {
    report(check_constant_alpha_reduction(SEED));
}

#[test]
fn criterion_06_derivative_oracle() {
    report(check_derivative_oracle());
}

#[test]
fn criterion_07_integral_oracle() {
    report(check_integral_oracle());
}

#[test]
fn criterion_08_gauge_invariance() {
    report(check_gauge_invariance());
}

#[test]
fn criterion_09_geodesic_limit() {
    report(check_geodesic_straight_line());
}

#[test]
fn criterion_10_variational_cross_oracle() {
    report(check_variational_cross());
}

#[test]
fn criterion_11_restriction_validator() {
    report(check_restriction_validator());
}
