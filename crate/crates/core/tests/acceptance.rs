//! The acceptance suite: one test per criterion, each printing its
//! pass/fail line. `strandhf repro` runs the same checks in order.

use strandhf::repro::{self, CriterionReport};

fn run(report: CriterionReport) {
    println!(
        "[{}] criterion {:>2} {:<28} {}",
        if report.pass { "PASS" } else { "FAIL" },
        report.id,
        report.name,
        report.details
    );
    assert!(report.pass, "criterion {} ({}): {}", report.id, report.name, report.details);
}

#[test]
fn criterion_01_torus_algebra() {
    run(repro::criterion_1());
}

#[test]
fn criterion_02_dimension_laws() {
    run(repro::criterion_2());
}

#[test]
fn criterion_03_poincare_polynomials() {
    run(repro::criterion_3());
}

#[test]
fn criterion_04_koszul_symmetry() {
    run(repro::criterion_4());
}

#[test]
fn criterion_05_solid_torus_ext_table() {
    run(repro::criterion_5());
}

#[test]
fn criterion_06_ainfinity_transfer() {
    run(repro::criterion_6());
}

#[test]
fn criterion_07_cfdd_identity_torus() {
    run(repro::criterion_7());
}

#[test]
fn criterion_08_hochschild_cohomology() {
    run(repro::criterion_8());
}

#[test]
fn criterion_09_trefoil_surgery() {
    run(repro::criterion_9());
}

#[test]
fn criterion_10_koszul_checks() {
    run(repro::criterion_10());
}

#[test]
fn criterion_11_bar_model_identities() {
    run(repro::criterion_11());
}

#[test]
fn criterion_12_serre_property() {
    run(repro::criterion_12());
}

#[test]
fn criterion_13_half_identity_automorphism() {
    run(repro::criterion_13());
}

#[test]
fn criterion_14_property_suites() {
    run(repro::criterion_14());
}
