use umbilic_core::acceptance::{self, CriterionResult, Options};

fn report(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_1_horosphere_round_trip() {
    report(acceptance::criterion_1(&Options::default()));
}

#[test]
fn criterion_2_sphere_round_trip() {
    report(acceptance::criterion_2(&Options::default()));
}

#[test]
fn criterion_3_classification_grid() {
    report(acceptance::criterion_3(&Options::default()));
}

#[test]
fn criterion_4_rm_linear_relation() {
    report(acceptance::criterion_4(&Options::default()));
}

#[test]
fn criterion_5_derivative_identity() {
    report(acceptance::criterion_5(&Options::default()));
}

#[test]
fn criterion_6_euclidean_baseline() {
    report(acceptance::criterion_6(&Options::default()));
}

#[test]
fn criterion_7_robustness() {
    report(acceptance::criterion_7(&Options::default()));
}

#[test]
fn criterion_8_full_selftest() {
    let results = acceptance::run_all(&Options::default());
    for r in &results {
        println!("{}", r.line());
    }
    let last = results.last().expect("criterion 8 is always reported").clone();
    report(last);
}
