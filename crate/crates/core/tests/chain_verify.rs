//! End-to-end checks of the five-stage reduction chain across instances,
//! including the `a = b` case whose internal zero steps drop terms out of
//! the chain naturally.

mod common;

use monomial_lab::{verify_solution_chain, ChainError, FunctionHandle, Mode, Preset, Scalar};

fn i(n: i64) -> Scalar {
    Scalar::int(n, Mode::Exact)
}

fn steps() -> [Scalar; 5] {
    [i(1), i(2), Scalar::ratio(1, 2, Mode::Exact), i(-1), i(3)]
}

fn samples() -> Vec<(Scalar, Scalar)> {
    vec![
        (i(0), i(0)),
        (i(1), i(2)),
        (i(-3), i(1)),
        (Scalar::ratio(5, 2, Mode::Exact), Scalar::ratio(-1, 3, Mode::Exact)),
    ]
}

#[test]
fn every_preset_solution_passes_all_six_stages() {
    for preset in Preset::ALL {
        let fam = preset.family(Mode::Exact);
        let f = FunctionHandle::monomial(
            Mode::Exact,
            preset.solution_degree(),
            Scalar::ratio(-7, 3, Mode::Exact),
        );
        let report = verify_solution_chain(&fam, &f, &steps(), &samples()).unwrap();
        assert!(report.pass, "{preset}: {report:?}");
        assert_eq!(report.stages.len(), 6);
        for stage in &report.stages {
            assert!(stage.pass, "{preset} stage {}", stage.label);
            assert!(stage.max_abs_residual.is_zero());
        }
        let labels: Vec<&str> = report.stages.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "first_difference",
                "second_difference",
                "third_difference",
                "fourth_difference",
                "fourth_difference_uniform_step",
                "fifth_difference_annihilation",
            ]
        );
    }
}

#[test]
fn sums_of_admissible_monomials_pass_when_they_solve_the_instance() {
    // x^1 also solves the halving instance's chain precondition only if its
    // defect vanishes; for the cubic instance, only x^3 multiples do.
    let fam = Preset::Cubic.family(Mode::Exact);
    let f = FunctionHandle::monomial(Mode::Exact, 3, i(5));
    assert!(verify_solution_chain(&fam, &f, &steps(), &samples()).unwrap().pass);
}

#[test]
fn non_solutions_are_rejected_before_any_stage_runs() {
    let fam = Preset::Cubic.family(Mode::Exact);
    let f = FunctionHandle::monomial(Mode::Exact, 4, i(1));
    match verify_solution_chain(&fam, &f, &steps(), &samples()) {
        Err(ChainError::NotASolution { .. }) => {}
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn float_inputs_are_rejected() {
    let fam = Preset::Cubic.family(Mode::Float);
    let f = FunctionHandle::monomial(Mode::Float, 3, Scalar::float(1.0));
    let hs = [
        Scalar::float(1.0),
        Scalar::float(2.0),
        Scalar::float(0.5),
        Scalar::float(-1.0),
        Scalar::float(3.0),
    ];
    let pts = vec![(Scalar::float(0.0), Scalar::float(0.0))];
    assert!(matches!(
        verify_solution_chain(&fam, &f, &hs, &pts),
        Err(ChainError::FloatModeUnsupported)
    ));
}

#[test]
fn empty_sample_lists_are_rejected() {
    let fam = Preset::Cubic.family(Mode::Exact);
    let f = FunctionHandle::monomial(Mode::Exact, 3, i(1));
    assert!(matches!(
        verify_solution_chain(&fam, &f, &steps(), &[]),
        Err(ChainError::NoSamples)
    ));
}

#[test]
fn zero_function_passes_every_instance() {
    for preset in Preset::ALL {
        let fam = preset.family(Mode::Exact);
        let f = FunctionHandle::zero(Mode::Exact);
        assert!(verify_solution_chain(&fam, &f, &steps(), &samples()).unwrap().pass);
    }
}
