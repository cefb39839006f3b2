//! Coefficient-level verification that the preset instances are solved by
//! exactly their advertised monomial degree, using an independent symbolic
//! expansion, plus cross-checks tying that expansion to the evaluator.

mod common;

use common::{monomial_defect_poly, rat, unwrap_exact};
use monomial_lab::{FunctionHandle, Mode, Preset, Scalar};
use proptest::prelude::*;

#[test]
fn preset_solution_degrees_annihilate_the_defect_symbolically() {
    for preset in Preset::ALL {
        let fam = preset.family(Mode::Exact);
        let d = preset.solution_degree();
        assert!(
            monomial_defect_poly(&fam, d).is_zero(),
            "{preset}: degree {d} must solve the instance"
        );
        for wrong in 1..=4u32 {
            if wrong == d {
                continue;
            }
            assert!(
                !monomial_defect_poly(&fam, wrong).is_zero(),
                "{preset}: degree {wrong} must not solve the instance"
            );
        }
    }
}

#[test]
fn evaluator_defect_matches_the_symbolic_expansion_pointwise() {
    let points = [rat(-3, 2), rat(-1, 1), rat(0, 1), rat(1, 3), rat(2, 1)];
    for preset in Preset::ALL {
        let fam = preset.family(Mode::Exact);
        for d in 1..=4u32 {
            let poly = monomial_defect_poly(&fam, d);
            let f = FunctionHandle::monomial(Mode::Exact, d, Scalar::one(Mode::Exact));
            for x in &points {
                for y in &points {
                    let via_eval = fam
                        .defect(&f, &Scalar::exact(x.clone()), &Scalar::exact(y.clone()))
                        .unwrap();
                    assert_eq!(unwrap_exact(&via_eval), poly.eval(x, y), "{preset} d={d}");
                }
            }
        }
    }
}

proptest! {
    // The defect is linear in the function argument.
    #[test]
    fn defect_is_linear_in_the_function(
        cf in proptest::collection::vec(-20i64..=20, 1..=5),
        cg in proptest::collection::vec(-20i64..=20, 1..=5),
        xp in -12i64..=12,
        yp in -12i64..=12,
    ) {
        let fam = Preset::Cubic.family(Mode::Exact);
        let to_coeffs = |v: &[i64]| -> Vec<Scalar> {
            v.iter().map(|&n| Scalar::int(n, Mode::Exact)).collect()
        };
        let f = FunctionHandle::poly(Mode::Exact, &to_coeffs(&cf));
        let g = FunctionHandle::poly(Mode::Exact, &to_coeffs(&cg));
        let x = Scalar::ratio(xp, 4, Mode::Exact);
        let y = Scalar::ratio(yp, 4, Mode::Exact);
        let sum = fam.defect(&f.add(&g), &x, &y).unwrap();
        let split = &fam.defect(&f, &x, &y).unwrap() + &fam.defect(&g, &x, &y).unwrap();
        prop_assert_eq!(sum, split);
    }
}
