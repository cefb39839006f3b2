//! Difference operators, the degree probe, and the exact reduction-chain
//! verifier.
//!
//! The forward difference is `(delta_h f)(x) = f(x+h) - f(x)`. Its iterates
//! expand as alternating binomial sums; compositions with distinct steps
//! commute. Five successive differences annihilate every solution of a valid
//! family instance, and the verifier below checks each stage of that
//! reduction as an exact two-sided identity.

use crate::equation::EquationFamily;
use crate::function::{EvalError, FunctionHandle};
use crate::scalar::{lattice_rational, Mode, Scalar};
use num::bigint::BigInt;
use num::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A composed difference operator: either an explicit step list (applied
/// left to right) or the `n`-th iterate of a single step. An empty step
/// list is the identity operator.
#[derive(Debug, Clone, PartialEq)]
pub enum DifferenceSpec {
    Steps(Vec<Scalar>),
    Iterate { h: Scalar, n: u32 },
}

impl DifferenceSpec {
    /// The explicit step list this spec denotes.
    pub fn steps(&self) -> Vec<Scalar> {
        match self {
            DifferenceSpec::Steps(s) => s.clone(),
            DifferenceSpec::Iterate { h, n } => vec![h.clone(); *n as usize],
        }
    }
}

/// The single forward difference `x -> f(x+h) - f(x)` as a new handle.
pub fn delta(f: &FunctionHandle, h: &Scalar) -> FunctionHandle {
    assert_eq!(f.mode(), h.mode(), "step mode differs from the function's mode");
    let f = f.clone();
    let h = h.clone();
    FunctionHandle::new(f.mode(), move |x| Ok(&f.eval(&(x + &h))? - &f.eval(x)?))
}

/// Exact binomial coefficient `C(n, k)`.
fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for j in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Binomial coefficients are always computed in exact integer arithmetic;
/// float mode converts once at the end.
fn binomial_scalar(n: u32, k: u32, mode: Mode) -> Scalar {
    let b = binomial(n, k);
    match mode {
        Mode::Exact => Scalar::exact(num::rational::BigRational::from_integer(b)),
        Mode::Float => Scalar::float(b.to_f64().expect("binomial fits in f64")),
    }
}

/// Evaluates the `n`-th iterate and also reports the largest `|f|` sampled
/// by the sum, the magnitude scale for tolerance tests.
fn iterate_with_scale(
    f: &FunctionHandle,
    h: &Scalar,
    n: u32,
    x: &Scalar,
) -> Result<(Scalar, f64), EvalError> {
    let mode = f.mode();
    let mut acc = Scalar::zero(mode);
    let mut max_abs_f: f64 = 0.0;
    let mut point = x.clone();
    for k in 0..=n {
        let v = f.eval(&point)?;
        max_abs_f = max_abs_f.max(v.to_f64().abs());
        let mut term = &binomial_scalar(n, k, mode) * &v;
        if (n - k) % 2 == 1 {
            term = -term;
        }
        acc = &acc + &term;
        point = &point + h;
    }
    Ok((acc, max_abs_f))
}

/// The `n`-th iterate at a point, by the alternating binomial sum
/// `sum_{k=0..n} (-1)^(n-k) C(n,k) f(x + k h)`.
pub fn delta_iter(
    f: &FunctionHandle,
    h: &Scalar,
    n: u32,
    x: &Scalar,
) -> Result<Scalar, EvalError> {
    iterate_with_scale(f, h, n, x).map(|(v, _)| v)
}

/// The composed operator `delta_{h_m} ... delta_{h_1} f` at `x`, expanded
/// over step subsets: `sum_S (-1)^(m-|S|) f(x + sum_{i in S} h_i)`.
pub fn delta_chain(
    f: &FunctionHandle,
    spec: &DifferenceSpec,
    x: &Scalar,
) -> Result<Scalar, EvalError> {
    let steps = spec.steps();
    let m = steps.len();
    assert!(m <= 24, "difference chain too long for subset expansion");
    let mode = f.mode();
    let mut acc = Scalar::zero(mode);
    for mask in 0u32..(1u32 << m) {
        let mut point = x.clone();
        for (i, h) in steps.iter().enumerate() {
            if mask & (1 << i) != 0 {
                point = &point + h;
            }
        }
        let v = f.eval(&point)?;
        if (m as u32 - mask.count_ones()).is_multiple_of(2) {
            acc = &acc + &v;
        } else {
            acc = &acc - &v;
        }
    }
    Ok(acc)
}

/// Outcome of the degree probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GpProbeResult {
    /// `n`-fold differences vanish on every sample but (n-1)-fold ones do
    /// not: the function behaves as a generalized polynomial of this degree.
    Degree(u32),
    /// No iterate up to `max_n` annihilates the function on the samples.
    NotGp,
}

/// Estimates the generalized-polynomial degree of `f` by finding the
/// smallest `n <= max_n` whose `n`-fold difference is zero (within
/// `tol * scale`, `scale = max(1, max sampled |f|)`) on `trials` seeded
/// random points; the degree is then `n - 1`.
///
/// Steps are drawn from the lattice `k/64, k in 16..=256` (so `h` lies in
/// `[1/4, 4]`), points from `k/64, k in -256..=256`; the generator is fully
/// determined by `seed`.
pub fn gp_degree_probe(
    f: &FunctionHandle,
    max_n: u32,
    trials: u32,
    tol: f64,
    seed: u64,
) -> Result<GpProbeResult, EvalError> {
    assert!(max_n >= 1, "probe needs max_n >= 1");
    assert!(trials >= 1, "probe needs at least one trial");
    let mode = f.mode();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=max_n {
        let mut all_vanish = true;
        for _ in 0..trials {
            let x = lattice_rational(&mut rng, -256, 256, 64, mode);
            let h = lattice_rational(&mut rng, 16, 256, 64, mode);
            let (v, max_abs_f) = iterate_with_scale(f, &h, n, &x)?;
            let scale = max_abs_f.max(1.0);
            if v.abs().to_f64() > tol * scale {
                all_vanish = false;
                break;
            }
        }
        if all_vanish {
            return Ok(GpProbeResult::Degree(n - 1));
        }
    }
    Ok(GpProbeResult::NotGp)
}

/// One verified stage of the reduction chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStage {
    pub label: String,
    pub max_abs_residual: Scalar,
    pub pass: bool,
}

/// Full record of the chain verification: per-stage residuals over the
/// sample points, the steps used, and the overall verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub steps: Vec<Scalar>,
    pub samples: Vec<(Scalar, Scalar)>,
    pub stages: Vec<ChainStage>,
    pub pass: bool,
    pub note: String,
}

/// Errors from the chain verifier.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("the chain verifier runs in exact mode only")]
    FloatModeUnsupported,
    #[error("no sample points supplied")]
    NoSamples,
    #[error("defect is nonzero at ({x}, {y}); the function does not solve the instance")]
    NotASolution { x: Box<Scalar>, y: Box<Scalar> },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One additive term of a stage identity: `coeff * (chain at px*x + py*y)`.
struct StageTerm {
    coeff: Scalar,
    steps: Vec<Scalar>,
    px: Scalar,
    py: Scalar,
}

/// Verifies, in exact arithmetic, the five-stage difference reduction that
/// annihilates every solution of the instance.
///
/// Each stage is an independent two-sided identity evaluated verbatim at
/// every sample; a true solution leaves residual exactly zero at every
/// stage. The fourth stage is checked in two forms (the step `h4` either
/// joins `h3` or replaces it throughout); both vanish for solutions. The
/// final stage is the single-variable five-fold difference.
///
/// Fails fast with [`ChainError::NotASolution`] when the defect is nonzero
/// at any sample shifted by any subset-sum of the steps.
pub fn verify_solution_chain(
    family: &EquationFamily,
    f: &FunctionHandle,
    steps: &[Scalar; 5],
    samples: &[(Scalar, Scalar)],
) -> Result<ChainReport, ChainError> {
    if family.mode() == Mode::Float || f.mode() == Mode::Float {
        return Err(ChainError::FloatModeUnsupported);
    }
    if samples.is_empty() {
        return Err(ChainError::NoSamples);
    }
    for h in steps {
        assert_eq!(h.mode(), Mode::Exact, "chain steps must be exact scalars");
    }

    // Gate: the defect must vanish on the samples and on their shifts by
    // every subset-sum of the steps (the points the stage identities touch).
    for (x, y) in samples {
        for mask in 0u32..(1 << 5) {
            let mut t = Scalar::zero(Mode::Exact);
            for (i, h) in steps.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    t = &t + h;
                }
            }
            let (sx, sy) = (x + &t, y + &t);
            if !family.defect(f, &sx, &sy)?.is_zero() {
                return Err(ChainError::NotASolution { x: Box::new(sx), y: Box::new(sy) });
            }
        }
    }

    let one = Scalar::one(Mode::Exact);
    let zero = Scalar::zero(Mode::Exact);
    let two = Scalar::int(2, Mode::Exact);
    let (a, b) = (family.a().clone(), family.b().clone());
    let amb = &a - &b;
    let apb = &a + &b;
    let two_ab = &(&two * &a) * &b;
    let [h1, h2, h3, h4, h5] = steps.clone();
    let c = |i| family.c(i).clone();

    // Stage construction mirrors the sequence of substitutions that peel
    // terms off the instance one difference at a time:
    //   1. shift (x,y) by (h1,-h1): the x+y term drops.
    //   2. shift by (h2,h2): the x-y term drops.
    //   3. shift by (b*h3,-a*h3): the ax+by term drops.
    //   4. shift by (-b*h4,-a*h4): the ax-by term drops, leaving a
    //      two-term identity equal to zero.
    //   5. a final step in x alone annihilates f.
    // A coincident pair a = b makes the (a-b)h step zero; its chain is then
    // identically zero and the stage still reads correctly.
    let stages: Vec<(&str, Vec<StageTerm>)> = vec![
        (
            "first_difference",
            vec![
                term(c(1), vec![&amb * &h1], &a, &b),
                term(c(2), vec![&apb * &h1], &a, &(-&b)),
                term(-c(3), vec![h1.clone()], &one, &zero),
                term(-c(4), vec![-&h1], &zero, &one),
                term(-c(6), vec![&two * &h1], &one, &(-&one)),
            ],
        ),
        (
            "second_difference",
            vec![
                term(c(1), vec![&amb * &h1, &apb * &h2], &a, &b),
                term(c(2), vec![&apb * &h1, &amb * &h2], &a, &(-&b)),
                term(-c(3), vec![h1.clone(), h2.clone()], &one, &zero),
                term(-c(4), vec![-&h1, h2.clone()], &zero, &one),
            ],
        ),
        (
            "third_difference",
            vec![
                term(c(2), vec![&apb * &h1, &amb * &h2, &two_ab * &h3], &a, &(-&b)),
                term(-c(3), vec![h1.clone(), h2.clone(), &b * &h3], &one, &zero),
                term(-c(4), vec![-&h1, h2.clone(), -&(&a * &h3)], &zero, &one),
            ],
        ),
        (
            "fourth_difference",
            vec![
                term(c(3), vec![h1.clone(), h2.clone(), &b * &h3, -&(&b * &h4)], &one, &zero),
                term(
                    c(4),
                    vec![-&h1, h2.clone(), -&(&a * &h3), -&(&a * &h4)],
                    &zero,
                    &one,
                ),
            ],
        ),
        (
            "fourth_difference_uniform_step",
            vec![
                term(c(3), vec![h1.clone(), h2.clone(), &b * &h4, -&(&b * &h4)], &one, &zero),
                term(
                    c(4),
                    vec![-&h1, h2.clone(), -&(&a * &h4), -&(&a * &h4)],
                    &zero,
                    &one,
                ),
            ],
        ),
        (
            "fifth_difference_annihilation",
            vec![term(
                one.clone(),
                vec![h1.clone(), h2.clone(), &b * &h3, -&(&b * &h4), h5.clone()],
                &one,
                &zero,
            )],
        ),
    ];

    let mut report_stages = Vec::with_capacity(stages.len());
    let mut all_pass = true;
    for (label, terms) in &stages {
        let mut max_abs = Scalar::zero(Mode::Exact);
        for (x, y) in samples {
            let mut residual = Scalar::zero(Mode::Exact);
            for t in terms {
                let point = &(&t.px * x) + &(&t.py * y);
                let v = delta_chain(f, &DifferenceSpec::Steps(t.steps.clone()), &point)?;
                residual = &residual + &(&t.coeff * &v);
            }
            let r = residual.abs();
            if r > max_abs {
                max_abs = r;
            }
        }
        let pass = max_abs.is_zero();
        all_pass &= pass;
        report_stages.push(ChainStage {
            label: (*label).to_string(),
            max_abs_residual: max_abs,
            pass,
        });
    }

    Ok(ChainReport {
        steps: steps.to_vec(),
        samples: samples.to_vec(),
        stages: report_stages,
        pass: all_pass,
        note: "the fourth stage is verified both with distinct third and fourth steps \
               and with the fourth step substituted throughout; both identities must \
               vanish for a solution"
            .to_string(),
    })
}

fn term(coeff: Scalar, steps: Vec<Scalar>, px: &Scalar, py: &Scalar) -> StageTerm {
    StageTerm { coeff, steps, px: px.clone(), py: py.clone() }
}
