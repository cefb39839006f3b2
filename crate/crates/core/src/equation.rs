//! Instances of the equation family, their defect operator, and degree
//! classification.
//!
//! An instance is the tuple `(a, b, c1..c6)` of the relation
//! `c1 f(ax+by) + c2 f(ax-by) = c3 f(x) + c4 f(y) + c5 f(x+y) + c6 f(x-y)`.
//! The defect `Df(x, y)` is the left side minus the right side; `f` solves
//! the instance exactly when the defect vanishes identically.

use crate::function::{EvalError, FunctionHandle};
use crate::scalar::{Mode, Scalar};
use std::fmt;
use std::str::FromStr;

/// Integer-snap tolerance for the float-mode degree test
/// `|log_|a||lambda| - round(.)| <= INTEGER_SNAP_TOL`.
pub const INTEGER_SNAP_TOL: f64 = 1e-9;

/// Float-mode tolerance below which a ratio counts as degenerate (0 or
/// absolute value 1). Exact mode tests degeneracy exactly.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Errors from family construction and grid statistics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquationError {
    #[error("invalid family: {constraint}")]
    InvalidFamily { constraint: &'static str },
    #[error("empty evaluation grid")]
    EmptyGrid,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One validated instance `(a, b, c1..c6)` of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationFamily {
    a: Scalar,
    b: Scalar,
    c: [Scalar; 6],
    mode: Mode,
}

impl EquationFamily {
    /// Validates and constructs a family.
    ///
    /// Required: `a != 0`, `b != 0`, `c1 != 0`, `c3 != 0`, `c1 + c2 != 0`
    /// (float mode treats magnitudes below [`DEGENERACY_TOL`] as zero).
    pub fn new(a: Scalar, b: Scalar, c: [Scalar; 6]) -> Result<Self, EquationError> {
        let mode = a.mode();
        assert!(
            b.mode() == mode && c.iter().all(|ci| ci.mode() == mode),
            "scalar mode mismatch: family coefficients span both modes"
        );
        let bad = |constraint| Err(EquationError::InvalidFamily { constraint });
        if a.approx_zero(DEGENERACY_TOL) {
            return bad("a must be nonzero");
        }
        if b.approx_zero(DEGENERACY_TOL) {
            return bad("b must be nonzero");
        }
        if c[0].approx_zero(DEGENERACY_TOL) {
            return bad("c1 must be nonzero");
        }
        if c[2].approx_zero(DEGENERACY_TOL) {
            return bad("c3 must be nonzero");
        }
        if (&c[0] + &c[1]).approx_zero(DEGENERACY_TOL) {
            return bad("c1 + c2 must be nonzero");
        }
        Ok(EquationFamily { a, b, c, mode })
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    /// Coefficient `c1..c6` by its one-based index.
    pub fn c(&self, i: usize) -> &Scalar {
        assert!((1..=6).contains(&i), "coefficient index must be 1..=6");
        &self.c[i - 1]
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Defect `Df(x,y) = c1 f(ax+by) + c2 f(ax-by) - c3 f(x) - c4 f(y) -
    /// c5 f(x+y) - c6 f(x-y)`; identically zero exactly when `f` solves
    /// the instance.
    pub fn defect(
        &self,
        f: &FunctionHandle,
        x: &Scalar,
        y: &Scalar,
    ) -> Result<Scalar, EvalError> {
        self.defect_with_scale(f, x, y).map(|(d, _)| d)
    }

    /// The defect together with the largest absolute summand, the scale
    /// against which float cancellation noise in the defect must be judged.
    pub fn defect_with_scale(
        &self,
        f: &FunctionHandle,
        x: &Scalar,
        y: &Scalar,
    ) -> Result<(Scalar, f64), EvalError> {
        let ax = &self.a * x;
        let by = &self.b * y;
        let terms = [
            &self.c[0] * &f.eval(&(&ax + &by))?,
            &self.c[1] * &f.eval(&(&ax - &by))?,
            &self.c[2] * &f.eval(x)?,
            &self.c[3] * &f.eval(y)?,
            &self.c[4] * &f.eval(&(x + y))?,
            &self.c[5] * &f.eval(&(x - y))?,
        ];
        let scale = terms
            .iter()
            .map(|t| t.to_f64().abs())
            .fold(0.0, f64::max);
        let mut acc = &terms[0] + &terms[1];
        for t in &terms[2..] {
            acc = &acc - t;
        }
        Ok((acc, scale))
    }

    /// Scaling ratio `lambda = (c3 + c5 + c6) / (c1 + c2)`, the factor in
    /// the identity `(c1 + c2) f(ax) = (c3 + c5 + c6) f(x)` obtained by
    /// setting `y = 0`.
    pub fn scaling_ratio(&self) -> Scalar {
        let num = &(&self.c[2] + &self.c[4]) + &self.c[5];
        let den = &self.c[0] + &self.c[1];
        &num / &den
    }

    /// Classifies the instance by the monomial degree `log_|a||lambda|`.
    ///
    /// `|a| = 1` is checked first: the logarithm base is then undefined and
    /// callers should fall back to the difference-operator degree probe.
    /// Exact mode tests `|a|^k = |lambda|` exactly for `k = 1..=4`; float
    /// mode snaps the logarithm to the nearest integer within
    /// [`INTEGER_SNAP_TOL`]. An integral degree above 4 is reported as
    /// [`DegreeClassification::NonIntegerDegree`]: such instances admit only
    /// the trivial solution among the representable degrees.
    pub fn classify(&self) -> DegreeClassification {
        let one = Scalar::one(self.mode);
        let a_abs = self.a.abs();
        if a_abs.approx_eq(&one, DEGENERACY_TOL) {
            return DegreeClassification::UndefinedBase;
        }
        let lambda = self.scaling_ratio();
        let l_abs = lambda.abs();
        if l_abs.approx_zero(DEGENERACY_TOL) || l_abs.approx_eq(&one, DEGENERACY_TOL) {
            return DegreeClassification::DegenerateRatio { lambda };
        }
        if self.mode == Mode::Exact {
            let mut p = Scalar::one(Mode::Exact);
            for k in 1..=4u8 {
                p = &p * &a_abs;
                if p == l_abs {
                    return DegreeClassification::Degree { k, lambda };
                }
            }
            let value = l_abs.to_f64().ln() / a_abs.to_f64().ln();
            return DegreeClassification::NonIntegerDegree { value };
        }
        let value = l_abs.to_f64().ln() / a_abs.to_f64().ln();
        let k = value.round();
        if (value - k).abs() <= INTEGER_SNAP_TOL && (1.0..=4.0).contains(&k) {
            DegreeClassification::Degree { k: k as u8, lambda }
        } else {
            DegreeClassification::NonIntegerDegree { value }
        }
    }

    /// Aggregate absolute defect over a grid of `(x, y)` pairs.
    pub fn defect_stats(
        &self,
        f: &FunctionHandle,
        grid: &[(Scalar, Scalar)],
    ) -> Result<DefectStats, EquationError> {
        if grid.is_empty() {
            return Err(EquationError::EmptyGrid);
        }
        let mut max_abs = Scalar::zero(self.mode);
        let mut sum_abs = Scalar::zero(self.mode);
        let mut argmax = grid[0].clone();
        for (x, y) in grid {
            let r = self.defect(f, x, y)?.abs();
            if r > max_abs {
                max_abs = r.clone();
                argmax = (x.clone(), y.clone());
            }
            sum_abs = &sum_abs + &r;
        }
        let mean_abs = &sum_abs / &Scalar::int(grid.len() as i64, self.mode);
        Ok(DefectStats { max_abs, mean_abs, argmax })
    }
}

/// Result of classifying an instance by monomial degree.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeClassification {
    /// `log_|a||lambda|` is the integer `k` in `1..=4`.
    Degree { k: u8, lambda: Scalar },
    /// The degree formula yields no representable integer degree; only the
    /// trivial solution fixes the instance among degrees `1..=4`.
    NonIntegerDegree { value: f64 },
    /// `lambda` is 0 or has absolute value 1; the degree formula collapses.
    DegenerateRatio { lambda: Scalar },
    /// `|a| = 1`: the logarithm base is undefined. Use the degree probe.
    UndefinedBase,
}

/// Aggregate defect statistics over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectStats {
    pub max_abs: Scalar,
    pub mean_abs: Scalar,
    pub argmax: (Scalar, Scalar),
}

/// Ready-made instances exercising every classification branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `f(x+y) + f(x-y) = 2f(x) + 2f(y)`; solved by `x^2`, base `|a| = 1`.
    Quadratic,
    /// `f(2x+y) + f(2x-y) = 12f(x) + 2f(x+y) + 2f(x-y)`; solved by `x^3`.
    Cubic,
    /// `f(2x+y) + f(2x-y) = 24f(x) - 6f(y) + 4f(x+y) + 4f(x-y)`; solved by `x^4`.
    Quartic,
    /// `f((x+y)/2) + f((x-y)/2) = f(x)`; solved by `x`, ratio below 1.
    HalvingAdditive,
}

impl Preset {
    pub const ALL: [Preset; 4] =
        [Preset::Quadratic, Preset::Cubic, Preset::Quartic, Preset::HalvingAdditive];

    /// The canonical monomial degree solving this preset.
    pub fn solution_degree(self) -> u32 {
        match self {
            Preset::Quadratic => 2,
            Preset::Cubic => 3,
            Preset::Quartic => 4,
            Preset::HalvingAdditive => 1,
        }
    }

    pub fn family(self, mode: Mode) -> EquationFamily {
        let i = |n| Scalar::int(n, mode);
        let (a, b, c) = match self {
            Preset::Quadratic => (i(1), i(1), [i(1), i(1), i(2), i(2), i(0), i(0)]),
            Preset::Cubic => (i(2), i(1), [i(1), i(1), i(12), i(0), i(2), i(2)]),
            Preset::Quartic => (i(2), i(1), [i(1), i(1), i(24), i(-6), i(4), i(4)]),
            Preset::HalvingAdditive => (
                Scalar::ratio(1, 2, mode),
                Scalar::ratio(1, 2, mode),
                [i(1), i(1), i(1), i(0), i(0), i(0)],
            ),
        };
        EquationFamily::new(a, b, c).expect("presets satisfy the family invariants")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Preset::Quadratic => "quadratic",
            Preset::Cubic => "cubic",
            Preset::Quartic => "quartic",
            Preset::HalvingAdditive => "halving_additive",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadratic" => Ok(Preset::Quadratic),
            "cubic" => Ok(Preset::Cubic),
            "quartic" => Ok(Preset::Quartic),
            "halving_additive" | "halving-additive" => Ok(Preset::HalvingAdditive),
            other => Err(format!(
                "unknown preset {other:?}; expected quadratic, cubic, quartic or halving_additive"
            )),
        }
    }
}
