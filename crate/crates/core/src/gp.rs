//! Generalized-polynomial models `a0 + c1 x + c2 x^2 + c3 x^3 + c4 x^4`:
//! evaluation, the rational scaling law, monomial-component extraction, and
//! least-squares fitting.

use crate::function::{EvalError, FunctionHandle};
use crate::scalar::{Mode, Scalar};
use serde::{Deserialize, Serialize};

/// Errors from component extraction and fitting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GpError {
    #[error("need at least {needed} distinct abscissae, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("maximum representable degree is 4, got {requested}")]
    DegreeTooLarge { requested: u32 },
    #[error("validation node disagrees with the reconstruction by {defect}")]
    GpViolation { defect: f64 },
    #[error("f(0) = {value} is nonzero; component extraction needs f(0) = 0")]
    NonZeroAtOrigin { value: f64 },
    #[error("normal equations are singular")]
    SingularSystem,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A scalar generalized polynomial of degree at most 4: `a0 + sum ck x^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GPModel {
    pub a0: Scalar,
    pub coeffs: [Scalar; 4],
}

impl GPModel {
    pub fn new(a0: Scalar, coeffs: [Scalar; 4]) -> Self {
        let mode = a0.mode();
        assert!(
            coeffs.iter().all(|c| c.mode() == mode),
            "scalar mode mismatch: model coefficients span both modes"
        );
        GPModel { a0, coeffs }
    }

    pub fn mode(&self) -> Mode {
        self.a0.mode()
    }

    /// Largest `k` with `ck` nonzero; 0 when every power coefficient is zero.
    pub fn degree(&self) -> u32 {
        for k in (1..=4u32).rev() {
            if !self.coeffs[(k - 1) as usize].is_zero() {
                return k;
            }
        }
        0
    }

    /// Horner evaluation of `a0 + sum ck x^k`.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.mode());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc + c) * x;
        }
        &acc + &self.a0
    }

    /// The model as an evaluable handle.
    pub fn to_function(&self) -> FunctionHandle {
        let m = self.clone();
        FunctionHandle::from_pure(self.mode(), move |x| m.eval(x))
    }

    /// Both sides of the rational scaling law at `(r, x)`:
    /// `lhs = p(r x)`, `rhs = a0 + sum r^k ck x^k`. They agree exactly in
    /// exact mode for every generalized polynomial.
    pub fn scale_law_check(&self, r: &Scalar, x: &Scalar) -> (Scalar, Scalar) {
        let lhs = self.eval(&(r * x));
        let mut rhs = self.a0.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            let k = (k + 1) as i64;
            rhs = &rhs + &(&(&r.pow_i(k) * c) * &x.pow_i(k));
        }
        (lhs, rhs)
    }

    /// True when exactly one power coefficient dominates and the constant
    /// part is negligible: `|ck| > tol * max|c|` for exactly one `k` and
    /// `|a0| <= tol * max(1, max|c|)`. A monomial has one nonzero power
    /// coefficient and no constant part.
    pub fn is_monomial(&self, tol: f64) -> Option<u32> {
        let mags: Vec<f64> = self.coeffs.iter().map(|c| c.to_f64().abs()).collect();
        let max_c = mags.iter().cloned().fold(0.0, f64::max);
        if max_c == 0.0 {
            return None;
        }
        let significant: Vec<u32> = (0..4)
            .filter(|&k| mags[k as usize] > tol * max_c)
            .map(|k| k + 1)
            .collect();
        if significant.len() == 1 && self.a0.to_f64().abs() <= tol * max_c.max(1.0) {
            Some(significant[0])
        } else {
            None
        }
    }
}

// Exact inverse of the 4x4 node matrix M[r][k] = r^k, r,k = 1..4, as
// (numerator, denominator) pairs. Verified against M in the tests below.
const NODE_INVERSE: [[(i64, i64); 4]; 4] = [
    [(4, 1), (-3, 1), (4, 3), (-1, 4)],
    [(-13, 3), (19, 4), (-7, 3), (11, 24)],
    [(3, 2), (-2, 1), (7, 6), (-1, 4)],
    [(-1, 6), (1, 4), (-1, 6), (1, 24)],
];

/// Tolerance scale for the float-mode validation-node check.
const SPLIT_TOL: f64 = 1e-8;

/// Splits `f` into its monomial components at `x`: returns
/// `(v1, .., v4)` with `vk = (component of degree k)(x)`, by inverting the
/// scaling relation `f(r x) = sum r^k vk` at the nodes `r = 1..4`.
///
/// Requires `f(0) = 0` and degree at most 4; the reconstruction is
/// cross-checked at the extra node `r = 5` and a disagreement (exact in
/// exact mode, beyond `1e-8 * max(1, |f(5x)|)` in float mode) reports
/// [`GpError::GpViolation`].
pub fn component_split(f: &FunctionHandle, x: &Scalar) -> Result<[Scalar; 4], GpError> {
    let mode = f.mode();
    let f0 = f.eval(&Scalar::zero(mode))?;
    if !f0.approx_zero(SPLIT_TOL) {
        return Err(GpError::NonZeroAtOrigin { value: f0.to_f64() });
    }
    let mut fr = Vec::with_capacity(4);
    for r in 1..=4i64 {
        fr.push(f.eval(&(&Scalar::int(r, mode) * x))?);
    }
    let mut v: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero(mode));
    for (k, row) in NODE_INVERSE.iter().enumerate() {
        let mut acc = Scalar::zero(mode);
        for (j, &(p, q)) in row.iter().enumerate() {
            acc = &acc + &(&Scalar::ratio(p, q, mode) * &fr[j]);
        }
        v[k] = acc;
    }
    // Validation node r = 5: the reconstruction must predict f(5x).
    let actual = f.eval(&(&Scalar::int(5, mode) * x))?;
    let mut predicted = Scalar::zero(mode);
    for (k, vk) in v.iter().enumerate() {
        predicted = &predicted + &(&Scalar::int(5, mode).pow_i((k + 1) as i64) * vk);
    }
    let defect = &actual - &predicted;
    let tol = SPLIT_TOL * actual.to_f64().abs().max(1.0);
    if !defect.approx_zero(tol) {
        return Err(GpError::GpViolation { defect: defect.to_f64() });
    }
    Ok(v)
}

/// Least-squares fit of a generalized polynomial of degree `max_degree`
/// (at most 4) through `samples`, by the normal equations. Exact mode
/// solves exactly; float mode normalizes abscissae by their largest
/// magnitude before solving to keep the system well-conditioned.
pub fn fit_gp(samples: &[(Scalar, Scalar)], max_degree: u32) -> Result<GPModel, GpError> {
    if max_degree > 4 {
        return Err(GpError::DegreeTooLarge { requested: max_degree });
    }
    let needed = (max_degree + 1) as usize;
    let mut distinct: Vec<&Scalar> = Vec::new();
    for (x, _) in samples {
        if !distinct.contains(&x) {
            distinct.push(x);
        }
    }
    if distinct.len() < needed {
        return Err(GpError::InsufficientSamples { needed, got: distinct.len() });
    }
    let mode = samples[0].0.mode();

    // Optional abscissa normalization u = x / s (float mode only).
    let s = match mode {
        Mode::Exact => Scalar::one(mode),
        Mode::Float => {
            let m = samples.iter().map(|(x, _)| x.to_f64().abs()).fold(0.0, f64::max);
            Scalar::float(if m > 0.0 { m } else { 1.0 })
        }
    };

    let m = needed;
    let mut ata = vec![vec![Scalar::zero(mode); m]; m];
    let mut atb = vec![Scalar::zero(mode); m];
    for (x, y) in samples {
        let u = x / &s;
        let mut powers = Vec::with_capacity(m);
        let mut p = Scalar::one(mode);
        for _ in 0..m {
            powers.push(p.clone());
            p = &p * &u;
        }
        for i in 0..m {
            for j in 0..m {
                ata[i][j] = &ata[i][j] + &(&powers[i] * &powers[j]);
            }
            atb[i] = &atb[i] + &(&powers[i] * y);
        }
    }
    let sol = gauss_solve(ata, atb).ok_or(GpError::SingularSystem)?;

    let mut a0 = Scalar::zero(mode);
    let mut coeffs: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero(mode));
    for (k, ck_scaled) in sol.into_iter().enumerate() {
        let ck = &ck_scaled / &s.pow_i(k as i64);
        if k == 0 {
            a0 = ck;
        } else {
            coeffs[k - 1] = ck;
        }
    }
    Ok(GPModel::new(a0, coeffs))
}

/// Gaussian elimination with partial pivoting; pivot magnitude is compared
/// through the f64 view, row operations stay in the scalars' own mode.
fn gauss_solve(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &j| {
            a[i][col]
                .to_f64()
                .abs()
                .partial_cmp(&a[j][col].to_f64().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot_row][col].is_zero() {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = &a[row][col] / &pivot[col];
            for (entry, p) in a[row].iter_mut().zip(&pivot).skip(col) {
                *entry = &*entry - &(&factor * p);
            }
            b[row] = &b[row] - &(&factor * &b[col]);
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mode::{Exact, Float};

    fn i(n: i64) -> Scalar {
        Scalar::int(n, Exact)
    }

    fn mono(k: usize) -> GPModel {
        let mut coeffs: [Scalar; 4] = std::array::from_fn(|_| i(0));
        coeffs[k - 1] = i(1);
        GPModel::new(i(0), coeffs)
    }

    #[test]
    fn eval_and_degree() {
        let p = GPModel::new(i(1), [i(1), i(1), i(1), i(1)]);
        assert_eq!(p.eval(&i(1)), i(5));
        assert_eq!(p.degree(), 4);
        assert_eq!(mono(3).eval(&i(2)), i(8));
        assert_eq!(GPModel::new(i(7), std::array::from_fn(|_| i(0))).degree(), 0);
    }

    #[test]
    fn node_inverse_is_the_exact_inverse() {
        // M[r][k] = r^k for r, k = 1..4; NODE_INVERSE must satisfy
        // NODE_INVERSE * M = I exactly.
        for (i_row, inv_row) in NODE_INVERSE.iter().enumerate() {
            for j_col in 0..4 {
                let mut acc = Scalar::zero(Exact);
                for (l, &(p, q)) in inv_row.iter().enumerate() {
                    let m_entry = Scalar::int((l + 1) as i64, Exact).pow_i((j_col + 1) as i64);
                    // entry (l, j_col) of M is r^k with r = l+1, k = j_col+1
                    acc = &acc + &(&Scalar::ratio(p, q, Exact) * &m_entry);
                }
                let expected = if i_row == j_col { i(1) } else { i(0) };
                assert_eq!(acc, expected, "inverse entry ({i_row},{j_col})");
            }
        }
    }

    #[test]
    fn scale_law_holds_exactly() {
        let p = GPModel::new(i(1), [i(0), i(1), i(0), i(0)]);
        let (lhs, rhs) = p.scale_law_check(&i(0), &i(5));
        assert_eq!(lhs, i(1));
        assert_eq!(rhs, i(1));
        let cube = mono(3);
        let (lhs, rhs) = cube.scale_law_check(&i(2), &i(3));
        assert_eq!(lhs, i(216));
        assert_eq!(rhs, i(216));
    }

    #[test]
    fn component_split_recovers_monomial_components() {
        let cube = FunctionHandle::monomial(Exact, 3, i(1));
        let v = component_split(&cube, &i(2)).unwrap();
        assert_eq!(v, [i(0), i(0), i(8), i(0)]);

        let f = FunctionHandle::poly(Exact, &[i(0), i(1), i(0), i(0), i(1)]);
        let v = component_split(&f, &i(1)).unwrap();
        assert_eq!(v, [i(1), i(0), i(0), i(1)]);

        let sq = FunctionHandle::monomial(Exact, 2, i(1));
        let v = component_split(&sq, &i(0)).unwrap();
        assert_eq!(v, [i(0), i(0), i(0), i(0)]);
    }

    #[test]
    fn component_split_sum_reconstructs_f() {
        let f = FunctionHandle::poly(Exact, &[i(0), i(2), i(-1), i(3), i(5)]);
        for x in [i(1), i(2), Scalar::ratio(-7, 3, Exact)] {
            let v = component_split(&f, &x).unwrap();
            let sum = v.iter().fold(Scalar::zero(Exact), |s, vk| &s + vk);
            assert_eq!(sum, f.eval(&x).unwrap());
        }
    }

    #[test]
    fn component_split_flags_a_degree_five_function() {
        let quint = FunctionHandle::monomial(Exact, 5, i(1));
        match component_split(&quint, &i(1)) {
            Err(GpError::GpViolation { defect }) => assert_eq!(defect, 120.0),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn component_split_requires_zero_at_origin() {
        let f = FunctionHandle::constant(i(3));
        assert!(matches!(
            component_split(&f, &i(1)),
            Err(GpError::NonZeroAtOrigin { .. })
        ));
    }

    #[test]
    fn fit_reproduces_exact_polynomials() {
        let f = FunctionHandle::poly(Exact, &[i(2), i(0), i(-1), i(0), i(4)]);
        let samples: Vec<(Scalar, Scalar)> = (-5..=5)
            .map(|k| {
                let x = i(k);
                let y = f.eval(&x).unwrap();
                (x, y)
            })
            .collect();
        let model = fit_gp(&samples, 4).unwrap();
        assert_eq!(model.a0, i(2));
        assert_eq!(model.coeffs, [i(0), i(-1), i(0), i(4)]);
    }

    #[test]
    fn fit_rejects_too_few_abscissae() {
        let samples = vec![(i(1), i(1)), (i(1), i(1)), (i(2), i(4))];
        assert_eq!(
            fit_gp(&samples, 4),
            Err(GpError::InsufficientSamples { needed: 5, got: 2 })
        );
        assert_eq!(
            fit_gp(&samples, 5),
            Err(GpError::DegreeTooLarge { requested: 5 })
        );
    }

    #[test]
    fn float_fit_is_accurate_on_a_wide_grid() {
        let cs = [0.0, 0.5, -2.0, 1.0, 0.25];
        let f = FunctionHandle::poly(Float, &cs.map(Scalar::float));
        let samples: Vec<(Scalar, Scalar)> = (0..41)
            .map(|j| {
                let x = Scalar::float(-5.0 + 0.25 * j as f64);
                let y = f.eval(&x).unwrap();
                (x, y)
            })
            .collect();
        let model = fit_gp(&samples, 4).unwrap();
        assert!((model.a0.to_f64() - cs[0]).abs() < 1e-9);
        for (k, &c) in cs.iter().enumerate().skip(1) {
            assert!(
                (model.coeffs[k - 1].to_f64() - c).abs() < 1e-9,
                "coefficient {k}"
            );
        }
    }

    #[test]
    fn monomial_detection() {
        assert_eq!(mono(4).is_monomial(1e-9), Some(4));
        let p = GPModel::new(i(0), [i(1), i(1), i(0), i(0)]);
        assert_eq!(p.is_monomial(1e-9), None);
        let zero = GPModel::new(i(0), std::array::from_fn(|_| i(0)));
        assert_eq!(zero.is_monomial(1e-9), None);
        let with_const = GPModel::new(i(1), [i(0), i(0), i(1), i(0)]);
        assert_eq!(with_const.is_monomial(1e-9), None);
    }
}
