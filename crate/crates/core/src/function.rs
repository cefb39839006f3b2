//! Evaluable function handles: the object under test.
//!
//! A handle wraps a deterministic scalar map together with its arithmetic
//! mode and an optional evaluable range. Handles are cheap to clone and safe
//! to share across threads.

use crate::scalar::{Mode, Scalar};
use std::fmt;
use std::sync::Arc;

/// Error raised while evaluating a [`FunctionHandle`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("function value is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("argument {x} exceeds the declared evaluable range |x| <= {max_abs}")]
    OutOfRange { x: f64, max_abs: f64 },
}

type EvalFn = dyn Fn(&Scalar) -> Result<Scalar, EvalError> + Send + Sync;

/// A deterministic evaluable map from scalars to scalars in a fixed mode.
#[derive(Clone)]
pub struct FunctionHandle {
    f: Arc<EvalFn>,
    mode: Mode,
    max_abs_arg: Option<f64>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("mode", &self.mode)
            .field("max_abs_arg", &self.max_abs_arg)
            .finish_non_exhaustive()
    }
}

impl FunctionHandle {
    /// Wraps a fallible evaluation closure.
    pub fn new(
        mode: Mode,
        f: impl Fn(&Scalar) -> Result<Scalar, EvalError> + Send + Sync + 'static,
    ) -> Self {
        FunctionHandle { f: Arc::new(f), mode, max_abs_arg: None }
    }

    /// Wraps an infallible evaluation closure.
    pub fn from_pure(
        mode: Mode,
        f: impl Fn(&Scalar) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        FunctionHandle::new(mode, move |x| Ok(f(x)))
    }

    /// Polynomial with coefficients `coeffs[k]` on `x^k`, evaluated by Horner.
    pub fn poly(mode: Mode, coeffs: &[Scalar]) -> Self {
        for c in coeffs {
            assert_eq!(c.mode(), mode, "polynomial coefficient mode mismatch");
        }
        let cs: Vec<Scalar> = coeffs.to_vec();
        FunctionHandle::from_pure(mode, move |x| {
            let mut acc = Scalar::zero(x.mode());
            for c in cs.iter().rev() {
                acc = &(&acc * x) + c;
            }
            acc
        })
    }

    /// The monomial `coeff * x^degree`.
    pub fn monomial(mode: Mode, degree: u32, coeff: Scalar) -> Self {
        assert_eq!(coeff.mode(), mode, "monomial coefficient mode mismatch");
        FunctionHandle::from_pure(mode, move |x| &coeff * &x.pow_i(degree as i64))
    }

    pub fn constant(c: Scalar) -> Self {
        let mode = c.mode();
        FunctionHandle::from_pure(mode, move |_| c.clone())
    }

    pub fn zero(mode: Mode) -> Self {
        FunctionHandle::constant(Scalar::zero(mode))
    }

    /// Declares the evaluable range `|x| <= max_abs`; arguments outside it
    /// fail with [`EvalError::OutOfRange`] instead of evaluating.
    pub fn with_max_abs_arg(mut self, max_abs: f64) -> Self {
        self.max_abs_arg = Some(max_abs);
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn max_abs_arg(&self) -> Option<f64> {
        self.max_abs_arg
    }

    /// Evaluates the handle, enforcing range and (in float mode) finiteness.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar, EvalError> {
        assert_eq!(
            x.mode(),
            self.mode,
            "scalar mode mismatch: argument mode differs from the function's mode"
        );
        if let Some(max_abs) = self.max_abs_arg {
            let xa = x.to_f64();
            if xa.abs() > max_abs {
                return Err(EvalError::OutOfRange { x: xa, max_abs });
            }
        }
        let v = (self.f)(x)?;
        debug_assert_eq!(v.mode(), self.mode, "evaluation changed arithmetic mode");
        if !v.is_finite() {
            return Err(EvalError::NonFinite { x: x.to_f64() });
        }
        Ok(v)
    }

    /// Pointwise sum of two handles of the same mode.
    pub fn add(&self, other: &FunctionHandle) -> FunctionHandle {
        assert_eq!(self.mode, other.mode, "cannot add handles of different modes");
        let (f, g) = (self.clone(), other.clone());
        let range = match (self.max_abs_arg, other.max_abs_arg) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut h = FunctionHandle::new(self.mode, move |x| Ok(&f.eval(x)? + &g.eval(x)?));
        h.max_abs_arg = range;
        h
    }

    /// Pointwise scaling `k * f`.
    pub fn scale(&self, k: &Scalar) -> FunctionHandle {
        assert_eq!(self.mode, k.mode(), "cannot scale a handle by the other mode");
        let f = self.clone();
        let k = k.clone();
        let mut h = FunctionHandle::new(self.mode, move |x| Ok(&k * &f.eval(x)?));
        h.max_abs_arg = self.max_abs_arg;
        h
    }
}
