//! Recovery of exact solutions from perturbed functions, with certified
//! error bounds.
//!
//! Given `f` with `f(0) = 0` whose defect is dominated by a control
//! function `psi`, the iteration `T_n(x) = f(a_i^n x) / lambda_i^n`
//! contracts (factor `L < 1`) toward the unique nearby exact solution `T`.
//! The branch index `i` picks the iteration direction: `i = 1` scales
//! outward when `|lambda| > 1`, `i = 2` inverts both `a` and `lambda` when
//! `0 < |lambda| < 1`. The certified pointwise bound is
//! `|f(x) - T(x)| <= L^(i-1) / ((1 - L) * |c3+c5+c6|) * psi(x, 0)`.
//!
//! The diagonal variant (for instances with `c2 = 0` and `c5 = 0`) sets
//! `y = x`, scales by `k = a + b` with ratio `gamma = (c3 + c4) / c1`, and
//! controls the error by `psi(x, x)` over `|c3 + c4|`.

use crate::equation::{EquationFamily, DEGENERACY_TOL};
use crate::function::{EvalError, FunctionHandle};
use crate::gp::{fit_gp, GPModel};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Which contraction scheme drives the run: the general two-variable
/// iteration, or the diagonal `y = x` specialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    General,
    Diagonal,
}

/// Float tolerance for the `f(0) = 0` precondition.
const ORIGIN_TOL: f64 = 1e-12;

/// Slack factor for the empirical domination and vanishing audits.
const AUDIT_SLACK: f64 = 1e-9;

/// Allowance for float cancellation noise in audited defects, relative to
/// the largest summand entering the defect.
const NOISE_REL: f64 = 1e-12;

/// Nonnegative control function `psi(x, y)` dominating the defect.
#[derive(Clone)]
pub enum ControlFunction {
    /// `psi = delta` everywhere.
    Constant { delta: f64 },
    /// `psi(x, y) = weight * (|x|^p + |y|^p)`.
    Power { p: f64, weight: f64 },
    /// Arbitrary evaluable dominator.
    Custom { f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ControlFunction({})", self.describe())
    }
}

impl ControlFunction {
    pub fn constant(delta: f64) -> Self {
        assert!(delta >= 0.0, "control function must be nonnegative");
        ControlFunction::Constant { delta }
    }

    pub fn power(p: f64, weight: f64) -> Self {
        assert!(weight >= 0.0, "control function must be nonnegative");
        ControlFunction::Power { p, weight }
    }

    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ControlFunction::Custom { f: Arc::new(f) }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            ControlFunction::Constant { delta } => *delta,
            ControlFunction::Power { p, weight } => {
                weight * (x.abs().powf(*p) + y.abs().powf(*p))
            }
            ControlFunction::Custom { f } => f(x, y),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ControlFunction::Constant { delta } => format!("const:{delta}"),
            ControlFunction::Power { p, weight } => format!("power:p={p},w={weight}"),
            ControlFunction::Custom { .. } => "custom".to_string(),
        }
    }

    /// The one-variable section the variant's metric uses: `psi(x, 0)` for
    /// the general variant, `psi(x, x)` for the diagonal one.
    fn section(&self, variant: Variant, x: f64) -> f64 {
        match variant {
            Variant::General => self.eval(x, 0.0),
            Variant::Diagonal => self.eval(x, x),
        }
    }
}

/// Selected contraction branch: index, ratio, scaling step.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityBranch {
    pub variant: Variant,
    /// 1 when the raw ratio exceeds 1 in magnitude, 2 when it lies in (0,1).
    pub i: u8,
    /// Iteration ratio (already inverted on branch 2).
    pub lambda_i: Scalar,
    /// Iteration step (already inverted on branch 2).
    pub a_i: Scalar,
    /// Diagonal variant only: the alternative ratio `(c3+c4+c6)/(c1+c2)`,
    /// recorded when it differs from the implemented `(c3+c4)/c1`.
    pub alt_ratio: Option<Scalar>,
}

/// Errors from branch selection, contraction estimation and the iteration.
#[derive(Debug, thiserror::Error)]
pub enum StabilityError {
    #[error("empty grid")]
    EmptyGrid,
    #[error("f(0) = {value} is nonzero; the iteration requires f(0) = 0")]
    NonZeroAtOrigin { value: f64 },
    #[error("scaling ratio {lambda} is degenerate (magnitude 0 or 1); no contraction branch exists")]
    DegenerateRatio { lambda: Scalar },
    #[error("diagonal variant precondition failed: {reason}")]
    VariantPreconditionFailed { reason: String },
    #[error("control function is not contractive on this branch: L = {l} >= 1")]
    NotContractive { l: f64 },
    #[error("control function vanishes at every sample; cannot estimate a contraction factor")]
    AllZeroPsi,
    #[error("no convergence within {max_n} iterations")]
    NoConvergence { max_n: u32, partial: Box<StabilityReport> },
    #[error("iteration {iteration} left the evaluable range of f")]
    DomainOverflow { iteration: u32, partial: Box<StabilityReport> },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Full record of one stabilization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub variant: Variant,
    pub branch_i: u8,
    pub lambda_i: Scalar,
    pub a_i: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt_ratio: Option<Scalar>,
    #[serde(rename = "L")]
    pub l: f64,
    /// `|c3 + c5 + c6|` (general) or `|c3 + c4|` (diagonal).
    pub denom_abs: f64,
    pub psi: String,
    pub tol: f64,
    pub iterations: u32,
    pub converged: bool,
    /// Implemented bound prefactor `L^(i-1) / ((1 - L) * denom_abs)`.
    pub bound_prefactor: f64,
    /// Prefactors under the exponent conventions `2 - i` and `1 - i`,
    /// recorded alongside the implemented `i - 1` for comparison.
    pub bound_prefactor_alts: [f64; 2],
    /// `sup |f - T|` over the grid.
    pub measured_error: f64,
    /// `sup |DT(x, y)|` over strided grid pairs (absent on partial reports).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_dt: Option<f64>,
    /// `sup |T(a_i x) - lambda_i T(x)|` over the grid (absent on partial
    /// reports).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point_defect: Option<f64>,
    /// The scaled control sequence `max_x psi-section(a_i^n x) / |lambda_i|^n`
    /// was nonincreasing over the executed iterations.
    pub psi_vanishing_ok: bool,
    /// `|Df| <= psi` held at every audited orbit point.
    pub psi_dominates_ok: bool,
    /// All of: converged, both audits passed, and the pointwise bound holds.
    pub certified: bool,
    pub grid: Vec<Scalar>,
    pub f_samples: Vec<Scalar>,
    pub t_samples: Vec<Scalar>,
    /// Pointwise certified bound `bound_prefactor * psi-section(x)`.
    pub bound_samples: Vec<f64>,
    /// Generalized polynomial fitted through the recovered samples, when a
    /// fit is possible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<GPModel>,
}

/// Outcome of re-checking a report's bound pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertification {
    pub pass: bool,
    /// `min (bound - |f - T|)` over the grid; negative margins fail.
    pub margin: f64,
}

fn magnitude_class(v: &Scalar) -> MagnitudeClass {
    let one = Scalar::one(v.mode());
    let abs = v.abs();
    if abs.approx_zero(DEGENERACY_TOL) || abs.approx_eq(&one, DEGENERACY_TOL) {
        MagnitudeClass::Degenerate
    } else if abs > one {
        MagnitudeClass::Above
    } else {
        MagnitudeClass::Below
    }
}

enum MagnitudeClass {
    Above,
    Below,
    Degenerate,
}

/// Picks the contraction branch for the requested variant.
///
/// General variant: ratio `lambda = (c3+c5+c6)/(c1+c2)` with step `a`;
/// branch 2 inverts both when `0 < |lambda| < 1`. Diagonal variant:
/// requires `c2 = 0`, `c5 = 0` and `a + b != 0`; ratio `(c3+c4)/c1` with
/// step `a + b`.
pub fn select_branch(
    family: &EquationFamily,
    variant: Variant,
) -> Result<StabilityBranch, StabilityError> {
    let (ratio, step, alt_ratio) = match variant {
        Variant::General => (family.scaling_ratio(), family.a().clone(), None),
        Variant::Diagonal => {
            if !family.c(2).approx_zero(DEGENERACY_TOL) {
                return Err(StabilityError::VariantPreconditionFailed {
                    reason: format!("c2 = {} must be zero", family.c(2)),
                });
            }
            if !family.c(5).approx_zero(DEGENERACY_TOL) {
                return Err(StabilityError::VariantPreconditionFailed {
                    reason: format!("c5 = {} must be zero", family.c(5)),
                });
            }
            let k = family.a() + family.b();
            if k.approx_zero(DEGENERACY_TOL) {
                return Err(StabilityError::VariantPreconditionFailed {
                    reason: "a + b must be nonzero".to_string(),
                });
            }
            let gamma = &(family.c(3) + family.c(4)) / family.c(1);
            let alt = &(&(family.c(3) + family.c(4)) + family.c(6))
                / &(family.c(1) + family.c(2));
            let alt_ratio = if alt == gamma { None } else { Some(alt) };
            (gamma, k, alt_ratio)
        }
    };
    match magnitude_class(&ratio) {
        MagnitudeClass::Degenerate => Err(StabilityError::DegenerateRatio { lambda: ratio }),
        MagnitudeClass::Above => Ok(StabilityBranch {
            variant,
            i: 1,
            lambda_i: ratio,
            a_i: step,
            alt_ratio,
        }),
        MagnitudeClass::Below => Ok(StabilityBranch {
            variant,
            i: 2,
            lambda_i: ratio.recip(),
            a_i: step.recip(),
            alt_ratio,
        }),
    }
}

/// Smallest Lipschitz factor `L` with
/// `psi-section(a_i x) <= L * |lambda_i| * psi-section(x)`.
///
/// Constant and power controls admit analytic values (`1/|lambda_i|` and
/// `|a_i|^p / |lambda_i|`); custom controls are estimated empirically over
/// the samples. `L >= 1` is rejected: the contraction hypothesis is
/// machine-enforced.
pub fn estimate_l(
    psi: &ControlFunction,
    branch: &StabilityBranch,
    xs: &[f64],
) -> Result<f64, StabilityError> {
    let lam_abs = branch.lambda_i.to_f64().abs();
    let a_abs = branch.a_i.to_f64().abs();
    let l = match psi {
        ControlFunction::Constant { .. } => 1.0 / lam_abs,
        ControlFunction::Power { p, .. } => a_abs.powf(*p) / lam_abs,
        ControlFunction::Custom { .. } => {
            let a_signed = branch.a_i.to_f64();
            let mut worst: f64 = 0.0;
            let mut any = false;
            for &x in xs {
                let base = psi.section(branch.variant, x);
                if base > 0.0 {
                    any = true;
                    let mapped = psi.section(branch.variant, a_signed * x);
                    worst = worst.max(mapped / (lam_abs * base));
                }
            }
            if !any {
                return Err(StabilityError::AllZeroPsi);
            }
            worst
        }
    };
    if l < 1.0 {
        Ok(l)
    } else {
        Err(StabilityError::NotContractive { l })
    }
}

/// Generalized metric `sup |g(x) - h(x)| / psi(x, 0)` over the grid points
/// where `psi(x, 0)` is nonzero (0 when there are none; infinity is a
/// representable outcome).
pub fn psi_metric(
    g: &FunctionHandle,
    h: &FunctionHandle,
    psi: &ControlFunction,
    grid: &[Scalar],
) -> Result<f64, EvalError> {
    let mut sup: f64 = 0.0;
    for x in grid {
        let w = psi.eval(x.to_f64(), 0.0);
        if w == 0.0 {
            continue;
        }
        let d = (&g.eval(x)? - &h.eval(x)?).to_f64().abs();
        sup = sup.max(d / w);
    }
    Ok(sup)
}

/// The contraction map `J`: `(J g)(x) = g(a_i x) / lambda_i`.
pub fn iteration_map(g: &FunctionHandle, branch: &StabilityBranch) -> FunctionHandle {
    let range = g.max_abs_arg().map(|r| r / branch.a_i.to_f64().abs());
    let a = branch.a_i.clone();
    let lam = branch.lambda_i.clone();
    let g = g.clone();
    let h = FunctionHandle::new(g.mode(), move |x| Ok(&g.eval(&(&a * x))? / &lam));
    match range {
        Some(r) => h.with_max_abs_arg(r),
        None => h,
    }
}

/// Proposes a constant control function `psi = sup |Df|` measured over
/// strided pairs from the grid. The returned dominator is certified only at
/// the sampled points, not globally.
pub fn propose_psi(
    family: &EquationFamily,
    f: &FunctionHandle,
    grid: &[Scalar],
) -> Result<ControlFunction, StabilityError> {
    if grid.is_empty() {
        return Err(StabilityError::EmptyGrid);
    }
    let stride = grid.len().div_ceil(33).max(1);
    let sub: Vec<&Scalar> = grid.iter().step_by(stride).collect();
    let mut sup: f64 = 0.0;
    for x in &sub {
        for y in &sub {
            sup = sup.max(family.defect(f, x, y)?.to_f64().abs());
        }
    }
    Ok(ControlFunction::constant(sup))
}

/// Runs the general-variant stabilizer: iterates `f(a_i^n x) / lambda_i^n`
/// on the grid until the sup-change falls below `tol * max(1, sup |T_n|)`,
/// then assembles and certifies the report.
pub fn stabilize(
    family: &EquationFamily,
    f: &FunctionHandle,
    psi: &ControlFunction,
    grid: &[Scalar],
    tol: f64,
    max_n: u32,
) -> Result<StabilityReport, StabilityError> {
    run(family, f, psi, grid, tol, max_n, Variant::General)
}

/// Diagonal-variant stabilizer for instances with `c2 = 0` and `c5 = 0`:
/// same engine with step `a + b`, ratio `(c3+c4)/c1`, control `psi(x, x)`.
pub fn stabilize_diagonal(
    family: &EquationFamily,
    f: &FunctionHandle,
    psi: &ControlFunction,
    grid: &[Scalar],
    tol: f64,
    max_n: u32,
) -> Result<StabilityReport, StabilityError> {
    run(family, f, psi, grid, tol, max_n, Variant::Diagonal)
}

/// Re-checks a report's certificate from its stored samples: pointwise
/// `|f(x) - T(x)| <= bound(x)`, plus the audits recorded during the run.
/// The margin is the smallest pointwise slack.
pub fn verify_bound(report: &StabilityReport) -> BoundCertification {
    let mut pass = report.converged && report.psi_dominates_ok && report.psi_vanishing_ok;
    let mut margin = f64::INFINITY;
    for ((fx, tx), bound) in report
        .f_samples
        .iter()
        .zip(&report.t_samples)
        .zip(&report.bound_samples)
    {
        let err = (fx - tx).to_f64().abs();
        let m = bound - err;
        if m < 0.0 {
            pass = false;
        }
        margin = margin.min(m);
    }
    if !margin.is_finite() {
        margin = 0.0;
    }
    BoundCertification { pass, margin }
}

struct RunContext<'a> {
    psi: &'a ControlFunction,
    variant: Variant,
    branch: StabilityBranch,
    l: f64,
    denom_abs: f64,
    tol: f64,
    grid: &'a [Scalar],
    f_samples: Vec<Scalar>,
    bound_samples: Vec<f64>,
}

impl RunContext<'_> {
    fn report(
        &self,
        iterations: u32,
        converged: bool,
        t_samples: Vec<Scalar>,
        vanishing_ok: bool,
        dominates_ok: bool,
    ) -> StabilityReport {
        let i = self.branch.i as i32;
        let measured_error = self
            .f_samples
            .iter()
            .zip(&t_samples)
            .map(|(a, b)| (a - b).to_f64().abs())
            .fold(0.0, f64::max);
        StabilityReport {
            variant: self.variant,
            branch_i: self.branch.i,
            lambda_i: self.branch.lambda_i.clone(),
            a_i: self.branch.a_i.clone(),
            alt_ratio: self.branch.alt_ratio.clone(),
            l: self.l,
            denom_abs: self.denom_abs,
            psi: self.psi.describe(),
            tol: self.tol,
            iterations,
            converged,
            bound_prefactor: prefactor(self.l, i - 1, self.denom_abs),
            bound_prefactor_alts: [
                prefactor(self.l, 2 - i, self.denom_abs),
                prefactor(self.l, 1 - i, self.denom_abs),
            ],
            measured_error,
            residual_dt: None,
            fixed_point_defect: None,
            psi_vanishing_ok: vanishing_ok,
            psi_dominates_ok: dominates_ok,
            certified: false,
            grid: self.grid.to_vec(),
            f_samples: self.f_samples.clone(),
            t_samples,
            bound_samples: self.bound_samples.clone(),
            model: None,
        }
    }
}

fn prefactor(l: f64, exponent: i32, denom_abs: f64) -> f64 {
    l.powi(exponent) / ((1.0 - l) * denom_abs)
}

/// `|Df| <= psi` audit at one orbit point (`y = 0` general, `y = x`
/// diagonal). Points whose defect needs arguments outside the declared
/// range of `f` are skipped: unauditable, not a domination failure.
fn defect_dominated(
    family: &EquationFamily,
    f: &FunctionHandle,
    psi: &ControlFunction,
    variant: Variant,
    z: &Scalar,
) -> Result<bool, EvalError> {
    let zf = z.to_f64();
    let (y, w) = match variant {
        Variant::General => (Scalar::zero(z.mode()), psi.eval(zf, 0.0)),
        Variant::Diagonal => (z.clone(), psi.eval(zf, zf)),
    };
    let (d, scale) = match family.defect_with_scale(f, z, &y) {
        Ok((v, s)) => (v.to_f64().abs(), s),
        Err(EvalError::OutOfRange { .. }) => return Ok(true),
        Err(e) => return Err(e),
    };
    Ok(d <= w * (1.0 + AUDIT_SLACK) + NOISE_REL * scale + f64::EPSILON)
}

fn run(
    family: &EquationFamily,
    f: &FunctionHandle,
    psi: &ControlFunction,
    grid: &[Scalar],
    tol: f64,
    max_n: u32,
    variant: Variant,
) -> Result<StabilityReport, StabilityError> {
    assert_eq!(
        family.mode(),
        f.mode(),
        "scalar mode mismatch: family and function disagree"
    );
    if grid.is_empty() {
        return Err(StabilityError::EmptyGrid);
    }
    let mode = f.mode();

    let f0 = f.eval(&Scalar::zero(mode))?;
    if !f0.approx_zero(ORIGIN_TOL) {
        return Err(StabilityError::NonZeroAtOrigin { value: f0.to_f64() });
    }

    let branch = select_branch(family, variant)?;
    let xs_f64: Vec<f64> = grid.iter().map(Scalar::to_f64).collect();
    let l = estimate_l(psi, &branch, &xs_f64)?;
    let denom_abs = match variant {
        Variant::General => (&(family.c(3) + family.c(5)) + family.c(6)).to_f64().abs(),
        Variant::Diagonal => (family.c(3) + family.c(4)).to_f64().abs(),
    };

    let mut f_samples = Vec::with_capacity(grid.len());
    for x in grid {
        f_samples.push(f.eval(x)?);
    }
    let pref = prefactor(l, branch.i as i32 - 1, denom_abs);
    let bound_samples: Vec<f64> = xs_f64.iter().map(|&x| pref * psi.section(variant, x)).collect();

    let ctx = RunContext {
        psi,
        variant,
        branch: branch.clone(),
        l,
        denom_abs,
        tol,
        grid,
        f_samples: f_samples.clone(),
        bound_samples,
    };

    // Audit the unscaled grid (orbit depth 0) before iterating.
    let mut dominates_ok = true;
    for x in grid {
        dominates_ok &= defect_dominated(family, f, psi, variant, x)?;
    }
    let mut vanishing_ok = true;
    let mut psi_scaled_prev = xs_f64
        .iter()
        .map(|&x| psi.section(variant, x))
        .fold(0.0, f64::max);

    let mut a_pow = Scalar::one(mode);
    let mut lam_pow = Scalar::one(mode);
    let mut prev = f_samples;
    let mut iterations = 0u32;
    let mut converged = false;

    for n in 1..=max_n {
        a_pow = &a_pow * &branch.a_i;
        lam_pow = &lam_pow * &branch.lambda_i;
        let mut cur = Vec::with_capacity(grid.len());
        let mut overflowed = false;
        for x in grid {
            let arg = &a_pow * x;
            match f.eval(&arg) {
                Ok(v) => {
                    let t = &v / &lam_pow;
                    if !t.is_finite() {
                        overflowed = true;
                        break;
                    }
                    cur.push(t);
                }
                Err(EvalError::OutOfRange { .. }) | Err(EvalError::NonFinite { .. }) => {
                    overflowed = true;
                    break;
                }
            }
        }
        if overflowed {
            return Err(StabilityError::DomainOverflow {
                iteration: n,
                partial: Box::new(ctx.report(n - 1, false, prev, vanishing_ok, dominates_ok)),
            });
        }

        // Empirical audits along the orbit actually visited.
        let lam_pow_abs = lam_pow.to_f64().abs();
        let mut m_n: f64 = 0.0;
        for x in grid {
            let z = &a_pow * x;
            m_n = m_n.max(psi.section(variant, z.to_f64()) / lam_pow_abs);
            dominates_ok &= defect_dominated(family, f, psi, variant, &z)?;
        }
        if m_n > psi_scaled_prev * (1.0 + AUDIT_SLACK) {
            vanishing_ok = false;
        }
        psi_scaled_prev = m_n;

        let sup_cur = cur.iter().map(|t| t.to_f64().abs()).fold(0.0, f64::max);
        let diff = cur
            .iter()
            .zip(&prev)
            .map(|(c, p)| (c - p).to_f64().abs())
            .fold(0.0, f64::max);
        prev = cur;
        iterations = n;
        if diff <= tol * sup_cur.max(1.0) {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(StabilityError::NoConvergence {
            max_n,
            partial: Box::new(ctx.report(iterations, false, prev, vanishing_ok, dominates_ok)),
        });
    }

    // The recovered solution as a handle: T(x) = f(a_i^n* x) / lambda_i^n*.
    let t_handle = {
        let range = f.max_abs_arg().map(|r| r / a_pow.to_f64().abs());
        let g = f.clone();
        let ap = a_pow.clone();
        let lp = lam_pow.clone();
        let h = FunctionHandle::new(mode, move |x| Ok(&g.eval(&(&ap * x))? / &lp));
        match range {
            Some(r) => h.with_max_abs_arg(r),
            None => h,
        }
    };

    let mut report = ctx.report(iterations, true, prev, vanishing_ok, dominates_ok);

    // sup |DT| over strided grid pairs.
    let stride = grid.len().div_ceil(33).max(1);
    let sub: Vec<&Scalar> = grid.iter().step_by(stride).collect();
    let mut residual_dt: f64 = 0.0;
    for x in &sub {
        for y in &sub {
            residual_dt = residual_dt.max(family.defect(&t_handle, x, y)?.to_f64().abs());
        }
    }
    report.residual_dt = Some(residual_dt);

    // sup |T(a_i x) - lambda_i T(x)| over the grid.
    let mut fixed_point_defect: f64 = 0.0;
    for (x, tx) in grid.iter().zip(&report.t_samples) {
        let mapped = t_handle.eval(&(&branch.a_i * x))?;
        fixed_point_defect =
            fixed_point_defect.max((&mapped - &(&branch.lambda_i * tx)).to_f64().abs());
    }
    report.fixed_point_defect = Some(fixed_point_defect);

    let fit_samples: Vec<(Scalar, Scalar)> = grid
        .iter()
        .cloned()
        .zip(report.t_samples.iter().cloned())
        .collect();
    report.model = fit_gp(&fit_samples, 4).ok();

    report.certified = verify_bound(&report).pass;
    Ok(report)
}
