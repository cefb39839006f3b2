//! Toolkit for the two-parameter family of functional equations
//!
//! ```text
//! c1 f(ax+by) + c2 f(ax-by) = c3 f(x) + c4 f(y) + c5 f(x+y) + c6 f(x-y)
//! ```
//!
//! The crate classifies instances by the monomial degree of their solutions,
//! verifies candidate solutions with an exact difference-operator calculus,
//! and recovers exact monomial solutions from perturbed functions through a
//! contraction iteration that certifies the resulting error bound.
//!
//! All numeric work runs in one of two modes: exact arbitrary-precision
//! rationals, or `f64` with explicit tolerances. Modes are never mixed within
//! a computation.

pub mod diffcalc;
pub mod equation;
pub mod function;
pub mod gp;
pub mod scalar;
pub mod stability;

pub use diffcalc::{
    delta, delta_chain, delta_iter, gp_degree_probe, verify_solution_chain, ChainError,
    ChainReport, ChainStage, DifferenceSpec, GpProbeResult,
};
pub use equation::{
    DefectStats, DegreeClassification, EquationError, EquationFamily, Preset, DEGENERACY_TOL,
    INTEGER_SNAP_TOL,
};
pub use function::{EvalError, FunctionHandle};
pub use gp::{component_split, fit_gp, GpError, GPModel};
pub use scalar::{lattice_rational, linear_grid, Mode, Scalar, ScalarParseError};
pub use stability::{
    estimate_l, iteration_map, propose_psi, psi_metric, select_branch, stabilize,
    stabilize_diagonal, verify_bound, BoundCertification, ControlFunction, StabilityBranch,
    StabilityError, StabilityReport, Variant,
};
