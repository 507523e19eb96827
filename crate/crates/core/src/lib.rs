//! Numerics for Mond–Pečarić type operator inequalities of h-convex functions.
//!
//! The crate is `no_std` (with `alloc`). It provides:
//!
//! * [`spectral`]: dense real symmetric matrices, a cyclic Jacobi eigensolver,
//!   functional calculus `f(A)`, quadratic forms and seeded random instances.
//! * [`scalar`] and [`hfunc`]: the scalar functions `f` and weight functions
//!   `h`, their string specifiers, and the Jensen coefficient under the
//!   available [`CoefficientPolicy`] modes.
//! * [`convexity`]: a sampling oracle for h-convexity.
//! * [`engine`]: verification of the operator inequalities on concrete
//!   `(A, x)` instances, producing [`InequalityReport`]s.
//! * [`converse`]: the converse constants `alpha` and `beta` for piecewise
//!   twice differentiable `f`.
//!
//! IO, file formats and the command line live in the `opjensen` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod converse;
pub mod convexity;
pub mod engine;
mod error;
pub mod hfunc;
pub mod optimize;
pub mod scalar;
pub mod spectral;

pub use converse::{
    ConverseConstants, FamilyConstants, PieceClass, PieceData, PiecewiseC2Function,
};
pub use convexity::{check_h_convex, ConvexityWitness, Violation};
pub use engine::{CheckOptions, FObjective, InequalityReport, RefinementOutcome, Witness};
pub use error::{Error, Result};
pub use hfunc::{CoefficientPolicy, HFunction};
pub use scalar::ScalarFunction;
pub use spectral::{
    EigenDecomposition, HermitianMatrix, SpectrumInterval, UnitVector, VectorFamily,
};

/// Relative tolerance used to decide whether an inequality instance holds.
pub const VIOLATION_TOL: f64 = 1e-9;

/// `true` when `slack` is within the relative violation margin of `rhs`.
#[inline]
pub fn within_margin(slack: f64, rhs: f64) -> bool {
    if rhs.is_infinite() {
        return true;
    }
    slack >= -VIOLATION_TOL * max(1.0, libm::fabs(rhs))
}

#[inline]
pub(crate) fn max(a: f64, b: f64) -> f64 {
    if a >= b {
        a
    } else {
        b
    }
}
