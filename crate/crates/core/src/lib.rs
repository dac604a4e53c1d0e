//! Adaptive discretization for convex semi-infinite programs.
//!
//! A problem is `min f(x)` over a box `X` subject to `g_i(x, y) <= 0` for
//! every `y` in a box `Y`. The solvers replace `Y` by finite sets that grow
//! (and optionally shrink) around strongest violators found by a certified
//! lower-level solver, and return points that are feasible for the
//! semi-infinite problem and within `delta` of its optimal value.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod core_loop;
pub mod discretization;
pub mod drivers;
pub mod error;
pub mod finite;
pub mod instances;
pub mod io;
mod master;
pub mod oracle;
pub mod poly;
pub mod problem;
mod qp;
pub mod regression;
pub mod schedule;
pub mod simplex;

pub use discretization::Discretization;
pub use error::{Result, SipError};
pub use oracle::{BranchAndBound, CertifiedMax, MaxOracle};
pub use problem::{BoxDomain, ConstraintFamily, ConvexObjective, SipProblem};
