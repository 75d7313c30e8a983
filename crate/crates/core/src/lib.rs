//! Black-box convex optimization with politicians.
//!
//! A first-order method proposes a query point; a *politician* answers with
//! first-order information at a point whose objective value is no worse than
//! the query. The trivial politician is the plain oracle. The geometric
//! politician keeps the intersection of lower-bound balls implied by strong
//! convexity, computes its volumetric center in a reduced orthonormal frame,
//! and answers with an exact line search between the query and that center.
//!
//! Module map:
//! - [`engine`]: records, history, objective/oracle plumbing and the driver loop.
//! - [`subspace`]: incremental QR frame spanning past points and gradients.
//! - [`region`]: lower-bound balls, emptiness margin and the restart rule for `alpha`.
//! - [`barriers`]: analytic and volumetric barriers over ball intersections, Newton centering.
//! - [`methods`]: exact line search, SD, CG, Gonzaga–Karas, BFGS, the empty method and the
//!   geometric politician.
//! - [`problems`]: quadratic, regularized Nesterov chain and smoothed hinge objectives plus
//!   LIBSVM ingestion.

pub mod barriers;
pub mod engine;
mod error;
pub mod linalg;
pub mod methods;
pub mod problems;
pub mod region;
pub mod subspace;

pub use engine::{
    run, FirstOrderRecord, History, Method, Objective, Oracle, OraclePolitician, Politician,
    Query, RunOptions, RunTrace, Termination, TraceStep, CONTRACT_SLACK,
};
pub use error::{Error, Result};
