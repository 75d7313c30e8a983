//! First-order methods and the geometric politician.
//!
//! Every method searches exactly along its direction from the last answered
//! point. `M+` in the benchmark naming is `M` paired with
//! [`GeometricPolitician`].

mod bfgs;
mod cg;
mod empty;
mod geometric;
mod gk;
pub mod linesearch;
mod sd;

pub use bfgs::{Bfgs, BfgsMemory, CURVATURE_TOL};
pub use cg::{pr_plus_direction, ConjugateGradient};
pub use empty::EmptyMethod;
pub use geometric::{CenteringRecord, Frame, GeometricPolitician, PoliticianState};
pub use gk::{GkState, GkStep, GonzagaKaras};
pub use linesearch::{exact_line_search, segment_line_search, LineSearchResult};
pub use sd::SteepestDescent;
