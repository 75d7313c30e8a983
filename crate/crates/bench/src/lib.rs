//! Benchmark harness: method × politician grids over problem suites, CSV
//! traces with a manifest, and performance profiles.
//!
//! Method names follow the registry in [`registry`]: `sd`, `cg`, `gk`, `bfgs`
//! and `empty`, with a trailing `+` for the geometric politician.

pub mod config;
mod error;
pub mod profile;
pub mod registry;
pub mod suite;

pub use config::{BenchConfig, ProblemInstance, ProblemSpec, ValidatedConfig};
pub use error::BenchError;
pub use profile::{default_grid, performance_profile, MethodCounts, ProfileCurve};
pub use registry::{BaseMethod, MethodSpec};
pub use suite::{execute, execute_suite, iterations_to_target, run_suite, write_artifacts, Manifest, RunEntry, SuiteReport};
