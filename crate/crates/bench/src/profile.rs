//! Performance profiles over iteration counts.

use serde::Serialize;

use crate::BenchError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub method: String,
    pub x: Vec<f64>,
    pub fraction_solved: Vec<f64>,
}

/// Per-method iteration counts to reach the target, one entry per problem;
/// `None` means the method did not solve the problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodCounts {
    pub method: String,
    pub counts: Vec<Option<usize>>,
}

/// The grid `1.0, 1.1, ..., 10.0`.
pub fn default_grid() -> Vec<f64> {
    (0..=90).map(|i| 1.0 + i as f64 / 10.0).collect()
}

/// For each method and each `x`, the fraction of problems it solves within
/// `x` times the iteration count of the best method on that problem.
pub fn performance_profile(results: &[MethodCounts], x_grid: &[f64]) -> Result<Vec<ProfileCurve>, BenchError> {
    let problems = results.first().map_or(0, |r| r.counts.len());
    if problems == 0 || x_grid.is_empty() || results.iter().any(|r| r.counts.len() != problems) {
        return Err(BenchError::Profile);
    }
    let best: Vec<Option<usize>> = (0..problems)
        .map(|p| results.iter().filter_map(|r| r.counts[p]).min())
        .collect();
    Ok(results
        .iter()
        .map(|r| {
            let fraction_solved = x_grid
                .iter()
                .map(|&x| {
                    let solved = r
                        .counts
                        .iter()
                        .zip(&best)
                        .filter(|(c, b)| match (c, b) {
                            (Some(c), Some(b)) => *c as f64 <= x * *b as f64,
                            _ => false,
                        })
                        .count();
                    solved as f64 / problems as f64
                })
                .collect();
            ProfileCurve {
                method: r.method.clone(),
                x: x_grid.to_vec(),
                fraction_solved,
            }
        })
        .collect())
}
