use nalgebra::DVector;

use super::linesearch::exact_line_search;
use crate::engine::{History, Method, Oracle, Query};
use crate::Result;

/// Steepest descent with exact line search from the last answered point.
#[derive(Clone, Copy, Debug, Default)]
pub struct SteepestDescent;

impl SteepestDescent {
    pub fn new() -> Self {
        Self
    }
}

impl Method for SteepestDescent {
    fn name(&self) -> String {
        "sd".into()
    }

    fn next_query(&mut self, history: &History, oracle: &Oracle<'_>) -> Result<Query> {
        let y = history.last().expect("history is nonempty");
        if y.is_stationary() {
            return Ok(Query::Stationary);
        }
        let target: DVector<f64> = &y.point - &y.gradient;
        Ok(Query::Point(exact_line_search(oracle, &y.point, &target)?.point))
    }
}
