use nalgebra::DVector;

use super::linesearch::exact_line_search;
use crate::engine::{History, Method, Oracle, Query};
use crate::Result;

/// Polak–Ribière+ direction, restarted to `-g` when it is not a descent direction.
///
/// Returns the direction and whether the restart fired.
pub fn pr_plus_direction(
    gradient: &DVector<f64>,
    previous: Option<(&DVector<f64>, &DVector<f64>)>,
) -> (DVector<f64>, bool) {
    let steepest = -gradient;
    let Some((prev_gradient, prev_direction)) = previous else {
        return (steepest, false);
    };
    let denom = prev_gradient.norm_squared();
    if denom == 0.0 {
        return (steepest, false);
    }
    let beta = (gradient.dot(&(gradient - prev_gradient)) / denom).max(0.0);
    let d = &steepest + prev_direction * beta;
    if gradient.dot(&d) >= 0.0 {
        (steepest, true)
    } else {
        (d, false)
    }
}

/// Nonlinear conjugate gradient (Polak–Ribière+) with exact line search.
#[derive(Clone, Debug, Default)]
pub struct ConjugateGradient {
    previous: Option<(DVector<f64>, DVector<f64>)>,
    restarts: usize,
}

impl ConjugateGradient {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of descent restarts so far.
    pub fn restarts(&self) -> usize {
        self.restarts
    }
}

impl Method for ConjugateGradient {
    fn name(&self) -> String {
        "cg".into()
    }

    fn next_query(&mut self, history: &History, oracle: &Oracle<'_>) -> Result<Query> {
        let y = history.last().expect("history is nonempty");
        if y.is_stationary() {
            return Ok(Query::Stationary);
        }
        let (d, restarted) = pr_plus_direction(&y.gradient, self.previous.as_ref().map(|(g, d)| (g, d)));
        if restarted {
            self.restarts += 1;
        }
        let ls = exact_line_search(oracle, &y.point, &(&y.point + &d))?;
        self.previous = Some((y.gradient.clone(), d));
        Ok(Query::Point(ls.point))
    }
}
