use nalgebra::DVector;

use super::linesearch::exact_line_search;
use crate::engine::{History, Method, Oracle, Query};
use crate::Result;

/// Curvature threshold, relative to `‖s‖‖y‖`, for accepting a pair.
pub const CURVATURE_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
struct Pair {
    s: DVector<f64>,
    y: DVector<f64>,
    rho: f64,
}

/// Unbounded list of curvature pairs `(s_i, y_i)` with `<s_i, y_i> > 0`.
#[derive(Clone, Debug, Default)]
pub struct BfgsMemory {
    pairs: Vec<Pair>,
    rejected: usize,
}

impl BfgsMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    /// Store `(s, y)` if it passes the curvature check. Returns whether it was kept.
    pub fn push(&mut self, s: DVector<f64>, y: DVector<f64>) -> bool {
        let sy = s.dot(&y);
        if !(sy > CURVATURE_TOL * s.norm() * y.norm()) {
            self.rejected += 1;
            return false;
        }
        self.pairs.push(Pair { rho: 1.0 / sy, s, y });
        true
    }

    /// `-H g` by the two-loop recursion, with `H_0 = (<s,y>/<y,y>) I` from the latest pair.
    pub fn direction(&self, gradient: &DVector<f64>) -> DVector<f64> {
        let mut p = -gradient;
        let Some(last) = self.pairs.last() else {
            return p;
        };
        let mut alphas = vec![0.0; self.pairs.len()];
        for (i, pair) in self.pairs.iter().enumerate().rev() {
            alphas[i] = pair.rho * pair.s.dot(&p);
            p.axpy(-alphas[i], &pair.y, 1.0);
        }
        p *= 1.0 / (last.rho * last.y.norm_squared());
        for (i, pair) in self.pairs.iter().enumerate() {
            let beta = pair.rho * pair.y.dot(&p);
            p.axpy(alphas[i] - beta, &pair.s, 1.0);
        }
        p
    }
}

/// Full-memory BFGS with exact line search. Pairs come from consecutive answered points.
#[derive(Clone, Debug, Default)]
pub struct Bfgs {
    memory: BfgsMemory,
    previous: Option<(DVector<f64>, DVector<f64>)>,
    fallbacks: usize,
}

impl Bfgs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memory(&self) -> &BfgsMemory {
        &self.memory
    }

    /// Steps where the quasi-Newton direction was not a descent direction.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }
}

impl Method for Bfgs {
    fn name(&self) -> String {
        "bfgs".into()
    }

    fn next_query(&mut self, history: &History, oracle: &Oracle<'_>) -> Result<Query> {
        let y = history.last().expect("history is nonempty");
        if y.is_stationary() {
            return Ok(Query::Stationary);
        }
        if let Some((x_prev, g_prev)) = &self.previous {
            self.memory.push(&y.point - x_prev, &y.gradient - g_prev);
        }
        self.previous = Some((y.point.clone(), y.gradient.clone()));
        let mut p = self.memory.direction(&y.gradient);
        if !(y.gradient.dot(&p) < 0.0) {
            self.fallbacks += 1;
            p = -&y.gradient;
        }
        let ls = exact_line_search(oracle, &y.point, &(&y.point + &p))?;
        Ok(Query::Point(ls.point))
    }
}
