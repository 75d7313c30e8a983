//! Records, history and the method/politician driver loop.
//!
//! One iteration of an algorithm `(M, Φ)`:
//! the method proposes `x = M(h)`, the politician answers `y = Φ(x, h)` with
//! `f(y) <= f(x)` together with `f(y)` and `∇f(y)`, and the record is appended
//! to the history.

use std::cell::Cell;
use std::time::Instant;

use nalgebra::DVector;

use crate::{Error, Result};

/// A query point with its objective value and gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderRecord {
    pub point: DVector<f64>,
    pub value: f64,
    pub gradient: DVector<f64>,
}

impl FirstOrderRecord {
    pub fn new(point: DVector<f64>, value: f64, gradient: DVector<f64>) -> Result<Self> {
        if gradient.len() != point.len() {
            return Err(Error::Dimension {
                expected: point.len(),
                got: gradient.len(),
            });
        }
        if !value.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::Evaluation { point });
        }
        Ok(Self {
            point,
            value,
            gradient,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient.norm()
    }

    /// True when the gradient is exactly zero: the point is optimal for a convex objective.
    pub fn is_stationary(&self) -> bool {
        self.gradient.iter().all(|&g| g == 0.0)
    }
}

/// Append-only list of answered records.
#[derive(Clone, Debug, Default)]
pub struct History {
    records: Vec<FirstOrderRecord>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: FirstOrderRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[FirstOrderRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&FirstOrderRecord> {
        self.records.last()
    }

    pub fn get(&self, i: usize) -> Option<&FirstOrderRecord> {
        self.records.get(i)
    }

    /// Index of the record with the smallest value (first one on ties).
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in self.records.iter().enumerate() {
            match best {
                Some(b) if self.records[b].value <= r.value => {}
                _ => best = Some(i),
            }
        }
        best
    }

    pub fn best(&self) -> Option<&FirstOrderRecord> {
        self.best_index().map(|i| &self.records[i])
    }
}

/// A deterministic first-order oracle for a function on `R^n`.
///
/// Implementations must be pure: the same point always yields bit-identical
/// output. They are shared read-only across concurrent runs.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.value_and_gradient(x).0
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>);

    /// Known optimal value, when the family provides one.
    fn optimal_value(&self) -> Option<f64> {
        None
    }
}

/// Counting wrapper around an [`Objective`] used during a single run.
///
/// Gradient evaluations are charged once per politician answer; value-only
/// evaluations (line-search probes) are counted separately.
pub struct Oracle<'a> {
    objective: &'a dyn Objective,
    gradient_evals: Cell<usize>,
    value_evals: Cell<usize>,
}

impl<'a> Oracle<'a> {
    pub fn new(objective: &'a dyn Objective) -> Self {
        Self {
            objective,
            gradient_evals: Cell::new(0),
            value_evals: Cell::new(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.objective
    }

    /// Value and gradient at `x`, charged as one gradient evaluation.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<FirstOrderRecord> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        self.gradient_evals.set(self.gradient_evals.get() + 1);
        let (value, gradient) = self.objective.value_and_gradient(x);
        FirstOrderRecord::new(x.clone(), value, gradient)
    }

    /// Value only. Non-finite values are reported as `+inf` so that line
    /// searches treat them as infinitely bad.
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.value_evals.set(self.value_evals.get() + 1);
        let v = self.objective.value(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    pub fn gradient_evals(&self) -> usize {
        self.gradient_evals.get()
    }

    pub fn value_evals(&self) -> usize {
        self.value_evals.get()
    }
}

/// What a method asks for next.
#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Point(DVector<f64>),
    /// The method certifies that no further progress is possible.
    Stationary,
}

/// A first-order method: a rule mapping the history to the next query.
///
/// The driver issues the starting point itself, so `next_query` is only
/// called with a nonempty history.
pub trait Method {
    fn name(&self) -> String;

    fn next_query(&mut self, history: &History, oracle: &Oracle<'_>) -> Result<Query>;
}

/// A politician: answers a query with a point that is no worse.
pub trait Politician {
    fn name(&self) -> String;

    fn answer(
        &mut self,
        query: &DVector<f64>,
        history: &History,
        oracle: &Oracle<'_>,
    ) -> Result<FirstOrderRecord>;

    /// Current strong-convexity estimate, for politicians that keep one.
    fn alpha(&self) -> Option<f64> {
        None
    }
}

/// The plain oracle: answers at the queried point.
#[derive(Clone, Copy, Debug, Default)]
pub struct OraclePolitician;

impl Politician for OraclePolitician {
    fn name(&self) -> String {
        "oracle".to_string()
    }

    fn answer(
        &mut self,
        query: &DVector<f64>,
        _history: &History,
        oracle: &Oracle<'_>,
    ) -> Result<FirstOrderRecord> {
        oracle.evaluate(query)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Maximum number of politician answers.
    pub budget: usize,
    /// Stop once `‖∇f(y)‖ <= tol`.
    pub tol: f64,
    /// Consecutive iterations without improvement of the best value before stopping.
    pub stall_iterations: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            budget: 100,
            tol: 1e-10,
            stall_iterations: 5,
        }
    }
}

impl RunOptions {
    pub fn new(budget: usize, tol: f64) -> Self {
        Self {
            budget,
            tol,
            ..Self::default()
        }
    }
}

/// Relative slack allowed on `f(y) <= f(x)`.
pub const CONTRACT_SLACK: f64 = 1e-12;

/// Relative improvement below which an iteration counts as stalled.
const STALL_RELATIVE: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Budget,
    GradientTolerance,
    Stationary,
    Stalled,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Budget => "budget",
            Termination::GradientTolerance => "gradient_tolerance",
            Termination::Stationary => "stationary",
            Termination::Stalled => "stalled",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    /// 1-based iteration index (number of answers so far).
    pub iteration: usize,
    pub query: DVector<f64>,
    pub answer: DVector<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub alpha: Option<f64>,
    pub gradient_evals: usize,
    pub value_evals: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    pub method: String,
    pub politician: String,
    pub steps: Vec<TraceStep>,
    pub termination: Termination,
    pub history: History,
}

impl RunTrace {
    pub fn final_value(&self) -> Option<f64> {
        self.steps.last().map(|s| s.value)
    }

    pub fn best_value(&self) -> Option<f64> {
        self.steps.iter().map(|s| s.value).reduce(f64::min)
    }

    pub fn values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.value).collect()
    }
}

/// Run `method` against `objective` through `politician`, starting at `x0`.
///
/// Every answer is audited against the politician contract using an
/// uncharged evaluation of `f` at the query.
pub fn run(
    method: &mut dyn Method,
    politician: &mut dyn Politician,
    objective: &dyn Objective,
    x0: &DVector<f64>,
    options: RunOptions,
) -> Result<RunTrace> {
    assert!(options.budget >= 1, "budget must be at least 1");
    if x0.len() != objective.dim() {
        return Err(Error::Dimension {
            expected: objective.dim(),
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation { point: x0.clone() });
    }

    let oracle = Oracle::new(objective);
    let mut history = History::new();
    let mut steps = Vec::with_capacity(options.budget);
    let mut termination = Termination::Budget;
    let mut best = f64::INFINITY;
    let mut stalled = 0usize;
    let start = Instant::now();

    for k in 0..options.budget {
        let query = if k == 0 {
            x0.clone()
        } else {
            match method.next_query(&history, &oracle)? {
                Query::Point(x) => x,
                Query::Stationary => {
                    termination = Termination::Stationary;
                    break;
                }
            }
        };

        let record = politician.answer(&query, &history, &oracle)?;
        if record.point != query {
            let queried = objective.value(&query);
            if record.value > queried + CONTRACT_SLACK * (1.0 + queried.abs()) {
                return Err(Error::ContractViolation {
                    politician: politician.name(),
                    iteration: k + 1,
                    answered: record.value,
                    queried,
                });
            }
        }

        let value = record.value;
        let gradient_norm = record.gradient_norm();
        let stationary = record.is_stationary();
        history.push(record.clone());
        steps.push(TraceStep {
            iteration: k + 1,
            query,
            answer: record.point,
            value,
            gradient_norm,
            alpha: politician.alpha(),
            gradient_evals: oracle.gradient_evals(),
            value_evals: oracle.value_evals(),
            seconds: start.elapsed().as_secs_f64(),
        });

        if stationary {
            termination = Termination::Stationary;
            break;
        }
        if gradient_norm <= options.tol {
            termination = Termination::GradientTolerance;
            break;
        }
        if best.is_finite() && best - value.min(best) <= STALL_RELATIVE * (1.0 + best.abs()) {
            stalled += 1;
            if stalled >= options.stall_iterations {
                termination = Termination::Stalled;
                break;
            }
        } else {
            stalled = 0;
        }
        best = best.min(value);
    }

    Ok(RunTrace {
        method: method.name(),
        politician: politician.name(),
        steps,
        termination,
        history,
    })
}
