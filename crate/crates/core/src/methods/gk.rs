//! Gonzaga–Karas accelerated gradient descent with learned curvature estimates.
//!
//! Each iteration takes the politician's answer `y_k`, runs an exact line search
//! from `y_k` along `-∇f(y_k)` to get `x_{k+1}`, updates the strong convexity
//! estimate `alpha`, the weight `gamma` and the momentum point `v`, and queries
//! the best point on the segment `[x_{k+1}, v_{k+1}]`.

use nalgebra::DVector;

use super::linesearch::{exact_line_search, segment_line_search};
use crate::engine::{FirstOrderRecord, History, Method, Oracle, Query};
use crate::Result;

#[derive(Clone, Debug)]
pub struct GkState {
    pub gamma: f64,
    pub alpha_est: f64,
    /// Momentum point `v_k`.
    pub v: DVector<f64>,
    /// Last steepest-descent point `x_k` and its value.
    pub x_prev: DVector<f64>,
    pub fx_prev: f64,
    /// Last answered point.
    pub y_prev: DVector<f64>,
    pub oracle_mode: bool,
}

/// What one loop body did.
#[derive(Clone, Debug, PartialEq)]
pub struct GkStep {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
    /// The `alpha = gamma / 2` reset ran.
    pub star_fired: bool,
    pub discriminant_clamped: bool,
    /// `f(y_k) <= f(x_{k+1})`: the curvature estimate could not be updated.
    pub alpha_update_skipped: bool,
    /// `C >= 0`: no decrease, so `gamma` and `v` were left unchanged.
    pub beta_skipped: bool,
}

#[derive(Clone, Debug)]
pub struct GonzagaKaras {
    oracle_mode: bool,
    state: Option<GkState>,
    steps: Vec<GkStep>,
}

impl GonzagaKaras {
    /// `oracle_mode` enables the `alpha = gamma / 2` reset, which is only valid
    /// when every answer is at the queried point.
    pub fn new(oracle_mode: bool) -> Self {
        Self {
            oracle_mode,
            state: None,
            steps: Vec::new(),
        }
    }

    pub fn state(&self) -> Option<&GkState> {
        self.state.as_ref()
    }

    pub fn steps(&self) -> &[GkStep] {
        &self.steps
    }
}

/// Positive root of `a β² + b β + c = 0` for `c < 0`, and whether the
/// discriminant had to be clamped at zero.
fn beta_root(a: f64, b: f64, c: f64) -> (f64, bool) {
    if a == 0.0 {
        return (-c / b, false);
    }
    let disc = b * b - 4.0 * a * c;
    let clamped = disc < 0.0;
    ((-b + disc.max(0.0).sqrt()) / (2.0 * a), clamped)
}

fn loop_body(state: &mut GkState, y: &FirstOrderRecord, x_next: &DVector<f64>, fx_next: f64) -> GkStep {
    let g = &y.gradient;
    let g2 = g.norm_squared();
    let decrease = y.value - fx_next;
    let mut step = GkStep {
        gamma: state.gamma,
        beta: 0.0,
        alpha: state.alpha_est,
        star_fired: false,
        discriminant_clamped: false,
        alpha_update_skipped: false,
        beta_skipped: false,
    };

    if state.oracle_mode && state.alpha_est >= state.gamma / 1.02 {
        state.alpha_est = state.gamma / 2.0;
        step.star_fired = true;
    }
    if decrease > 0.0 {
        if state.alpha_est >= g2 / (2.0 * decrease) {
            state.alpha_est = g2 / (20.0 * decrease);
        }
    } else {
        step.alpha_update_skipped = true;
    }

    let alpha = state.alpha_est;
    let gamma = state.gamma;
    let vy = &state.v - &y.point;
    let big_g = gamma * (0.5 * alpha * vy.norm_squared() + g.dot(&vy));
    let a = big_g + 0.5 * g2 + (alpha - gamma) * (state.fx_prev - y.value);
    let b = (alpha - gamma) * (fx_next - state.fx_prev) - gamma * (y.value - state.fx_prev) - big_g;
    let c = gamma * (fx_next - state.fx_prev);

    if c < 0.0 {
        let (beta, clamped) = beta_root(a, b, c);
        step.discriminant_clamped = clamped;
        // alpha <= gamma, so the convex combination cannot exceed gamma except by rounding.
        let gamma_next = ((1.0 - beta) * gamma + beta * alpha).min(gamma);
        let target = &y.point * alpha - g;
        state.v = (&state.v * ((1.0 - beta) * gamma) + target * beta) / gamma_next;
        state.gamma = gamma_next;
        step.beta = beta;
    } else {
        step.beta_skipped = true;
    }
    state.x_prev = x_next.clone();
    state.fx_prev = fx_next;
    state.y_prev = y.point.clone();
    step.gamma = state.gamma;
    step.alpha = state.alpha_est;
    step
}

impl Method for GonzagaKaras {
    fn name(&self) -> String {
        "gk".into()
    }

    fn next_query(&mut self, history: &History, oracle: &Oracle<'_>) -> Result<Query> {
        let y = history.last().expect("history is nonempty");
        if y.is_stationary() {
            return Ok(Query::Stationary);
        }
        let ls = exact_line_search(oracle, &y.point, &(&y.point - &y.gradient))?;
        let state = match self.state.as_mut() {
            Some(s) => s,
            None => {
                // Initial estimate from the first steepest-descent step.
                let decrease = y.value - ls.value;
                let alpha = if decrease > 0.0 {
                    y.gradient.norm_squared() / (20.0 * decrease)
                } else {
                    1.0
                };
                self.state.insert(GkState {
                    gamma: 2.0 * alpha,
                    alpha_est: alpha,
                    v: y.point.clone(),
                    x_prev: y.point.clone(),
                    fx_prev: y.value,
                    y_prev: y.point.clone(),
                    oracle_mode: self.oracle_mode,
                })
            }
        };
        let step = loop_body(state, y, &ls.point, ls.value);
        if step.discriminant_clamped {
            log::debug!("gk: clamped a negative discriminant");
        }
        self.steps.push(step);
        let seg = segment_line_search(oracle, &state.x_prev, &state.v);
        Ok(Query::Point(seg.point))
    }
}
