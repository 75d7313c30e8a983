use nalgebra::DVector;

use crate::engine::Objective;

const KNOT: f64 = 0.1;
const SMOOTHING: f64 = 0.001;

/// Smoothed dead-zone absolute value: zero on `[-0.1, 0.1]`, then
/// `sqrt((|z| - 0.1)² + 0.001²) - 0.001`.
pub fn nesterov_g(z: f64) -> f64 {
    let u = z.abs() - KNOT;
    if u <= 0.0 {
        0.0
    } else {
        (u * u + SMOOTHING * SMOOTHING).sqrt() - SMOOTHING
    }
}

pub fn nesterov_g_derivative(z: f64) -> f64 {
    let u = z.abs() - KNOT;
    if u <= 0.0 {
        0.0
    } else {
        z.signum() * u / (u * u + SMOOTHING * SMOOTHING).sqrt()
    }
}

/// `f(x) = g(1 - x_1) + Σ_k g(x_k - x_{k+1})`.
#[derive(Clone, Copy, Debug)]
pub struct NesterovVariant {
    pub n: usize,
}

impl NesterovVariant {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self { n }
    }

    /// `(1, 0.9, ..., 0.1, 0, ..., 0)`, truncated to `n` entries.
    pub fn minimizer(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| (10usize.saturating_sub(i)) as f64 / 10.0)
    }
}

impl Objective for NesterovVariant {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let mut v = nesterov_g(1.0 - x[0]);
        for k in 0..self.n - 1 {
            v += nesterov_g(x[k] - x[k + 1]);
        }
        v
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut g = DVector::zeros(self.n);
        let mut v = nesterov_g(1.0 - x[0]);
        g[0] -= nesterov_g_derivative(1.0 - x[0]);
        for k in 0..self.n - 1 {
            let z = x[k] - x[k + 1];
            v += nesterov_g(z);
            let d = nesterov_g_derivative(z);
            g[k] += d;
            g[k + 1] -= d;
        }
        (v, g)
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }
}
