use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::Objective;

/// `f(x) = (x - c)ᵀ D (x - c)` with diagonal `D >= 0`.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    pub diag: DVector<f64>,
    pub shift: DVector<f64>,
    pub seed: u64,
}

impl QuadraticProblem {
    pub fn new(diag: DVector<f64>, shift: DVector<f64>) -> Self {
        assert_eq!(diag.len(), shift.len(), "diagonal and shift must have the same length");
        assert!(diag.iter().all(|&d| d >= 0.0), "curvatures must be nonnegative");
        Self { diag, shift, seed: 0 }
    }

    /// `D_ii ~ U[0, 1]`, `c_i ~ N(0, 1)`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag = DVector::from_fn(n, |_, _| rng.random::<f64>());
        let shift = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        Self { diag, shift, seed }
    }

    /// `D_ii ~ U[1/κ, 1]` with the extremes pinned, so the condition number is exactly `kappa`.
    pub fn with_condition(n: usize, kappa: f64, seed: u64) -> Self {
        assert!(n >= 2 && kappa >= 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = 1.0 / kappa;
        let mut diag = DVector::from_fn(n, |_, _| rng.random_range(lo..=1.0));
        diag[0] = lo;
        diag[n - 1] = 1.0;
        let shift = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        Self { diag, shift, seed }
    }

    pub fn minimizer(&self) -> &DVector<f64> {
        &self.shift
    }

    fn smallest_positive(&self) -> f64 {
        self.diag.iter().copied().filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min)
    }

    /// `2 min D` (over positive entries).
    pub fn strong_convexity(&self) -> f64 {
        2.0 * self.smallest_positive()
    }

    /// `2 max D`.
    pub fn smoothness(&self) -> f64 {
        2.0 * self.diag.max()
    }

    pub fn condition_number(&self) -> f64 {
        self.diag.max() / self.smallest_positive()
    }

    /// `max ‖x - c‖` over the sublevel set `{f <= f(x0)}`.
    pub fn sublevel_radius(&self, x0: &DVector<f64>) -> f64 {
        (self.value(x0) / self.smallest_positive()).sqrt()
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let r = x - &self.shift;
        let dr = self.diag.component_mul(&r);
        (r.dot(&dr), dr * 2.0)
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }
}
