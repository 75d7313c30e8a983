use nalgebra::DVector;

use super::libsvm::SparseDataset;
use crate::engine::Objective;

/// Smoothed hinge: `0` for `z <= -1`, `z + 1 - t/2` for `z >= -1 + t`, and
/// `(z + 1)² / (2t)` in between.
pub fn smoothed_hinge(z: f64, t: f64) -> f64 {
    if z <= -1.0 {
        0.0
    } else if z >= -1.0 + t {
        z + 1.0 - 0.5 * t
    } else {
        (z + 1.0) * (z + 1.0) / (2.0 * t)
    }
}

pub fn smoothed_hinge_derivative(z: f64, t: f64) -> f64 {
    if z <= -1.0 {
        0.0
    } else if z >= -1.0 + t {
        1.0
    } else {
        (z + 1.0) / t
    }
}

/// `f(x) = (1/N) Σ φ_t(b_i a_iᵀx) + (λ/2)‖x‖²`.
#[derive(Clone, Debug)]
pub struct HingeProblem {
    pub data: SparseDataset,
    pub t: f64,
    pub lambda: f64,
}

impl HingeProblem {
    pub fn new(data: SparseDataset, t: f64, lambda: f64) -> Self {
        assert!(t > 0.0, "smoothing must be positive");
        assert!(lambda >= 0.0, "regularization must be nonnegative");
        assert!(!data.is_empty(), "dataset has no rows");
        Self { data, t, lambda }
    }

    /// Sparse synthetic instance with `4 d` rows and about eight nonzeros per row.
    pub fn synthetic(dim: usize, seed: u64, t: f64, lambda: f64) -> Self {
        let density = (8.0 / dim as f64).min(1.0);
        Self::new(SparseDataset::synthetic(4 * dim, dim, density, seed), t, lambda)
    }
}

impl Objective for HingeProblem {
    fn dim(&self) -> usize {
        self.data.dim
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let xs = x.as_slice();
        let loss: f64 = self
            .data
            .rows
            .iter()
            .map(|r| smoothed_hinge(r.label * r.dot(xs), self.t))
            .sum();
        loss / self.data.len() as f64 + 0.5 * self.lambda * x.norm_squared()
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let xs = x.as_slice();
        let n = self.data.len() as f64;
        let mut g = x * self.lambda;
        let mut loss = 0.0;
        for r in &self.data.rows {
            let z = r.label * r.dot(xs);
            loss += smoothed_hinge(z, self.t);
            let w = smoothed_hinge_derivative(z, self.t) * r.label / n;
            if w != 0.0 {
                for &(i, v) in &r.features {
                    g[i - 1] += w * v;
                }
            }
        }
        (loss / n + 0.5 * self.lambda * x.norm_squared(), g)
    }
}
