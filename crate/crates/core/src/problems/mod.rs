//! Objective families used in the experiments and LIBSVM ingestion.

mod hinge;
pub mod libsvm;
mod nesterov;
mod quadratic;

pub use hinge::{smoothed_hinge, smoothed_hinge_derivative, HingeProblem};
pub use libsvm::{ParseError, SparseDataset, SparseRow};
pub use nesterov::{nesterov_g, nesterov_g_derivative, NesterovVariant};
pub use quadratic::QuadraticProblem;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::engine::Objective;
    use nalgebra::DVector;

    /// Largest relative error between the gradient and central differences
    /// with step `1e-6 (1 + ‖x‖)`.
    pub fn gradient_fd_error(f: &dyn Objective, x: &DVector<f64>) -> f64 {
        let (_, g) = f.value_and_gradient(x);
        let h = 1e-6 * (1.0 + x.norm());
        let fd = DVector::from_fn(x.len(), |j, _| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            (f.value(&xp) - f.value(&xm)) / (2.0 * h)
        });
        (&fd - &g).norm() / g.norm().max(1e-8)
    }
}
