//! Small dense helpers shared by the region and barrier code.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

/// `B + Bᵀ`.
pub fn sym(b: &DMatrix<f64>) -> DMatrix<f64> {
    b + b.transpose()
}

/// Average of `B` and `Bᵀ`.
pub fn symmetrize(b: &DMatrix<f64>) -> DMatrix<f64> {
    (b + b.transpose()) * 0.5
}

/// Cholesky factor of `h`, shifting by `mu I` when `h` is not positive definite.
///
/// Returns the factor and the shift that was applied (zero when none was needed).
pub fn modified_cholesky(h: &DMatrix<f64>) -> (Cholesky<f64, Dyn>, f64) {
    if let Some(c) = Cholesky::new(h.clone()) {
        return (c, 0.0);
    }
    let n = h.nrows();
    let eig = SymmetricEigen::new(symmetrize(h));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.abs()))
        .max(1.0);
    let mut mu = 1e-10 * scale + min.abs();
    loop {
        let shifted = h + DMatrix::identity(n, n) * mu;
        if let Some(c) = Cholesky::new(shifted) {
            return (c, mu);
        }
        mu *= 10.0;
    }
}

/// `log det` from a Cholesky factor.
pub fn logdet(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}
