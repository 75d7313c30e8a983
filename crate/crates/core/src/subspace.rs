//! Incremental orthonormal frame for affine-invariant reduction.
//!
//! The frame is `T(u) = base + Q u` where the columns of `Q` span every vector
//! inserted so far. Points of `base + span(Q)` are reduced with
//! `u = Qᵀ(x - base)` and lifted back with `base + Q u`, which is an isometry.
//! Each insertion costs `O(n m)`.

use nalgebra::DVector;

use crate::{Error, Result};

/// Residual norm (relative to `‖v‖`) below which an inserted vector counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-12;

/// Relative tolerance on the out-of-span residual accepted by [`SubspaceBasis::reduce`].
pub const REDUCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Insertion {
    /// Coordinates `Qᵀ v` in the frame after insertion (length `m`).
    pub coordinates: Vec<f64>,
    /// True when `v` was already in the span and `m` did not grow.
    pub dependent: bool,
}

/// Base point plus orthonormal columns `Q` and the upper-triangular coordinates of
/// every inserted vector (the `R` factor of the inserted matrix).
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    base: DVector<f64>,
    columns: Vec<DVector<f64>>,
    r_columns: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    pub fn new(base: DVector<f64>) -> Self {
        Self {
            base,
            columns: Vec::new(),
            r_columns: Vec::new(),
        }
    }

    /// A frame whose columns are the standard basis of `R^n`: reduction is a plain shift.
    pub fn ambient(base: DVector<f64>) -> Self {
        let n = base.len();
        let mut basis = Self::new(base);
        for i in 0..n {
            basis.columns.push(DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }));
        }
        basis
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Current subspace dimension `m`.
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &DVector<f64> {
        &self.columns[j]
    }

    /// Coordinates recorded for every inserted vector, zero-padded to the current `m`.
    pub fn r_factor(&self) -> Vec<Vec<f64>> {
        let m = self.dim();
        self.r_columns
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.resize(m, 0.0);
                c
            })
            .collect()
    }

    fn project(&self, v: &DVector<f64>) -> Vec<f64> {
        self.columns.iter().map(|q| q.dot(v)).collect()
    }

    fn subtract_span(&self, v: &mut DVector<f64>, coefficients: &[f64]) {
        for (q, &c) in self.columns.iter().zip(coefficients) {
            v.axpy(-c, q, 1.0);
        }
    }

    /// Append `v` by classical Gram–Schmidt with one re-orthogonalization pass.
    pub fn insert(&mut self, v: &DVector<f64>) -> Insertion {
        assert_eq!(v.len(), self.ambient_dim(), "inserted vector has wrong dimension");
        let norm = v.norm();
        let mut residual = v.clone();
        let first = self.project(&residual);
        self.subtract_span(&mut residual, &first);
        let second = self.project(&residual);
        self.subtract_span(&mut residual, &second);
        let mut coordinates: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a + b).collect();

        let rho = residual.norm();
        let dependent = norm == 0.0 || rho <= DEPENDENCE_TOL * norm || self.dim() == self.ambient_dim();
        if !dependent {
            self.columns.push(residual / rho);
            coordinates.push(rho);
        }
        self.r_columns.push(coordinates.clone());
        Insertion {
            coordinates,
            dependent,
        }
    }

    /// Coordinates `Qᵀ(x - base)`.
    pub fn reduce(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let shifted = x - &self.base;
        let u = self.project(&shifted);
        let mut residual = shifted;
        self.subtract_span(&mut residual, &u);
        let res = residual.norm();
        let tolerance = REDUCE_TOL * (1.0 + x.norm());
        if res > tolerance {
            return Err(Error::Subspace {
                residual: res,
                tolerance,
            });
        }
        Ok(DVector::from_vec(u))
    }

    /// Coordinates of a direction (no base shift): `Qᵀ v`.
    pub fn reduce_direction(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.project(v))
    }

    /// `base + Q u`. Missing trailing coordinates are read as zero.
    pub fn lift(&self, u: &DVector<f64>) -> DVector<f64> {
        assert!(u.len() <= self.dim(), "coordinate vector longer than the frame");
        let mut x = self.base.clone();
        for (q, &c) in self.columns.iter().zip(u.iter()) {
            x.axpy(c, q, 1.0);
        }
        x
    }

    /// `max |QᵀQ - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.columns[i].dot(&self.columns[j]) - target).abs());
            }
        }
        worst
    }
}
