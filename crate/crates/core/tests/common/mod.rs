#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use politician::problems::QuadraticProblem;
use politician::Objective;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Optimal values of a diagonal quadratic over `x0 + K_j` for `j = 0..=depth`,
/// where `K_j` is the Krylov space of the Hessian and the initial gradient.
pub fn krylov_optima(q: &QuadraticProblem, x0: &DVector<f64>, depth: usize) -> Vec<f64> {
    let (f0, g0) = q.value_and_gradient(x0);
    let d = DMatrix::from_diagonal(&q.diag);
    let r0 = x0 - &q.shift;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut out = vec![f0];
    let mut v = g0;
    for _ in 0..depth {
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm == 0.0 {
            out.push(*out.last().unwrap());
            continue;
        }
        basis.push(&v / norm);
        let k = basis.len();
        let vm = DMatrix::from_fn(q.diag.len(), k, |i, j| basis[j][i]);
        let reduced = vm.transpose() * &d * &vm;
        let rhs = -(vm.transpose() * (&d * &r0));
        let u = reduced.cholesky().expect("reduced Hessian is positive definite").solve(&rhs);
        let r = &r0 + &vm * u;
        out.push(r.dot(&(&d * &r)));
        v = &d * basis.last().unwrap();
    }
    out
}

/// `x -> f(U x + b)` for an orthogonal `U`.
pub struct Transformed<'a> {
    pub inner: &'a dyn Objective,
    pub rotation: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl Transformed<'_> {
    pub fn to_inner(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rotation * x + &self.offset
    }

    pub fn from_inner(&self, z: &DVector<f64>) -> DVector<f64> {
        self.rotation.transpose() * (z - &self.offset)
    }
}

impl Objective for Transformed<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (v, g) = self.inner.value_and_gradient(&self.to_inner(x));
        (v, self.rotation.transpose() * g)
    }
}

pub fn random_rotation(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

pub fn random_vector(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}
