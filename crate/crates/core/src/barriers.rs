//! Analytic and volumetric barriers of a ball intersection, and Newton centering.
//!
//! For balls `‖x - c_i‖ <= r_i` let `d_i = 1/(r_i² - ‖x - c_i‖²)` and let `A`
//! be the `k x m` matrix with rows `d_i (x - c_i)`. Then
//!
//! ```text
//! F(x)    = -1/2 Σ log(r_i² - ‖x - c_i‖²)
//! ∇F      = Aᵀ1
//! ∇²F = H = 2AᵀA + λ1 I,               λp = Σ d_iᵖ
//! v(x)    = log det H
//! ∇v      = (2 tr(H⁻¹) I + 4H⁻¹) Aᵀd + 8Aᵀσ,   σ_i = e_iᵀ A H⁻¹ Aᵀ e_i
//! ```
//!
//! The Hessian of `v` is assembled in closed form in [`volumetric_hess`]; the
//! minimizers of `F` and `v` are the analytic and volumetric centers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::linalg::{logdet, modified_cholesky, sym, symmetrize};
use crate::region::{deepest_point, Ball};
use crate::{Error, Result};

/// Newton decrement at which centering is declared converged.
pub const DECREMENT_TOL: f64 = 1e-10;

/// Smallest slack, relative to the rounding scale of its evaluation, that counts as interior.
pub const SLACK_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterKind {
    Analytic,
    Volumetric,
}

#[derive(Clone, Debug)]
pub struct CenterResult {
    pub center: DVector<f64>,
    pub newton_iterations: usize,
    pub final_decrement: f64,
    pub kind: CenterKind,
    pub converged: bool,
    /// Number of Newton steps that used the finite-difference Hessian.
    pub fd_fallbacks: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct CenterOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Compare the closed-form volumetric Hessian against finite differences of
    /// the gradient at every step and fall back to the latter on disagreement.
    pub verify_hessian: bool,
}

impl Default for CenterOptions {
    fn default() -> Self {
        Self {
            tol: DECREMENT_TOL,
            max_iterations: 50,
            verify_hessian: false,
        }
    }
}

/// Per-point quantities shared by both barriers.
pub struct BarrierWorkspace {
    pub slack: DVector<f64>,
    pub d: DVector<f64>,
    pub a: DMatrix<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub h: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl BarrierWorkspace {
    pub fn new(balls: &[Ball], x: &DVector<f64>) -> Result<Self> {
        let k = balls.len();
        let m = x.len();
        let mut slack = DVector::zeros(k);
        let mut d = DVector::zeros(k);
        let mut a = DMatrix::zeros(k, m);
        for (i, ball) in balls.iter().enumerate() {
            let u = x - &ball.center;
            let s = ball.slack(x);
            if !(s > 0.0) {
                return Err(Error::Domain { ball: i, slack: s });
            }
            slack[i] = s;
            d[i] = 1.0 / s;
            a.row_mut(i).copy_from(&(u * d[i]).transpose());
        }
        let lambda1 = d.sum();
        let lambda2 = d.norm_squared();
        let h = a.transpose() * &a * 2.0 + DMatrix::identity(m, m) * lambda1;
        let chol = match Cholesky::new(h.clone()) {
            Some(c) => c,
            None => modified_cholesky(&h).0,
        };
        Ok(Self {
            slack,
            d,
            a,
            lambda1,
            lambda2,
            h,
            chol,
        })
    }

    pub fn analytic_value(&self) -> f64 {
        -0.5 * self.slack.iter().map(|s| s.ln()).sum::<f64>()
    }

    pub fn analytic_gradient(&self) -> DVector<f64> {
        self.a.row_sum().transpose()
    }

    pub fn volumetric_value(&self) -> f64 {
        logdet(&self.chol)
    }
}

/// Intermediate products of the volumetric derivatives.
struct VolumetricParts {
    p: DMatrix<f64>,
    tau: f64,
    w: DVector<f64>,
    ap: DMatrix<f64>,
    sigma: DVector<f64>,
    gradient: DVector<f64>,
}

fn volumetric_parts(ws: &BarrierWorkspace) -> VolumetricParts {
    // H = BᵀB with B = [√2 A; √λ₁ I]. Leverages from the orthogonal factor of B
    // stay accurate when H is badly conditioned.
    let (k, m) = ws.a.shape();
    let mut b = DMatrix::zeros(k + m, m);
    b.rows_mut(0, k).copy_from(&(&ws.a * std::f64::consts::SQRT_2));
    b.rows_mut(k, m).fill_diagonal(ws.lambda1.sqrt());
    let qr = b.qr();
    let q = qr.q();
    let r_inv = qr
        .r()
        .solve_upper_triangular(&DMatrix::identity(m, m))
        .expect("the identity block keeps B at full column rank");
    let p = &r_inv * r_inv.transpose();
    let tau = r_inv.norm_squared();
    let w = ws.a.transpose() * &ws.d;
    let ap = &ws.a * &p;
    let sigma = DVector::from_fn(k, |i, _| 0.5 * q.row(i).norm_squared());
    let pw = &p * &w;
    let gradient = &w * (2.0 * tau) + pw * 4.0 + ws.a.transpose() * &sigma * 8.0;
    VolumetricParts {
        p,
        tau,
        w,
        ap,
        sigma,
        gradient,
    }
}

/// `Aᵀ diag(v) A`.
fn weighted_gram(a: &DMatrix<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = a.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row *= v[i];
    }
    a.transpose() * scaled
}

fn volumetric_hessian_from(ws: &BarrierWorkspace, vp: &VolumetricParts) -> DMatrix<f64> {
    let a = &ws.a;
    let m = a.ncols();
    let p = &vp.p;
    let w = &vp.w;
    let psi = &vp.ap * a.transpose();
    let psi2 = psi.component_mul(&psi);
    let rho = DVector::from_fn(a.nrows(), |i, _| vp.ap.row(i).norm_squared());
    let eta = &vp.ap * w;
    let z = p * w;
    let p2w = p * &z;
    let tr_p2 = p.norm_squared();

    let ada = weighted_gram(a, &ws.d);
    let asa = weighted_gram(a, &vp.sigma);
    let aea = weighted_gram(a, &eta);
    let apsi2a = a.transpose() * &psi2 * a;
    let a_rho = a.transpose() * &rho;

    let mut hv = asa * 48.0 - apsi2a * 64.0;
    hv += DMatrix::identity(m, m) * (8.0 * ws.d.dot(&vp.sigma) + 2.0 * ws.lambda2 * vp.tau);
    hv += p * (4.0 * ws.lambda2);
    hv += &ada * (8.0 * vp.tau);
    hv += sym(&(&ada * p)) * 16.0;
    hv -= (w * w.transpose()) * (4.0 * tr_p2);
    hv -= (&z * z.transpose()) * 8.0;
    hv -= (w * p2w.transpose() + &p2w * w.transpose()) * 8.0;
    hv -= p * (8.0 * w.dot(&z));
    hv -= (&a_rho * w.transpose() + w * a_rho.transpose()) * 16.0;
    hv -= sym(&(aea * p)) * 32.0;
    symmetrize(&hv)
}

pub fn analytic_value(balls: &[Ball], x: &DVector<f64>) -> Result<f64> {
    Ok(BarrierWorkspace::new(balls, x)?.analytic_value())
}

pub fn analytic_grad_hess(balls: &[Ball], x: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let ws = BarrierWorkspace::new(balls, x)?;
    Ok((ws.analytic_gradient(), ws.h.clone()))
}

pub fn volumetric_value(balls: &[Ball], x: &DVector<f64>) -> Result<f64> {
    Ok(BarrierWorkspace::new(balls, x)?.volumetric_value())
}

pub fn volumetric_grad(balls: &[Ball], x: &DVector<f64>) -> Result<DVector<f64>> {
    let ws = BarrierWorkspace::new(balls, x)?;
    Ok(volumetric_parts(&ws).gradient)
}

pub fn volumetric_hess(balls: &[Ball], x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let ws = BarrierWorkspace::new(balls, x)?;
    let vp = volumetric_parts(&ws);
    Ok(volumetric_hessian_from(&ws, &vp))
}

/// A finite-difference step that keeps `x ± h e_j` well inside every ball.
pub fn safe_fd_step(balls: &[Ball], x: &DVector<f64>) -> f64 {
    balls
        .iter()
        .map(|b| {
            let s = b.slack(x);
            s / (2.0 * b.radius_sq.sqrt() + 1e-300)
        })
        .fold(f64::INFINITY, f64::min)
        * 1e-4
}

/// Central-difference Jacobian of `grad` (symmetrized).
pub fn fd_hessian<F>(x: &DVector<f64>, h: f64, grad: F) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let m = x.len();
    let mut out = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (grad(&xp)? - grad(&xm)?) / (2.0 * h);
        out.set_column(j, &col);
    }
    Ok(symmetrize(&out))
}

/// True when `x` keeps every slack above its rounding floor.
pub fn is_strictly_interior(balls: &[Ball], x: &DVector<f64>) -> bool {
    x.iter().all(|v| v.is_finite())
        && balls.iter().all(|b| {
            let (s, scale) = b.slack_with_scale(x);
            s > SLACK_FLOOR * scale
        })
}

/// Move `from` along the segment towards the strictly interior point `to` until
/// it is strictly interior: bisection locates the entry point, then the start is
/// placed halfway between it and `to`.
pub fn repair_start(balls: &[Ball], from: &DVector<f64>, to: &DVector<f64>) -> DVector<f64> {
    if is_strictly_interior(balls, from) {
        return from.clone();
    }
    let point = |t: f64| from + (to - from) * t;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if is_strictly_interior(balls, &point(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    point(0.5 * (hi + 1.0))
}

struct Evaluation {
    value: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

fn evaluate(balls: &[Ball], x: &DVector<f64>, kind: CenterKind) -> Result<Evaluation> {
    let ws = BarrierWorkspace::new(balls, x)?;
    Ok(match kind {
        CenterKind::Analytic => Evaluation {
            value: ws.analytic_value(),
            gradient: ws.analytic_gradient(),
            hessian: ws.h.clone(),
        },
        CenterKind::Volumetric => {
            let vp = volumetric_parts(&ws);
            let hessian = volumetric_hessian_from(&ws, &vp);
            Evaluation {
                value: ws.volumetric_value(),
                gradient: vp.gradient,
                hessian,
            }
        }
    })
}

fn barrier_value(balls: &[Ball], x: &DVector<f64>, kind: CenterKind) -> Result<f64> {
    let ws = BarrierWorkspace::new(balls, x)?;
    Ok(match kind {
        CenterKind::Analytic => ws.analytic_value(),
        CenterKind::Volumetric => ws.volumetric_value(),
    })
}

/// Damped Newton minimization of the analytic or volumetric barrier.
///
/// Starts at `warm` when it is strictly interior, otherwise at the deepest
/// point of the region. Steps are halved until the iterate keeps the slack
/// floor and the barrier decreases; once the decrement is below 1/4 with a
/// positive definite Hessian, full steps are taken.
pub fn newton_center(
    balls: &[Ball],
    kind: CenterKind,
    warm: Option<&DVector<f64>>,
    options: CenterOptions,
) -> Result<CenterResult> {
    if balls.is_empty() {
        return Err(Error::Centering("region has no balls".into()));
    }
    let start = match warm {
        Some(w) if is_strictly_interior(balls, w) => w.clone(),
        _ => {
            let region = crate::region::BallRegion {
                balls: balls.to_vec(),
                alpha: f64::NAN,
                fval: f64::NAN,
            };
            match deepest_point(&region) {
                Some(z) if is_strictly_interior(balls, &z) => z,
                _ => return Err(Error::Centering("no strictly interior starting point".into())),
            }
        }
    };

    // Work in coordinates centered at the start point.
    let shifted: Vec<Ball> = balls.iter().map(|b| b.translated(&start)).collect();
    let mut x = DVector::zeros(start.len());
    let mut iterations = 0;
    let mut fd_fallbacks = 0;
    let mut decrement;

    loop {
        let mut eval = evaluate(&shifted, &x, kind)?;
        if options.verify_hessian && kind == CenterKind::Volumetric {
            let h = safe_fd_step(&shifted, &x);
            let fd = fd_hessian(&x, h, |p| volumetric_grad(&shifted, p))?;
            let err = (&fd - &eval.hessian).norm() / fd.norm().max(f64::MIN_POSITIVE);
            if err > 1e-3 {
                log::warn!("volumetric Hessian disagrees with finite differences ({err:e}); using the latter");
                eval.hessian = fd;
                fd_fallbacks += 1;
            }
        }
        let (chol, shift) = modified_cholesky(&eval.hessian);
        let step = -chol.solve(&eval.gradient);
        decrement = (-eval.gradient.dot(&step)).max(0.0).sqrt();
        if decrement <= options.tol || iterations >= options.max_iterations {
            break;
        }

        let quadratic_phase = decrement < 0.25 && shift == 0.0;
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-16 {
            let candidate = &x + &step * t;
            if is_strictly_interior(&shifted, &candidate) {
                if quadratic_phase {
                    accepted = Some(candidate);
                    break;
                }
                match barrier_value(&shifted, &candidate, kind) {
                    Ok(v) if v < eval.value => {
                        accepted = Some(candidate);
                        break;
                    }
                    _ => {}
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some(next) => {
                x = next;
                iterations += 1;
            }
            None => break,
        }
    }

    Ok(CenterResult {
        center: x + start,
        newton_iterations: iterations,
        final_decrement: decrement,
        kind,
        converged: decrement <= options.tol,
        fd_fallbacks,
    })
}
