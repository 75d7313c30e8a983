//! Lower-bound balls from strong convexity and their intersection.
//!
//! For an `alpha`-strongly convex `f` and any record `(y, f(y), g)`, the
//! minimizer satisfies
//!
//! ```text
//! ‖x* - (y - g/alpha)‖² <= ‖g‖²/alpha² - (2/alpha)(f(y) - fval)
//! ```
//!
//! with `fval = min_i f(y_i)`. The feasible region is the intersection of these
//! balls. Each constraint can be written `h_i(z) <= 0` with
//! `h_i(z) = f_i + <g_i, z - y_i> + (alpha/2)‖z - y_i‖² - fval = (alpha/2)(‖z - c_i‖² - r_i²)`,
//! so emptiness is decided by the sign of `min_z max_i h_i(z)`.

use nalgebra::{DMatrix, DVector};

use crate::engine::FirstOrderRecord;
use crate::linalg::modified_cholesky;
use crate::subspace::SubspaceBasis;
use crate::{Error, Result};

/// Relative duality gap at which the margin solve stops.
pub const MARGIN_GAP_TOL: f64 = 1e-9;

/// Relative width at which the search for the largest feasible `alpha` stops.
pub const ALPHA_BISECTION_TOL: f64 = 1e-2;

const MARGIN_MAX_STAGES: usize = 40;
const MARGIN_MAX_NEWTON: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: DVector<f64>,
    pub radius_sq: f64,
    /// Slack at the coordinate origin, `r² - ‖c‖²`, kept separately so that it
    /// can be computed without cancellation when the origin is near the region.
    pub origin_slack: f64,
}

impl Ball {
    pub fn new(center: DVector<f64>, radius_sq: f64) -> Self {
        debug_assert!(radius_sq >= 0.0);
        let origin_slack = radius_sq - center.norm_squared();
        Self {
            center,
            radius_sq,
            origin_slack,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `r² - ‖x - c‖²` with a bound on its rounding scale.
    ///
    /// Evaluated either around the center or around the origin, whichever
    /// involves smaller terms.
    pub fn slack_with_scale(&self, x: &DVector<f64>) -> (f64, f64) {
        let around_center = self.radius_sq;
        let cx = self.center.dot(x);
        let x2 = x.norm_squared();
        let around_origin = self.origin_slack.abs() + 2.0 * cx.abs() + x2;
        if around_origin < around_center {
            (self.origin_slack + 2.0 * cx - x2, around_origin)
        } else {
            (self.radius_sq - (x - &self.center).norm_squared(), around_center)
        }
    }

    /// `r² - ‖x - c‖²`; positive strictly inside.
    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.slack_with_scale(x).0
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.slack(x) >= 0.0
    }

    /// The same ball in coordinates whose origin is `point`.
    pub fn translated(&self, point: &DVector<f64>) -> Self {
        Self {
            center: &self.center - point,
            radius_sq: self.radius_sq,
            origin_slack: self.slack(point),
        }
    }
}

/// Intersection of lower-bound balls together with the `alpha` and `fval` that generated it.
#[derive(Clone, Debug)]
pub struct BallRegion {
    pub balls: Vec<Ball>,
    pub alpha: f64,
    pub fval: f64,
}

impl BallRegion {
    pub fn dim(&self) -> usize {
        self.balls.first().map_or(0, Ball::dim)
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.balls.iter().all(|b| b.contains(x))
    }

    /// Smallest slack over all balls.
    pub fn min_slack(&self, x: &DVector<f64>) -> f64 {
        self.balls
            .iter()
            .map(|b| b.slack(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when the region is a single point (the `alpha = ∞` limit).
    pub fn is_point(&self) -> bool {
        self.balls.iter().all(|b| b.radius_sq == 0.0)
    }
}

/// Center and squared radius of the ball implied by one record; the squared
/// radius may be negative, which means the ball is empty.
fn raw_ball(rec: &FirstOrderRecord, alpha: f64, fval: f64) -> (DVector<f64>, f64) {
    let g2 = rec.gradient.norm_squared();
    let center = &rec.point - &rec.gradient / alpha;
    let radius_sq = g2 / (alpha * alpha) - (2.0 / alpha) * (rec.value - fval);
    (center, radius_sq)
}

/// The lower-bound ball of `rec`, or `None` when it is empty.
///
/// `alpha = ∞` is the limit: the ball is the point `{y}` when `f(y) = fval`
/// and empty otherwise.
pub fn ball_from_record(rec: &FirstOrderRecord, alpha: f64, fval: f64) -> Option<Ball> {
    assert!(alpha > 0.0, "alpha must be positive");
    if alpha.is_infinite() {
        return (rec.value == fval).then(|| Ball::new(rec.point.clone(), 0.0));
    }
    let (center, radius_sq) = raw_ball(rec, alpha, fval);
    let origin = DVector::zeros(rec.point.len());
    let origin_slack = -(2.0 / alpha) * constraint_value(rec, alpha, fval, &origin);
    (radius_sq >= 0.0).then_some(Ball {
        center,
        radius_sq,
        origin_slack,
    })
}

/// `h(z) = f(y) + <g, z - y> + (alpha/2)‖z - y‖² - fval`; nonpositive iff `z` is in the ball.
pub fn constraint_value(rec: &FirstOrderRecord, alpha: f64, fval: f64, z: &DVector<f64>) -> f64 {
    let d = z - &rec.point;
    rec.value + rec.gradient.dot(&d) + 0.5 * alpha * d.norm_squared() - fval
}

/// Smallest value among the records.
pub fn best_value(records: &[FirstOrderRecord]) -> f64 {
    records.iter().map(|r| r.value).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SolveMode {
    /// Stop as soon as the sign of the optimum is certified.
    Sign,
    /// Stop at the relative duality gap.
    Full,
}

/// Constraints `h_i(z) = kappa_i + <g_i, z - y_i> + (alpha/2)‖z - y_i‖²` with a
/// shared curvature, stored relative to `origin`.
struct ConstraintFamily {
    origin: DVector<f64>,
    /// Rows `y_i - origin`.
    points: DMatrix<f64>,
    /// Rows `g_i`.
    gradients: DMatrix<f64>,
    offsets: DVector<f64>,
    alpha: f64,
}

/// Outcome of `min_z max_i h_i(z)`.
#[derive(Clone, Debug)]
struct MinMaxSolution {
    /// `max_i h_i(witness)`, an upper bound on the optimum.
    primal: f64,
    /// Dual lower bound on the optimum (`-∞` when not computed).
    dual: f64,
    /// Minimizing point in the caller's coordinates.
    witness: DVector<f64>,
}

impl ConstraintFamily {
    fn from_records(records: &[FirstOrderRecord], alpha: f64, fval: f64) -> Self {
        let best = records
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("need at least one record");
        let origin = best.point.clone();
        let m = origin.len();
        let k = records.len();
        Self {
            points: DMatrix::from_fn(k, m, |i, j| records[i].point[j] - origin[j]),
            gradients: DMatrix::from_fn(k, m, |i, j| records[i].gradient[j]),
            offsets: DVector::from_fn(k, |i, _| records[i].value - fval),
            alpha,
            origin,
        }
    }

    /// Balls as `h_i(z) = -slack_i(z) / 2 = (‖z‖² - 2<c_i, z> - slack_i(0)) / 2`.
    fn from_balls(balls: &[Ball]) -> Self {
        let k = balls.len();
        let m = balls[0].dim();
        Self {
            points: DMatrix::zeros(k, m),
            gradients: DMatrix::from_fn(k, m, |i, j| -balls[i].center[j]),
            offsets: DVector::from_fn(k, |i, _| -0.5 * balls[i].origin_slack),
            alpha: 1.0,
            origin: DVector::zeros(m),
        }
    }

    fn len(&self) -> usize {
        self.offsets.len()
    }

    /// `∇h_i(z)` as rows.
    fn constraint_gradients(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let mut q = self.gradients.clone();
        for (i, mut row) in q.row_iter_mut().enumerate() {
            for j in 0..z.len() {
                row[j] += self.alpha * (z[j] - self.points[(i, j)]);
            }
        }
        q
    }

    fn values(&self, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.len(), |i, _| {
            let mut lin = 0.0;
            let mut sq = 0.0;
            for j in 0..z.len() {
                let d = z[j] - self.points[(i, j)];
                lin += self.gradients[(i, j)] * d;
                sq += d * d;
            }
            self.offsets[i] + lin + 0.5 * self.alpha * sq
        })
    }

    /// `min_z Σ λ_i h_i(z)` for `λ` on the simplex, a lower bound on the min-max value.
    fn dual_bound(&self, lambda: &DVector<f64>) -> f64 {
        let z = (self.points.transpose() * lambda) - (self.gradients.transpose() * lambda) / self.alpha;
        lambda.dot(&self.values(&z))
    }

    /// Typical magnitude of the constraint values.
    fn scale(&self) -> f64 {
        let mut s = self.offsets.amax();
        for i in 0..self.len() {
            s = s.max(self.gradients.row(i).norm_squared() / self.alpha);
            s = s.max(self.alpha * self.points.row(i).norm_squared());
        }
        s.max(f64::MIN_POSITIVE)
    }
}

fn barrier_value(mu: f64, tau: f64, slack: &DVector<f64>) -> f64 {
    mu * tau - slack.iter().map(|s| s.ln()).sum::<f64>()
}

/// Minimize `max_i h_i(z)` by a barrier method on `min τ s.t. h_i(z) <= τ`.
///
/// Each stage centers `μτ - Σ log(τ - h_i(z))` with damped Newton steps, then
/// multiplies `μ` by ten. The normalized barrier multipliers give a dual
/// point, so every stage yields a certified interval for the optimum.
fn min_max(family: &ConstraintFamily, mode: SolveMode) -> MinMaxSolution {
    let k = family.len();
    let m = family.points.ncols();
    let mut z = DVector::zeros(m);
    let h0 = family.values(&z);
    let mut best_upper = h0.max();
    let mut best_z = z.clone();
    let mut best_lower = f64::NEG_INFINITY;
    let finish = |upper: f64, lower: f64, zb: &DVector<f64>| MinMaxSolution {
        primal: upper,
        dual: lower.min(upper),
        witness: zb + &family.origin,
    };
    if mode == SolveMode::Sign && best_upper < 0.0 {
        return finish(best_upper, best_lower, &best_z);
    }

    let scale = family.scale();
    let abs_tol = 1e-15 * scale;
    let mut tau = best_upper + best_upper.abs().max(scale);
    let mut slack = DVector::from_element(k, tau) - &h0;
    let mut mu = slack.map(|s| 1.0 / s).sum();

    for _stage in 0..MARGIN_MAX_STAGES {
        for _ in 0..MARGIN_MAX_NEWTON {
            let inv = slack.map(|s| 1.0 / s);
            let inv_sum = inv.sum();
            let q = family.constraint_gradients(&z);
            let mut weighted = q.clone();
            for (i, mut row) in weighted.row_iter_mut().enumerate() {
                row *= inv[i];
            }
            let mut hess = DMatrix::zeros(m + 1, m + 1);
            let hzz = weighted.transpose() * &weighted + DMatrix::identity(m, m) * (family.alpha * inv_sum);
            hess.view_mut((0, 0), (m, m)).copy_from(&hzz);
            let inv_sq = inv.component_mul(&inv);
            let hzt = -(q.transpose() * &inv_sq);
            hess.view_mut((0, m), (m, 1)).copy_from(&hzt);
            hess.view_mut((m, 0), (1, m)).copy_from(&hzt.transpose());
            hess[(m, m)] = inv_sq.sum();
            let mut grad = DVector::zeros(m + 1);
            grad.rows_mut(0, m).copy_from(&(q.transpose() * &inv));
            grad[m] = mu - inv_sum;

            let (chol, _) = modified_cholesky(&hess);
            let step = -chol.solve(&grad);
            let slope = grad.dot(&step);
            if -slope <= 1e-10 {
                break;
            }
            let phi = barrier_value(mu, tau, &slack);
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-12 {
                let zn = &z + step.rows(0, m) * t;
                let taun = tau + step[m] * t;
                let sn = DVector::from_element(k, taun) - family.values(&zn);
                if sn.iter().all(|&s| s > 0.0) && barrier_value(mu, taun, &sn) <= phi + 0.25 * t * slope {
                    z = zn;
                    tau = taun;
                    slack = sn;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        let upper = (DVector::from_element(k, tau) - &slack).max();
        if upper < best_upper {
            best_upper = upper;
            best_z = z.clone();
        }
        let inv = slack.map(|s| 1.0 / s);
        best_lower = best_lower.max(family.dual_bound(&(&inv / inv.sum())));

        let decided = match mode {
            SolveMode::Sign => best_upper < 0.0 || best_lower > 0.0,
            SolveMode::Full => false,
        };
        let gap_ok = best_upper - best_lower <= MARGIN_GAP_TOL * best_upper.abs().max(best_lower.abs()) + abs_tol;
        if decided || gap_ok {
            break;
        }
        mu *= 10.0;
    }
    finish(best_upper, best_lower, &best_z)
}

/// Emptiness certificate for a region.
#[derive(Clone, Debug)]
pub struct Margin {
    /// `min_z max_i h_i(z)` as attained at `witness`; `<= 0` iff the region is nonempty.
    pub margin: f64,
    /// Lower bound from the dual; `margin - lower_bound` is the remaining gap.
    pub lower_bound: f64,
    pub witness: DVector<f64>,
}

/// `min_z max_i h_i(z)` with a witness attaining it.
pub fn feasibility_margin(records: &[FirstOrderRecord], alpha: f64, fval: f64) -> Margin {
    assert!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive and finite");
    assert!(!records.is_empty(), "need at least one record");
    let sol = min_max(&ConstraintFamily::from_records(records, alpha, fval), SolveMode::Full);
    Margin {
        margin: sol.primal,
        lower_bound: sol.dual,
        witness: sol.witness,
    }
}

/// Sign of the region margin, decided as cheaply as possible.
#[derive(Clone, Debug)]
pub enum Feasibility {
    /// A strictly interior point was found.
    Interior(DVector<f64>),
    /// The region is certified empty (or has no interior).
    Empty,
}

/// Decide whether the balls have a common strictly interior point.
///
/// An undecided solve is reported as `Empty`.
pub fn interior_point(balls: &[Ball]) -> Feasibility {
    if balls.iter().any(|b| b.radius_sq <= 0.0) {
        return Feasibility::Empty;
    }
    let sol = min_max(&ConstraintFamily::from_balls(balls), SolveMode::Sign);
    if sol.primal < 0.0 {
        Feasibility::Interior(sol.witness)
    } else {
        Feasibility::Empty
    }
}

/// The point maximizing the smallest slack `r_i² - ‖z - c_i‖²`, when it is
/// strictly interior.
pub fn deepest_point(region: &BallRegion) -> Option<DVector<f64>> {
    let sol = min_max(&ConstraintFamily::from_balls(&region.balls), SolveMode::Full);
    (sol.primal < 0.0).then_some(sol.witness)
}

/// Whether `R(alpha)` is nonempty, decided by the sign of the emptiness margin.
/// An undecided solve counts as empty.
pub fn is_nonempty(records: &[FirstOrderRecord], alpha: f64, fval: f64) -> bool {
    if alpha.is_infinite() {
        return feasible_at_infinity(records, fval);
    }
    if records
        .iter()
        .any(|r| r.gradient.norm_squared() / (alpha * alpha) - (2.0 / alpha) * (r.value - fval) < 0.0)
    {
        return false;
    }
    let sol = min_max(&ConstraintFamily::from_records(records, alpha, fval), SolveMode::Sign);
    sol.primal <= 0.0
}

/// At `alpha = ∞` every ball is a point or empty; the intersection is nonempty
/// only when all records sit at `fval` on the same point.
fn feasible_at_infinity(records: &[FirstOrderRecord], fval: f64) -> bool {
    let first = &records[0].point;
    records
        .iter()
        .all(|r| r.value == fval && &r.point == first)
}

/// Largest `alpha` (up to a relative width of 1e-2, capped by `alpha_hi`) for
/// which the region is nonempty.
pub fn largest_feasible_alpha(records: &[FirstOrderRecord], fval: f64, alpha_hi: f64) -> f64 {
    assert!(alpha_hi > 0.0, "alpha_hi must be positive");
    if records.is_empty() {
        return alpha_hi;
    }
    // A record above fval has an empty ball once alpha exceeds ‖g‖²/(2(f - fval)).
    let mut hi = records
        .iter()
        .filter(|r| r.value > fval)
        .map(|r| r.gradient.norm_squared() / (2.0 * (r.value - fval)))
        .fold(alpha_hi, f64::min);

    if hi.is_infinite() {
        if feasible_at_infinity(records, fval) {
            return alpha_hi;
        }
        let mut a = curvature_scale(records);
        let mut found = false;
        for _ in 0..200 {
            if !is_nonempty(records, a, fval) {
                found = true;
                break;
            }
            a *= 2.0;
        }
        if !found {
            return alpha_hi;
        }
        hi = a;
    }

    if is_nonempty(records, hi, fval) {
        return hi;
    }
    let mut lo = hi;
    let mut found = false;
    for _ in 0..400 {
        lo *= 0.5;
        if lo == 0.0 {
            break;
        }
        if is_nonempty(records, lo, fval) {
            found = true;
            break;
        }
        hi = lo;
    }
    if !found {
        log::warn!("no feasible alpha found down to {lo:e}");
        return lo.max(f64::MIN_POSITIVE);
    }
    while hi > lo * (1.0 + ALPHA_BISECTION_TOL) {
        let mid = (lo * hi).sqrt();
        if is_nonempty(records, mid, fval) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest secant curvature `‖g_i - g_j‖ / ‖y_i - y_j‖`, a starting scale for `alpha`.
fn curvature_scale(records: &[FirstOrderRecord]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            let dy = (&a.point - &b.point).norm();
            if dy > 0.0 {
                best = best.max((&a.gradient - &b.gradient).norm() / dy);
            }
        }
    }
    if best > 0.0 && best.is_finite() {
        best
    } else {
        1.0
    }
}

/// Build `R_k(alpha)` from records expressed in the coordinates the caller works in.
pub fn build_region(records: &[FirstOrderRecord], alpha: f64, fval: f64) -> Result<BallRegion> {
    let mut balls = Vec::with_capacity(records.len());
    for rec in records {
        match ball_from_record(rec, alpha, fval) {
            Some(b) => balls.push(b),
            None => return Err(Error::EmptyRegion { alpha }),
        }
    }
    if alpha.is_infinite() && !feasible_at_infinity(records, fval) {
        return Err(Error::EmptyRegion { alpha });
    }
    Ok(BallRegion { balls, alpha, fval })
}

/// Express ambient records in the reduced coordinates of `basis`.
pub fn reduce_records(
    records: &[FirstOrderRecord],
    basis: &SubspaceBasis,
) -> Result<Vec<FirstOrderRecord>> {
    records
        .iter()
        .map(|r| {
            Ok(FirstOrderRecord {
                point: basis.reduce(&r.point)?,
                value: r.value,
                gradient: basis.reduce_direction(&r.gradient),
            })
        })
        .collect()
}

/// `build_region` in the reduced frame of `basis`.
pub fn build_region_reduced(
    records: &[FirstOrderRecord],
    alpha: f64,
    fval: f64,
    basis: &SubspaceBasis,
) -> Result<BallRegion> {
    build_region(&reduce_records(records, basis)?, alpha, fval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec1(y: f64, f: f64, g: f64) -> FirstOrderRecord {
        FirstOrderRecord::new(DVector::from_element(1, y), f, DVector::from_element(1, g)).unwrap()
    }

    /// Record of `Σ a_j (x_j - c_j)²` at `x`.
    fn quad_record(a: &[f64], c: &[f64], x: &DVector<f64>) -> FirstOrderRecord {
        let f = (0..a.len()).map(|j| a[j] * (x[j] - c[j]).powi(2)).sum();
        let g = DVector::from_fn(a.len(), |j, _| 2.0 * a[j] * (x[j] - c[j]));
        FirstOrderRecord::new(x.clone(), f, g).unwrap()
    }

    /// Interval intersection of 1-D balls: nonempty iff max(lo) <= min(hi).
    fn interval_margin(balls: &[(f64, f64)]) -> (f64, f64) {
        let lo = balls.iter().map(|(c, r)| c - r).fold(f64::NEG_INFINITY, f64::max);
        let hi = balls.iter().map(|(c, r)| c + r).fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    #[test]
    fn ball_of_square_at_one() {
        let b = ball_from_record(&rec1(1.0, 1.0, 2.0), 2.0, 1.0).unwrap();
        assert_eq!(b.center[0], 0.0);
        assert_eq!(b.radius_sq, 1.0);
        assert!(b.contains(&DVector::zeros(1)));
    }

    #[test]
    fn query_point_is_on_the_boundary_when_fval_is_its_value() {
        let r = FirstOrderRecord::new(
            DVector::from_vec(vec![0.5, -1.0]),
            3.0,
            DVector::from_vec(vec![1.5, 2.0]),
        )
        .unwrap();
        let b = ball_from_record(&r, 0.7, 3.0).unwrap();
        let d2 = (&r.point - &b.center).norm_squared();
        assert!((d2 - b.radius_sq).abs() < 1e-12 * b.radius_sq);
        assert!((b.radius_sq - r.gradient.norm_squared() / 0.49).abs() < 1e-12);
    }

    #[test]
    fn too_large_alpha_gives_empty_ball() {
        // radius² = 4/100 - (2/10)·1 = -0.16
        let (_, r2) = raw_ball(&rec1(1.0, 1.0, 2.0), 10.0, 0.0);
        assert!((r2 + 0.16).abs() < 1e-15);
        assert!(ball_from_record(&rec1(1.0, 1.0, 2.0), 10.0, 0.0).is_none());
    }

    #[test]
    fn infinite_alpha_limit() {
        let r = rec1(2.0, 1.0, 3.0);
        let b = ball_from_record(&r, f64::INFINITY, 1.0).unwrap();
        assert_eq!(b.center[0], 2.0);
        assert_eq!(b.radius_sq, 0.0);
        assert!(ball_from_record(&r, f64::INFINITY, 0.5).is_none());
    }

    #[test]
    fn single_record_margin_is_the_unconstrained_minimum() {
        let r = FirstOrderRecord::new(
            DVector::from_vec(vec![1.0, 2.0]),
            5.0,
            DVector::from_vec(vec![3.0, -4.0]),
        )
        .unwrap();
        let m = feasibility_margin(std::slice::from_ref(&r), 2.0, 5.0);
        assert!((m.margin + 25.0 / 4.0).abs() < 1e-12);
        let expected = &r.point - &r.gradient / 2.0;
        assert!((m.witness - expected).norm() < 1e-12);
    }

    /// Records whose balls are the given 1-D intervals (center c, radius r) with fval = f = 0:
    /// y = c + r, g = alpha·r with alpha = 1.
    fn interval_record(c: f64, r: f64) -> FirstOrderRecord {
        rec1(c + r, 0.0, r)
    }

    #[test]
    fn overlapping_intervals_are_feasible() {
        let recs = vec![interval_record(0.0, 1.0), interval_record(1.5, 1.0)];
        let m = feasibility_margin(&recs, 1.0, 0.0);
        assert!(m.margin <= 0.0);
        assert!(m.witness[0] >= 0.5 - 1e-8 && m.witness[0] <= 1.0 + 1e-8);
        let (lo, hi) = interval_margin(&[(0.0, 1.0), (1.5, 1.0)]);
        assert!(lo <= hi);
    }

    #[test]
    fn disjoint_intervals_are_infeasible() {
        let recs = vec![interval_record(-0.5, 0.5), interval_record(1.5, 0.5)];
        let m = feasibility_margin(&recs, 1.0, 0.0);
        assert!(m.margin > 0.0);
        assert!(m.lower_bound > 0.0);
    }

    #[test]
    fn margin_matches_brute_force_in_one_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let k = rng.random_range(1..6);
            let recs: Vec<FirstOrderRecord> = (0..k)
                .map(|_| {
                    rec1(
                        rng.random_range(-2.0..2.0),
                        rng.random_range(0.0..1.0),
                        rng.random_range(-2.0..2.0),
                    )
                })
                .collect();
            let fval = best_value(&recs);
            let alpha = rng.random_range(0.2..3.0);
            let m = feasibility_margin(&recs, alpha, fval);
            // The minimum of a max of 1-D quadratics sits at a vertex or at a crossing.
            let h = |z: f64| {
                let z = DVector::from_element(1, z);
                recs.iter()
                    .map(|r| constraint_value(r, alpha, fval, &z))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let mut candidates: Vec<f64> = recs.iter().map(|r| r.point[0] - r.gradient[0] / alpha).collect();
            for (i, a) in recs.iter().enumerate() {
                for b in &recs[i + 1..] {
                    // h_a - h_b is affine in z (same curvature)
                    let (ya, yb) = (a.point[0], b.point[0]);
                    let slope = a.gradient[0] - b.gradient[0] - alpha * (ya - yb);
                    let at_zero = a.value - b.value - a.gradient[0] * ya + b.gradient[0] * yb
                        + 0.5 * alpha * (ya * ya - yb * yb);
                    if slope != 0.0 {
                        candidates.push(-at_zero / slope);
                    }
                }
            }
            let brute = candidates.into_iter().map(h).fold(f64::INFINITY, f64::min);
            assert!(m.margin <= brute + 1e-8, "margin {} vs brute {}", m.margin, brute);
            assert!(m.margin >= brute - 1e-6, "margin {} vs brute {}", m.margin, brute);
        }
    }

    #[test]
    fn symmetric_square_records_give_alpha_four() {
        let recs = vec![rec1(1.0, 1.0, 2.0), rec1(-1.0, 1.0, -2.0)];
        let a = largest_feasible_alpha(&recs, 1.0, f64::INFINITY);
        assert!(a <= 4.0 && a >= 4.0 / (1.0 + ALPHA_BISECTION_TOL), "alpha = {a}");
        assert!(is_nonempty(&recs, a, 1.0));
        assert!(!is_nonempty(&recs, a * (1.0 + ALPHA_BISECTION_TOL), 1.0));
    }

    #[test]
    fn duplicate_records_accept_any_alpha() {
        let r = rec1(1.0, 1.0, 2.0);
        let recs = vec![r.clone(), r];
        assert_eq!(largest_feasible_alpha(&recs, 1.0, 7.5), 7.5);
        assert_eq!(largest_feasible_alpha(&recs, 1.0, f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn largest_alpha_dominates_true_strong_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 6;
        for _ in 0..10 {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let recs: Vec<FirstOrderRecord> = (0..5)
                .map(|_| quad_record(&a, &c, &DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0))))
                .collect();
            let fval = best_value(&recs);
            let alpha_true = 2.0 * a.iter().cloned().fold(f64::INFINITY, f64::min);
            let hat = largest_feasible_alpha(&recs, fval, f64::INFINITY);
            assert!(hat >= alpha_true * (1.0 - 1e-12), "{hat} < {alpha_true}");
        }
    }

    #[test]
    fn minimizer_is_inside_the_region_at_true_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 8;
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let recs: Vec<FirstOrderRecord> = (0..5)
            .map(|_| quad_record(&a, &c, &DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0))))
            .collect();
        let fval = best_value(&recs);
        let alpha = 2.0 * a.iter().cloned().fold(f64::INFINITY, f64::min);
        let region = build_region(&recs, alpha, fval).unwrap();
        let xstar = DVector::from_vec(c.clone());
        for r in &recs {
            assert!(constraint_value(r, alpha, fval, &xstar) <= 1e-9);
        }
        assert!(region.min_slack(&xstar) >= -1e-9);
    }

    #[test]
    fn margin_is_monotone_in_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 4;
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let recs: Vec<FirstOrderRecord> = (0..6)
            .map(|_| quad_record(&a, &c, &DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0))))
            .collect();
        let fval = best_value(&recs);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..30 {
            let alpha = 0.01 * 1.3f64.powi(i);
            let m = feasibility_margin(&recs, alpha, fval).margin;
            assert!(m >= prev - 1e-8 * (1.0 + prev.abs()), "alpha {alpha}: {m} < {prev}");
            prev = m;
        }
    }

    #[test]
    fn small_alpha_tends_to_a_halfspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let r = FirstOrderRecord::new(
            DVector::from_vec(vec![0.3, -0.2, 1.0]),
            2.0,
            DVector::from_vec(vec![1.0, 0.5, -0.25]),
        )
        .unwrap();
        let alpha = 1e-8;
        for _ in 0..200 {
            let z = DVector::from_fn(3, |_, _| rng.random_range(-5.0..5.0));
            let lin = r.gradient.dot(&(&z - &r.point));
            if lin.abs() < 1e-6 {
                continue;
            }
            let inside = constraint_value(&r, alpha, 2.0, &z) <= 0.0;
            assert_eq!(inside, lin <= 0.0);
        }
    }

    #[test]
    fn ball_membership_agrees_with_constraint_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = 3;
            let r = FirstOrderRecord::new(
                DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)),
                rng.random_range(0.0..2.0),
                DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)),
            )
            .unwrap();
            let fval = r.value - rng.random_range(0.0..0.2);
            let alpha = rng.random_range(0.1..2.0);
            let Some(ball) = ball_from_record(&r, alpha, fval) else { continue };
            let z = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
            let h = constraint_value(&r, alpha, fval, &z);
            assert!((h + 0.5 * alpha * ball.slack(&z)).abs() < 1e-10);
        }
    }

    #[test]
    fn build_region_infinite_alpha_single_record() {
        let r = rec1(2.0, 1.0, 3.0);
        let region = build_region(std::slice::from_ref(&r), f64::INFINITY, 1.0).unwrap();
        assert!(region.is_point());
        assert_eq!(region.balls[0].center[0], 2.0);
        let region = build_region(std::slice::from_ref(&r), 4.0, 1.0).unwrap();
        assert_eq!(region.balls[0].center[0], 2.0 - 3.0 / 4.0);
    }

    #[test]
    fn build_region_rejects_infeasible_alpha() {
        let recs = vec![rec1(1.0, 1.0, 2.0), rec1(0.0, 0.5, 0.0)];
        assert!(matches!(
            build_region(&recs, 10.0, 0.5),
            Err(Error::EmptyRegion { .. })
        ));
    }
}
