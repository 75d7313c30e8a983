//! Exact line search along a line or a segment, by bracketing and Brent's method.

use nalgebra::DVector;

use crate::engine::Oracle;
use crate::{Error, Result};

/// Largest step tried while bracketing before the line is declared unbounded.
pub const EXPANSION_CAP: f64 = (1u64 << 60) as f64;

const MAX_BRENT_ITERATIONS: usize = 200;
const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Clone, Debug)]
pub struct LineSearchResult {
    /// Minimizing parameter on `a + t (b - a)`.
    pub t_star: f64,
    pub point: DVector<f64>,
    pub value: f64,
    pub value_evals: usize,
}

/// Value-only restriction of the objective to `a + t (b - a)` that remembers
/// the best evaluated parameter.
struct Restriction<'o, 'a> {
    oracle: &'o Oracle<'a>,
    a: &'o DVector<f64>,
    dir: DVector<f64>,
    evals: usize,
    best_t: f64,
    best_value: f64,
}

impl<'o, 'a> Restriction<'o, 'a> {
    fn new(oracle: &'o Oracle<'a>, a: &'o DVector<f64>, b: &DVector<f64>) -> Self {
        Self {
            oracle,
            a,
            dir: b - a,
            evals: 0,
            best_t: 0.0,
            best_value: f64::INFINITY,
        }
    }

    fn point(&self, t: f64) -> DVector<f64> {
        if t == 0.0 {
            return self.a.clone();
        }
        self.a + &self.dir * t
    }

    fn eval(&mut self, t: f64) -> f64 {
        let v = self.oracle.value(&self.point(t));
        self.evals += 1;
        if v < self.best_value || (v == self.best_value && t.abs() < self.best_t.abs()) {
            self.best_value = v;
            self.best_t = t;
        }
        v
    }

    fn finish(self) -> LineSearchResult {
        LineSearchResult {
            point: self.point(self.best_t),
            t_star: self.best_t,
            value: self.best_value,
            value_evals: self.evals,
        }
    }
}

/// Brent's minimization of `phi` on `[lo, hi]` given an interior point `x`
/// with `phi(x) <= phi(lo), phi(hi)`.
fn brent(phi: &mut Restriction<'_, '_>, mut lo: f64, mut hi: f64, x0: f64, fx0: f64) {
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (fx0, fx0, fx0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..MAX_BRENT_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let tol1 = 4.0 * f64::EPSILON * x.abs() + 1e-20;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(mid - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = phi.eval(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
}

/// Polish the best point with a parabola through a wide symmetric stencil.
///
/// Near the minimizer value differences drown in rounding, which limits
/// value-only searches to about `sqrt(eps)` accuracy in `t`. A stencil of half
/// width `1e-3` of the bracket keeps the differences well above rounding and
/// recovers the exact minimizer of quadratic restrictions. The vertex is kept
/// only if it is no worse than the best point up to a few ulps.
fn polish(phi: &mut Restriction<'_, '_>, lo: f64, hi: f64) {
    let (t0, f0) = (phi.best_t, phi.best_value);
    let h = 1e-3 * (hi - lo);
    if !(h > 0.0) || !f0.is_finite() || t0 - h < lo || t0 + h > hi {
        return;
    }
    let fp = phi.eval(t0 + h);
    let fm = phi.eval(t0 - h);
    let curvature = fp - 2.0 * f0 + fm;
    if !(curvature > 0.0) {
        return;
    }
    let vertex = t0 - 0.5 * h * (fp - fm) / curvature;
    if (vertex - t0).abs() >= h || vertex == t0 {
        return;
    }
    let fv = phi.eval(vertex);
    if fv <= f0 + 4.0 * f64::EPSILON * f0.abs() {
        phi.best_t = vertex;
        phi.best_value = fv;
    }
}

/// Walk `t = sign * 2^j` outward from `t = sign` while the value keeps decreasing.
/// Returns a bracket `(lo, mid, hi)` in increasing order with the best value at `mid`.
fn expand(phi: &mut Restriction<'_, '_>, sign: f64, f_first: f64) -> Result<(f64, f64, f64, f64)> {
    let (mut prev, mut cur) = (0.0, sign);
    let mut f_cur = f_first;
    loop {
        let next = 2.0 * cur;
        if next.abs() > EXPANSION_CAP {
            return Err(Error::LineSearchDivergence { step: cur.abs() });
        }
        let f_next = phi.eval(next);
        if f_next >= f_cur {
            let (lo, hi) = if sign > 0.0 { (prev, next) } else { (next, prev) };
            return Ok((lo, cur, hi, f_cur));
        }
        prev = cur;
        cur = next;
        f_cur = f_next;
    }
}

/// Minimize `f` over the whole line `{a + t (b - a) : t ∈ R}`.
///
/// Returns the best evaluated point, so the value never exceeds `f(a)` or `f(b)`.
/// A line along which `f` decreases past `2^60` steps is reported as divergent.
pub fn exact_line_search(oracle: &Oracle<'_>, a: &DVector<f64>, b: &DVector<f64>) -> Result<LineSearchResult> {
    let mut phi = Restriction::new(oracle, a, b);
    let f0 = phi.eval(0.0);
    if a == b {
        return Ok(phi.finish());
    }
    let f1 = phi.eval(1.0);
    let (lo, mid, hi, fmid) = if f1 <= f0 {
        expand(&mut phi, 1.0, f1)?
    } else {
        let fm = phi.eval(-1.0);
        if fm >= f0 {
            (-1.0, 0.0, 1.0, f0)
        } else {
            expand(&mut phi, -1.0, fm)?
        }
    };
    brent(&mut phi, lo, hi, mid, fmid);
    polish(&mut phi, lo, hi);
    Ok(phi.finish())
}

/// Minimize `f` over the segment `{a + t (b - a) : t ∈ [0, 1]}`.
pub fn segment_line_search(oracle: &Oracle<'_>, a: &DVector<f64>, b: &DVector<f64>) -> LineSearchResult {
    let mut phi = Restriction::new(oracle, a, b);
    let f0 = phi.eval(0.0);
    if a == b {
        return phi.finish();
    }
    let f1 = phi.eval(1.0);
    let fm = phi.eval(0.5);
    let (lo, hi) = if fm <= f0 && fm <= f1 {
        brent(&mut phi, 0.0, 1.0, 0.5, fm);
        (0.0, 1.0)
    } else if f0 <= f1 {
        // The minimum of a convex restriction lies in [0, 1/2].
        let fq = phi.eval(0.25);
        if fq <= f0 {
            brent(&mut phi, 0.0, 0.5, 0.25, fq);
        }
        (0.0, 0.5)
    } else {
        let fq = phi.eval(0.75);
        if fq <= f1 {
            brent(&mut phi, 0.5, 1.0, 0.75, fq);
        }
        (0.5, 1.0)
    };
    polish(&mut phi, lo, hi);
    phi.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Objective;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Quadratic {
        p: DMatrix<f64>,
        q: DVector<f64>,
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.q.len()
        }
        fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
            let px = &self.p * x;
            (0.5 * x.dot(&px) - self.q.dot(x), px - &self.q)
        }
    }

    struct Linear;

    impl Objective for Linear {
        fn dim(&self) -> usize {
            1
        }
        fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
            (x[0], DVector::from_element(1, 1.0))
        }
    }

    fn scalar_square() -> Quadratic {
        Quadratic {
            p: DMatrix::from_element(1, 1, 2.0),
            q: DVector::zeros(1),
        }
    }

    #[test]
    fn symmetric_parabola() {
        let f = scalar_square();
        let oracle = Oracle::new(&f);
        let a = DVector::from_element(1, 1.0);
        let b = DVector::from_element(1, -1.0);
        let r = exact_line_search(&oracle, &a, &b).unwrap();
        assert!(r.point[0].abs() < 1e-12);
        assert!(r.value < 1e-24);
        assert_eq!(oracle.gradient_evals(), 0);
        assert_eq!(oracle.value_evals(), r.value_evals);
    }

    #[test]
    fn degenerate_segment_returns_the_anchor() {
        let f = scalar_square();
        let oracle = Oracle::new(&f);
        let a = DVector::from_element(1, 3.0);
        let r = exact_line_search(&oracle, &a, &a).unwrap();
        assert_eq!(r.point, a);
        assert_eq!(r.value_evals, 1);
        assert_eq!(r.t_star, 0.0);
    }

    #[test]
    fn quadratic_step_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = 6;
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let p = &m * m.transpose() + DMatrix::identity(n, n);
            let q = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let x = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let d = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let t_closed = (&q - &p * &x).dot(&d) / d.dot(&(&p * &d));
            let f = Quadratic { p, q };
            let oracle = Oracle::new(&f);
            let r = exact_line_search(&oracle, &x, &(&x + &d)).unwrap();
            assert!((r.t_star - t_closed).abs() <= 1e-12 * (1.0 + t_closed.abs()), "{} vs {}", r.t_star, t_closed);
        }
    }

    #[test]
    fn never_worse_than_the_anchors() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = scalar_square();
        let oracle = Oracle::new(&f);
        for _ in 0..100 {
            let a = DVector::from_element(1, rng.random_range(-100.0..100.0));
            let b = DVector::from_element(1, rng.random_range(-100.0..100.0));
            let r = exact_line_search(&oracle, &a, &b).unwrap();
            let bound = f.value(&a).min(f.value(&b));
            assert!(r.value <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn unbounded_lines_are_reported() {
        let oracle = Oracle::new(&Linear);
        let a = DVector::from_element(1, 0.0);
        let b = DVector::from_element(1, -1.0);
        assert!(matches!(
            exact_line_search(&oracle, &a, &b),
            Err(Error::LineSearchDivergence { .. })
        ));
    }

    #[test]
    fn segment_search_stays_on_the_segment() {
        let f = scalar_square();
        let oracle = Oracle::new(&f);
        let a = DVector::from_element(1, 1.0);
        let b = DVector::from_element(1, 3.0);
        let r = segment_line_search(&oracle, &a, &b);
        assert_eq!(r.t_star, 0.0);
        let b = DVector::from_element(1, -3.0);
        let r = segment_line_search(&oracle, &a, &b);
        assert!((r.t_star - 0.25).abs() < 1e-10);
    }

    #[test]
    fn minimum_behind_the_anchor_is_found() {
        let f = scalar_square();
        let oracle = Oracle::new(&f);
        let a = DVector::from_element(1, 5.0);
        let b = DVector::from_element(1, 6.0);
        let r = exact_line_search(&oracle, &a, &b).unwrap();
        assert!(r.point[0].abs() < 1e-10);
        assert!((r.t_star + 5.0).abs() < 1e-10);
    }
}
