//! The geometric politician.
//!
//! Every past record `(y_i, f_i, g_i)` gives a ball that contains the minimizer
//! of an `alpha`-strongly convex `f`. The politician answers a query `x` with
//! the best point on the line through `x` and the volumetric center of the
//! intersection of those balls. When the intersection is empty the estimate
//! `alpha` was too large and is reset to a quarter of the largest value that
//! keeps it nonempty.
//!
//! All geometry happens in the coordinates of an orthonormal frame spanning
//! the past points and gradients, so the cost per answer is independent of the
//! ambient dimension apart from the frame update.

use nalgebra::DVector;

use super::linesearch::exact_line_search;
use crate::barriers::{
    is_strictly_interior, newton_center, repair_start, CenterKind, CenterOptions, CenterResult,
};
use crate::engine::{FirstOrderRecord, History, Oracle, Politician};
use crate::region::{best_value, build_region, deepest_point, is_nonempty, largest_feasible_alpha, BallRegion};
use crate::subspace::SubspaceBasis;
use crate::{Error, Result};

/// Coordinates the region and its center are computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Frame {
    /// Orthonormal frame spanning past points and gradients.
    #[default]
    Reduced,
    /// The ambient coordinates, shifted to the first point.
    Ambient,
}

/// One centering solve.
#[derive(Clone, Debug)]
pub struct CenteringRecord {
    /// Number of records in the history when the solve ran.
    pub records: usize,
    pub dim: usize,
    pub newton_iterations: usize,
    pub final_decrement: f64,
    pub converged: bool,
    /// Warm-started from the previous center with the same `alpha` and one more ball.
    pub incremental: bool,
}

#[derive(Clone, Debug)]
pub struct PoliticianState {
    /// Current strong-convexity estimate; starts at `+∞` unless configured.
    pub alpha: f64,
    pub restarts: usize,
    /// Last center in reduced coordinates.
    pub cached_center: Option<DVector<f64>>,
    /// Last region, in reduced coordinates relative to the best record at that time.
    pub cached_region: Option<BallRegion>,
}

#[derive(Clone, Debug)]
pub struct GeometricPolitician {
    state: PoliticianState,
    frame: Frame,
    kind: CenterKind,
    center_options: CenterOptions,
    basis: Option<SubspaceBasis>,
    reduced: Vec<FirstOrderRecord>,
    synced: usize,
    centering: Vec<CenteringRecord>,
    fallbacks: usize,
    last_center: Option<DVector<f64>>,
}

impl Default for GeometricPolitician {
    fn default() -> Self {
        Self::new()
    }
}

impl GeometricPolitician {
    pub fn new() -> Self {
        Self {
            state: PoliticianState {
                alpha: f64::INFINITY,
                restarts: 0,
                cached_center: None,
                cached_region: None,
            },
            frame: Frame::Reduced,
            kind: CenterKind::Volumetric,
            center_options: CenterOptions::default(),
            basis: None,
            reduced: Vec::new(),
            synced: 0,
            centering: Vec::new(),
            fallbacks: 0,
            last_center: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        assert!(alpha > 0.0, "alpha must be positive");
        self.state.alpha = alpha;
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_center_kind(mut self, kind: CenterKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_center_options(mut self, options: CenterOptions) -> Self {
        self.center_options = options;
        self
    }

    pub fn state(&self) -> &PoliticianState {
        &self.state
    }

    pub fn centering(&self) -> &[CenteringRecord] {
        &self.centering
    }

    /// Answers that fell back to the best record or the query after a centering failure.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Last center, lifted to the ambient space.
    pub fn last_center(&self) -> Option<&DVector<f64>> {
        self.last_center.as_ref()
    }

    pub fn basis(&self) -> Option<&SubspaceBasis> {
        self.basis.as_ref()
    }

    /// Records in the current reduced coordinates (zero-padded to the frame dimension).
    pub fn reduced_records(&self) -> Vec<FirstOrderRecord> {
        let m = self.basis.as_ref().map_or(0, |b| b.dim());
        self.reduced.iter().map(|r| pad_record(r, m)).collect()
    }

    fn sync(&mut self, history: &History) {
        for rec in &history.records()[self.synced..] {
            let basis = self.basis.get_or_insert_with(|| match self.frame {
                Frame::Reduced => SubspaceBasis::new(rec.point.clone()),
                Frame::Ambient => SubspaceBasis::ambient(rec.point.clone()),
            });
            let shifted = &rec.point - basis.base();
            if shifted.iter().any(|&v| v != 0.0) {
                basis.insert(&shifted);
            }
            basis.insert(&rec.gradient);
            self.reduced.push(FirstOrderRecord {
                point: basis.reduce_direction(&shifted),
                value: rec.value,
                gradient: basis.reduce_direction(&rec.gradient),
            });
        }
        self.synced = history.len();
    }

    /// Nonempty region at the current `alpha`, restarting `alpha` when needed.
    /// Returns the region and whether a restart happened.
    fn region(&mut self, records: &[FirstOrderRecord]) -> Result<(BallRegion, bool)> {
        let fval = best_value(records);
        let alpha = self.state.alpha;
        let nonempty = if alpha.is_infinite() {
            build_region(records, alpha, fval).is_ok()
        } else {
            is_nonempty(records, alpha, fval)
        };
        if nonempty {
            if let Ok(region) = build_region(records, alpha, fval) {
                return Ok((region, false));
            }
        }
        let largest = largest_feasible_alpha(records, fval, alpha);
        let next = (largest / 4.0).min(alpha);
        log::debug!("geometric politician: region empty at alpha {alpha:e}, restarting at {next:e}");
        self.state.alpha = next;
        self.state.restarts += 1;
        Ok((build_region(records, next, fval)?, true))
    }

    /// Center of `region`, which is expressed relative to `anchor` in reduced coordinates.
    fn center(&mut self, region: &BallRegion, anchor: &DVector<f64>, incremental: bool, records: usize) -> Result<CenterResult> {
        let m = region.dim();
        if region.is_point() {
            return Ok(CenterResult {
                center: region.balls[0].center.clone(),
                newton_iterations: 0,
                final_decrement: 0.0,
                kind: self.kind,
                converged: true,
                fd_fallbacks: 0,
            });
        }
        let warm = self.state.cached_center.as_ref().map(|c| pad(c, m) - anchor);
        let start = match warm {
            Some(w) if is_strictly_interior(&region.balls, &w) => Some(w),
            Some(w) => deepest_point(region).map(|z| repair_start(&region.balls, &w, &z)),
            None => None,
        };
        let result = newton_center(&region.balls, self.kind, start.as_ref(), self.center_options)?;
        self.centering.push(CenteringRecord {
            records,
            dim: m,
            newton_iterations: result.newton_iterations,
            final_decrement: result.final_decrement,
            converged: result.converged,
            incremental: incremental && self.state.cached_center.is_some(),
        });
        Ok(result)
    }

    fn fallback(&mut self, query: &DVector<f64>, history: &History, oracle: &Oracle<'_>, err: &Error) -> Result<FirstOrderRecord> {
        log::warn!("geometric politician: centering failed ({err}); answering without it");
        self.fallbacks += 1;
        let fx = oracle.value(query);
        match history.best() {
            Some(best) if best.value <= fx => Ok(best.clone()),
            _ => oracle.evaluate(query),
        }
    }
}

fn pad(v: &DVector<f64>, m: usize) -> DVector<f64> {
    if v.len() == m {
        return v.clone();
    }
    DVector::from_fn(m, |i, _| if i < v.len() { v[i] } else { 0.0 })
}

fn pad_record(r: &FirstOrderRecord, m: usize) -> FirstOrderRecord {
    FirstOrderRecord {
        point: pad(&r.point, m),
        value: r.value,
        gradient: pad(&r.gradient, m),
    }
}

impl Politician for GeometricPolitician {
    fn name(&self) -> String {
        "geometric".into()
    }

    fn alpha(&self) -> Option<f64> {
        Some(self.state.alpha)
    }

    fn answer(&mut self, query: &DVector<f64>, history: &History, oracle: &Oracle<'_>) -> Result<FirstOrderRecord> {
        if history.is_empty() {
            return oracle.evaluate(query);
        }
        let previous_records = self.synced;
        self.sync(history);
        // Regions are built around the best record, where slacks are computed
        // without cancellation.
        let mut records = self.reduced_records();
        let anchor = records
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("history is nonempty")
            .point
            .clone();
        for rec in &mut records {
            rec.point -= &anchor;
        }

        let (region, restarted) = match self.region(&records) {
            Ok(r) => r,
            Err(err) => return self.fallback(query, history, oracle, &err),
        };
        let incremental = !restarted && history.len() == previous_records + 1;
        let center = match self.center(&region, &anchor, incremental, history.len()) {
            Ok(c) => c,
            Err(err) => return self.fallback(query, history, oracle, &err),
        };
        let reduced_center = center.center + &anchor;
        let basis = self.basis.as_ref().expect("frame exists once a record is synced");
        let mut lifted = basis.lift(&reduced_center);
        if region.is_point() && &lifted == query {
            // The limit of the ball centers y - g/alpha approaches y along -g.
            let best = history.best().expect("history is nonempty");
            lifted = &best.point - &best.gradient;
        }
        self.state.cached_center = Some(reduced_center);
        self.state.cached_region = Some(region);
        self.last_center = Some(lifted.clone());

        let ls = exact_line_search(oracle, query, &lifted)?;
        oracle.evaluate(&ls.point)
    }
}
