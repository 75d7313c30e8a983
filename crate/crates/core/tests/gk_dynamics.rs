use nalgebra::DVector;
use politician::methods::{GeometricPolitician, GkStep, GonzagaKaras};
use politician::problems::QuadraticProblem;
use politician::{run, OraclePolitician, Politician, RunOptions};

fn gk_steps(oracle_mode: bool, politician: &mut dyn Politician, seed: u64) -> (Vec<GkStep>, Vec<f64>) {
    let q = QuadraticProblem::with_condition(30, 50.0, seed);
    let mut gk = GonzagaKaras::new(oracle_mode);
    let trace = run(&mut gk, politician, &q, &DVector::zeros(30), RunOptions::new(60, 1e-12)).unwrap();
    (gk.steps().to_vec(), trace.values())
}

fn check_dynamics(steps: &[GkStep]) {
    assert!(!steps.is_empty());
    for w in steps.windows(2) {
        assert!(w[1].gamma <= w[0].gamma, "gamma increased: {} -> {}", w[0].gamma, w[1].gamma);
    }
    for s in steps.iter().filter(|s| !s.beta_skipped) {
        assert!(s.beta > 0.0 && s.beta <= 1.0, "beta {}", s.beta);
    }
}

#[test]
fn oracle_mode_dynamics() {
    for seed in 0..4 {
        let (steps, values) = gk_steps(true, &mut OraclePolitician, seed);
        check_dynamics(&steps);
        assert!(values.last().unwrap() < &(1e-3 * values[0]));
    }
}

#[test]
fn politician_mode_never_runs_the_reset() {
    for seed in 0..4 {
        let (steps, _) = gk_steps(false, &mut GeometricPolitician::new(), seed);
        check_dynamics(&steps);
        assert!(steps.iter().all(|s| !s.star_fired));
    }
}
