//! Running a method × problem grid and writing its artifacts.

use std::fs;
use std::path::Path;

use politician::{run, RunOptions, RunTrace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BenchConfig, ProblemInstance, ValidatedConfig};
use crate::profile::{default_grid, performance_profile, MethodCounts, ProfileCurve};
use crate::registry::MethodSpec;
use crate::BenchError;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 7] = ["iter", "f", "gradnorm", "alpha", "grad_evals", "value_evals", "cum_seconds"];

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PROFILE_FILE: &str = "profile.csv";
pub const PLOT_SCRIPT_FILE: &str = "plot_profile.py";

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot the performance profile written next to this script."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "profile.csv")) as fh:
    rows = list(csv.reader(fh))
header, body = rows[0], rows[1:]
x = [float(r[0]) for r in body]
fig, ax = plt.subplots(figsize=(6, 4))
for j, name in enumerate(header[1:], start=1):
    ax.step(x, [float(r[j]) for r in body], where="post", label=name)
ax.set_xlabel("iterations relative to the best method")
ax.set_ylabel("fraction of problems solved")
ax.set_xlim(1, x[-1])
ax.set_ylim(0, 1.02)
ax.legend(loc="lower right")
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "profile.png")
fig.savefig(out, dpi=150)
"#;

/// One run of the grid.
pub struct RunOutcome {
    pub problem: String,
    pub method: MethodSpec,
    /// `Err` holds the message of a non-contract failure.
    pub trace: Result<RunTrace, String>,
    pub iterations_to_target: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub problem: String,
    pub method: String,
    pub politician: String,
    pub csv: Option<String>,
    pub termination: String,
    pub iterations: usize,
    pub gradient_evals: usize,
    pub value_evals: usize,
    pub final_value: Option<f64>,
    pub best_value: Option<f64>,
    pub iterations_to_target: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub csv_columns: Vec<String>,
    pub config_hash: String,
    pub config: BenchConfig,
    pub runs: Vec<RunEntry>,
}

pub struct SuiteReport {
    pub manifest: Manifest,
    pub outcomes: Vec<RunOutcome>,
    pub profile: Vec<ProfileCurve>,
}

/// First iteration at which the run counts as solved: relative accuracy
/// against `f*` when it is known, else the gradient tolerance.
pub fn iterations_to_target(trace: &RunTrace, problem: &ProblemInstance, tol: f64) -> Option<usize> {
    let f0 = trace.steps.first()?.value;
    trace
        .steps
        .iter()
        .find(|s| match problem.f_star {
            Some(f_star) => s.value - f_star <= problem.accuracy * (f0 - f_star),
            None => s.gradient_norm <= tol,
        })
        .map(|s| s.iteration)
}

/// Run one problem with one method.
pub fn execute(problem: &ProblemInstance, method: MethodSpec, budget: usize, tol: f64) -> politician::Result<RunTrace> {
    let mut m = method.build_method();
    let mut p = method.build_politician();
    run(m.as_mut(), p.as_mut(), problem.objective.as_ref(), &problem.x0, RunOptions::new(budget, tol))
}

fn csv_name(problem: &str, method: MethodSpec) -> String {
    format!("{problem}__{}.csv", method.slug())
}

/// Run every (problem, method) pair in parallel. A contract violation aborts
/// the suite; other run failures are recorded in the manifest.
pub fn execute_suite(validated: &ValidatedConfig) -> Result<SuiteReport, BenchError> {
    let config = &validated.config;
    let jobs: Vec<(&ProblemInstance, MethodSpec)> = validated
        .problems
        .iter()
        .flat_map(|p| validated.methods.iter().map(move |&m| (p, m)))
        .collect();
    let results: Vec<(usize, politician::Result<RunTrace>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (problem, method))| {
            log::info!("running {} on {}", method, problem.id);
            (i, execute(problem, *method, config.budget, config.tol))
        })
        .collect();

    let mut outcomes = Vec::with_capacity(jobs.len());
    for ((problem, method), (_, result)) in jobs.iter().zip(results) {
        let trace = match result {
            Ok(trace) => Ok(trace),
            Err(err @ politician::Error::ContractViolation { .. }) => {
                return Err(BenchError::Contract {
                    problem: problem.id.clone(),
                    method: method.to_string(),
                    source: err,
                })
            }
            Err(err) => {
                log::warn!("{} on {} failed: {err}", method, problem.id);
                Err(err.to_string())
            }
        };
        let iterations_to_target = trace
            .as_ref()
            .ok()
            .and_then(|t| iterations_to_target(t, problem, config.tol));
        outcomes.push(RunOutcome {
            problem: problem.id.clone(),
            method: *method,
            trace,
            iterations_to_target,
        });
    }

    let runs = outcomes.iter().map(manifest_entry).collect();
    let counts: Vec<MethodCounts> = validated
        .methods
        .iter()
        .map(|m| MethodCounts {
            method: m.to_string(),
            counts: outcomes
                .iter()
                .filter(|o| o.method == *m)
                .map(|o| o.iterations_to_target)
                .collect(),
        })
        .collect();
    let profile = performance_profile(&counts, &default_grid())?;
    Ok(SuiteReport {
        manifest: Manifest {
            schema_version: SCHEMA_VERSION,
            csv_columns: CSV_COLUMNS.iter().map(|c| c.to_string()).collect(),
            config_hash: config.hash(),
            config: config.clone(),
            runs,
        },
        outcomes,
        profile,
    })
}

fn manifest_entry(o: &RunOutcome) -> RunEntry {
    let (csv, termination, iterations, gradient_evals, value_evals, final_value, best_value) = match &o.trace {
        Ok(t) => {
            let last = t.steps.last();
            (
                Some(csv_name(&o.problem, o.method)),
                t.termination.as_str().to_string(),
                t.steps.len(),
                last.map_or(0, |s| s.gradient_evals),
                last.map_or(0, |s| s.value_evals),
                t.final_value(),
                t.best_value(),
            )
        }
        Err(msg) => (None, format!("error: {msg}"), 0, 0, 0, None, None),
    };
    RunEntry {
        problem: o.problem.clone(),
        method: o.method.to_string(),
        politician: o.method.politician_name().to_string(),
        csv,
        termination,
        iterations,
        gradient_evals,
        value_evals,
        final_value,
        best_value,
        iterations_to_target: o.iterations_to_target,
    }
}

/// Trace as CSV with the columns of [`CSV_COLUMNS`]. Floats use the shortest
/// exact scientific form; a missing alpha is an empty field.
pub fn write_trace_csv(path: &Path, trace: &RunTrace) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for s in &trace.steps {
        w.write_record([
            s.iteration.to_string(),
            format!("{:e}", s.value),
            format!("{:e}", s.gradient_norm),
            s.alpha.map_or(String::new(), |a| format!("{a:e}")),
            s.gradient_evals.to_string(),
            s.value_evals.to_string(),
            format!("{:e}", s.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_profile_csv(path: &Path, profile: &[ProfileCurve]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x".to_string()];
    header.extend(profile.iter().map(|c| c.method.clone()));
    w.write_record(&header)?;
    if let Some(first) = profile.first() {
        for (i, x) in first.x.iter().enumerate() {
            let mut row = vec![format!("{x}")];
            row.extend(profile.iter().map(|c| format!("{}", c.fraction_solved[i])));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write per-run CSVs, the manifest, the profile table and its plotting script into `out`.
pub fn write_artifacts(report: &SuiteReport, out: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(out)?;
    for o in &report.outcomes {
        if let Ok(trace) = &o.trace {
            write_trace_csv(&out.join(csv_name(&o.problem, o.method)), trace)?;
        }
    }
    fs::write(out.join(MANIFEST_FILE), serde_json::to_string_pretty(&report.manifest)? + "\n")?;
    write_profile_csv(&out.join(PROFILE_FILE), &report.profile)?;
    fs::write(out.join(PLOT_SCRIPT_FILE), PLOT_SCRIPT)?;
    Ok(())
}

/// Validate, run and write artifacts to `base/config.out`.
pub fn run_suite(config: &BenchConfig, base: &Path) -> Result<SuiteReport, BenchError> {
    let validated = config.validate(base)?;
    let report = execute_suite(&validated)?;
    write_artifacts(&report, &base.join(&config.out))?;
    Ok(report)
}
