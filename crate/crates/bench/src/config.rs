//! JSON benchmark configuration and its validation into runnable instances.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use politician::problems::{libsvm, HingeProblem, NesterovVariant, QuadraticProblem};
use politician::Objective;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::registry::MethodSpec;
use crate::BenchError;

/// Target relative accuracy for smooth families.
pub const SMOOTH_ACCURACY: f64 = 1e-6;
/// Target relative accuracy for the non-smooth Nesterov family.
pub const NONSMOOTH_ACCURACY: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        n: usize,
        seed: u64,
        /// Exact condition number; `D ~ U[0, 1]` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
    Nesterov {
        n: usize,
    },
    Hinge {
        n: usize,
        seed: u64,
        t: f64,
        lambda: f64,
    },
    Libsvm {
        path: PathBuf,
        t: f64,
        lambda: f64,
    },
}

impl ProblemSpec {
    pub fn id(&self) -> String {
        match self {
            ProblemSpec::Quadratic { n, seed, kappa: None } => format!("quadratic_n{n}_s{seed}"),
            ProblemSpec::Quadratic { n, seed, kappa: Some(k) } => format!("quadratic_n{n}_s{seed}_k{k}"),
            ProblemSpec::Nesterov { n } => format!("nesterov_n{n}"),
            ProblemSpec::Hinge { n, seed, t, lambda } => format!("hinge_n{n}_s{seed}_t{t}_l{lambda}"),
            ProblemSpec::Libsvm { path, t, lambda } => {
                let stem = path.file_stem().map_or("data".into(), |s| s.to_string_lossy().into_owned());
                format!("libsvm_{stem}_t{t}_l{lambda}")
            }
        }
    }

    fn check(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::Config(format!("{}: {msg}", self.id())));
        match *self {
            ProblemSpec::Quadratic { n, kappa, .. } => {
                if n == 0 {
                    return bad("n must be positive".into());
                }
                if let Some(k) = kappa {
                    if n < 2 || !(k >= 1.0 && k.is_finite()) {
                        return bad("kappa needs n >= 2 and a finite value >= 1".into());
                    }
                }
            }
            ProblemSpec::Nesterov { n } if n == 0 => return bad("n must be positive".into()),
            ProblemSpec::Hinge { n, t, lambda, .. } => {
                if n == 0 {
                    return bad("n must be positive".into());
                }
                check_hinge(t, lambda).or_else(bad)?;
            }
            ProblemSpec::Libsvm { t, lambda, .. } => check_hinge(t, lambda).or_else(bad)?,
            _ => {}
        }
        Ok(())
    }

    /// Build the objective. LIBSVM paths are resolved against `base`.
    pub fn instantiate(&self, base: &Path) -> Result<ProblemInstance, BenchError> {
        self.check()?;
        let (objective, accuracy): (Box<dyn Objective>, f64) = match self {
            ProblemSpec::Quadratic { n, seed, kappa } => {
                let q = match kappa {
                    Some(k) => QuadraticProblem::with_condition(*n, *k, *seed),
                    None => QuadraticProblem::random(*n, *seed),
                };
                (Box::new(q), SMOOTH_ACCURACY)
            }
            ProblemSpec::Nesterov { n } => (Box::new(NesterovVariant::new(*n)), NONSMOOTH_ACCURACY),
            ProblemSpec::Hinge { n, seed, t, lambda } => {
                (Box::new(HingeProblem::synthetic(*n, *seed, *t, *lambda)), SMOOTH_ACCURACY)
            }
            ProblemSpec::Libsvm { path, t, lambda } => {
                let full = base.join(path);
                let file = File::open(&full)
                    .map_err(|e| BenchError::Config(format!("cannot open {}: {e}", full.display())))?;
                let data = libsvm::parse_reader(BufReader::new(file))
                    .map_err(|e| BenchError::Config(format!("{}: {e}", full.display())))?;
                if data.is_empty() {
                    return Err(BenchError::Config(format!("{}: no rows", full.display())));
                }
                (Box::new(HingeProblem::new(data, *t, *lambda)), SMOOTH_ACCURACY)
            }
        };
        let x0 = DVector::zeros(objective.dim());
        let f_star = objective.optimal_value();
        Ok(ProblemInstance {
            id: self.id(),
            objective,
            x0,
            f_star,
            accuracy,
        })
    }
}

fn check_hinge(t: f64, lambda: f64) -> Result<(), String> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(format!("t must lie in (0, 1], got {t}"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(format!("lambda must be finite and nonnegative, got {lambda}"));
    }
    Ok(())
}

pub struct ProblemInstance {
    pub id: String,
    pub objective: Box<dyn Objective>,
    pub x0: DVector<f64>,
    /// Known optimal value, if any.
    pub f_star: Option<f64>,
    /// Relative accuracy that counts as solved when `f_star` is known.
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub problems: Vec<ProblemSpec>,
    pub methods: Vec<String>,
    pub budget: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Overrides the per-family target accuracy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    pub out: PathBuf,
}

fn default_tol() -> f64 {
    1e-10
}

/// A config whose methods parsed and whose problems were all built.
pub struct ValidatedConfig {
    pub config: BenchConfig,
    pub problems: Vec<ProblemInstance>,
    pub methods: Vec<MethodSpec>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    /// Check every field and build every problem. LIBSVM paths are resolved against `base`.
    pub fn validate(&self, base: &Path) -> Result<ValidatedConfig, BenchError> {
        if self.problems.is_empty() {
            return Err(BenchError::Config("no problems".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("no methods".into()));
        }
        if self.budget == 0 {
            return Err(BenchError::Config("budget must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(BenchError::Config(format!("tol must be nonnegative, got {}", self.tol)));
        }
        if let Some(a) = self.accuracy {
            if !(a > 0.0 && a < 1.0) {
                return Err(BenchError::Config(format!("accuracy must lie in (0, 1), got {a}")));
            }
        }
        let methods = self
            .methods
            .iter()
            .map(|m| m.parse::<MethodSpec>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut problems = Vec::with_capacity(self.problems.len());
        for spec in &self.problems {
            let mut instance = spec.instantiate(base)?;
            if let Some(a) = self.accuracy {
                instance.accuracy = a;
            }
            problems.push(instance);
        }
        let mut ids: Vec<&str> = problems.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(BenchError::Config(format!("duplicate problem `{}`", w[0])));
        }
        let mut names: Vec<String> = methods.iter().map(|m| m.to_string()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(BenchError::Config(format!("duplicate method `{}`", w[0])));
        }
        Ok(ValidatedConfig {
            config: self.clone(),
            problems,
            methods,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> &'static str {
        r#"{
            "problems": [
                {"family": "quadratic", "n": 5, "seed": 1},
                {"family": "nesterov", "n": 8},
                {"family": "hinge", "n": 6, "seed": 2, "t": 0.1, "lambda": 1e-3}
            ],
            "methods": ["sd", "bfgs+"],
            "budget": 10,
            "out": "results"
        }"#
    }

    #[test]
    fn parses_and_validates() {
        let c = BenchConfig::from_json(sample()).unwrap();
        assert_eq!(c.tol, 1e-10);
        let v = c.validate(Path::new(".")).unwrap();
        assert_eq!(v.problems.len(), 3);
        assert_eq!(v.problems[1].accuracy, NONSMOOTH_ACCURACY);
        assert_eq!(v.problems[0].f_star, Some(0.0));
        assert_eq!(v.problems[2].f_star, None);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = BenchConfig::from_json(sample()).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        b.budget = 11;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = BenchConfig::from_json(sample()).unwrap();
        c.methods.push("newton".into());
        assert!(matches!(c.validate(Path::new(".")), Err(BenchError::Config(_))));

        let mut c = BenchConfig::from_json(sample()).unwrap();
        c.problems.push(ProblemSpec::Hinge { n: 3, seed: 0, t: 0.0, lambda: 1.0 });
        assert!(matches!(c.validate(Path::new(".")), Err(BenchError::Config(_))));

        let mut c = BenchConfig::from_json(sample()).unwrap();
        c.problems.push(ProblemSpec::Libsvm { path: "missing.svm".into(), t: 0.1, lambda: 1.0 });
        assert!(matches!(c.validate(Path::new(".")), Err(BenchError::Config(_))));

        let mut c = BenchConfig::from_json(sample()).unwrap();
        c.methods.push("sd".into());
        assert!(matches!(c.validate(Path::new(".")), Err(BenchError::Config(_))));

        assert!(BenchConfig::from_json(r#"{"problems": [], "methods": [], "budget": 1, "out": "x", "extra": 1}"#).is_err());
        assert!(BenchConfig::from_json(r#"{"problems": [{"family": "cube", "n": 1}], "methods": ["sd"], "budget": 1, "out": "x"}"#).is_err());
    }
}
