//! Method names: a base method, plus a trailing `+` when the geometric politician is attached.

use std::fmt;
use std::str::FromStr;

use politician::methods::{Bfgs, ConjugateGradient, EmptyMethod, GeometricPolitician, GonzagaKaras, SteepestDescent};
use politician::{Method, OraclePolitician, Politician};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseMethod {
    Sd,
    Cg,
    Gk,
    Bfgs,
    Empty,
}

impl BaseMethod {
    pub const ALL: [BaseMethod; 5] = [BaseMethod::Sd, BaseMethod::Cg, BaseMethod::Gk, BaseMethod::Bfgs, BaseMethod::Empty];

    pub fn name(self) -> &'static str {
        match self {
            BaseMethod::Sd => "sd",
            BaseMethod::Cg => "cg",
            BaseMethod::Gk => "gk",
            BaseMethod::Bfgs => "bfgs",
            BaseMethod::Empty => "empty",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    pub base: BaseMethod,
    pub geometric: bool,
}

impl MethodSpec {
    /// Every registered name, oracle variants first.
    pub fn all() -> Vec<MethodSpec> {
        [false, true]
            .into_iter()
            .flat_map(|geometric| BaseMethod::ALL.into_iter().map(move |base| MethodSpec { base, geometric }))
            .collect()
    }

    pub fn build_method(&self) -> Box<dyn Method> {
        match self.base {
            BaseMethod::Sd => Box::new(SteepestDescent),
            BaseMethod::Cg => Box::new(ConjugateGradient::new()),
            // The alpha reset is only valid when answers equal queries.
            BaseMethod::Gk => Box::new(GonzagaKaras::new(!self.geometric)),
            BaseMethod::Bfgs => Box::new(Bfgs::new()),
            BaseMethod::Empty => Box::new(EmptyMethod),
        }
    }

    pub fn build_politician(&self) -> Box<dyn Politician> {
        if self.geometric {
            Box::new(GeometricPolitician::new())
        } else {
            Box::new(OraclePolitician)
        }
    }

    pub fn politician_name(&self) -> &'static str {
        if self.geometric {
            "geometric"
        } else {
            "oracle"
        }
    }

    /// File-name friendly form (`bfgs+` becomes `bfgs_plus`).
    pub fn slug(&self) -> String {
        if self.geometric {
            format!("{}_plus", self.base.name())
        } else {
            self.base.name().to_string()
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.name())?;
        if self.geometric {
            f.write_str("+")?;
        }
        Ok(())
    }
}

impl FromStr for MethodSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, geometric) = match s.strip_suffix('+') {
            Some(base) => (base, true),
            None => (s, false),
        };
        let base = BaseMethod::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| BenchError::Config(format!("unknown method `{s}`")))?;
        Ok(MethodSpec { base, geometric })
    }
}
