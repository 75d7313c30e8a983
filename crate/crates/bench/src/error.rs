use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),

    #[error("contract violation in {problem} / {method}: {source}")]
    Contract {
        problem: String,
        method: String,
        source: politician::Error,
    },

    #[error("performance profile needs at least one method and one problem with equal counts per method")]
    Profile,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 for contract violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Contract { .. } => 3,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(BenchError::Config("bad".into()).exit_code(), 2);
        let contract = BenchError::Contract {
            problem: "p".into(),
            method: "m".into(),
            source: politician::Error::ContractViolation {
                politician: "geometric".into(),
                iteration: 3,
                answered: 2.0,
                queried: 1.0,
            },
        };
        assert_eq!(contract.exit_code(), 3);
        assert_eq!(BenchError::Profile.exit_code(), 1);
        assert_eq!(BenchError::Io(std::io::Error::other("disk")).exit_code(), 1);
    }
}
