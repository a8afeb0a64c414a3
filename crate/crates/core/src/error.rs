use std::path::PathBuf;

use thiserror::Error;

use crate::model::{AltId, IndId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error{}: {message}", at_line(*.line))]
    Parse { line: Option<u64>, message: String },

    #[error("duplicate alternative (ind {ind}, alt {alt}){}", at_line(*.line))]
    DuplicateAlternative {
        ind: IndId,
        alt: AltId,
        line: Option<u64>,
    },

    #[error("duplicate individual {0}")]
    DuplicateIndividual(IndId),

    #[error("non-finite {field} for (ind {ind}, alt {alt}){}", at_line(*.line))]
    NonFinite {
        field: &'static str,
        ind: IndId,
        alt: AltId,
        line: Option<u64>,
    },

    #[error("individual {0} has no alternatives")]
    EmptyIndividual(IndId),

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("budget must be a finite non-negative amount, got {0}")]
    NegativeBudget(f64),

    #[error("gumbel scale must be finite and positive, got {0}")]
    InvalidScale(f64),

    #[error("result was produced from different profiles (fingerprint mismatch)")]
    FingerprintMismatch,

    #[error("resume budget {new} must exceed the previous budget {old}")]
    BudgetNotIncreased { old: f64, new: f64 },

    #[error("oracle capacity exceeded: {0}")]
    OracleCap(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn at_line(line: Option<u64>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error stems from bad input rather than a resource limit.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::OracleCap(_))
    }
}
