use std::fmt;
use std::path::PathBuf;

use crate::market::CategoryId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("key mismatch: {0}")]
    KeyMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown category {0}")]
    UnknownCategory(CategoryId),

    #[error("infeasible game: {0}")]
    Infeasible(Infeasibility),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("pool not found: {}", .0.display())]
    PoolNotFound(PathBuf),

    #[error("i/o error")]
    Io(#[from] std::io::Error),

    #[error("invalid json")]
    Json(#[from] serde_json::Error),

    #[error("csv error")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Why a stage-one solve was rejected.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// The consumer's optimum sits at `Υ ≥ 0`, i.e. zero or negative total richness.
    UpsilonNonNegative { upsilon: f64 },
    /// `1 + q̄·p·A − q̄·B ≤ 0`, outside the valuation's log domain.
    LogDomain { argument: f64 },
}

impl Infeasibility {
    pub fn tag(&self) -> &'static str {
        match self {
            Infeasibility::UpsilonNonNegative { .. } => "infeasible_upsilon",
            Infeasibility::LogDomain { .. } => "infeasible_log_domain",
        }
    }
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::UpsilonNonNegative { upsilon } => {
                write!(f, "upsilon = {upsilon} is not negative")
            }
            Infeasibility::LogDomain { argument } => {
                write!(f, "log argument {argument} is not positive")
            }
        }
    }
}
