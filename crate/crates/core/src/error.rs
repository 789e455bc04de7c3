use std::path::PathBuf;

use thiserror::Error;

use crate::model::{ExpertId, SkillId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("expert {0} inserted twice")]
    DuplicateInsert(ExpertId),

    #[error("expert {0} is already part of the current set")]
    AlreadySelected(ExpertId),

    #[error("expert {expert} out of range for an instance of {size} experts")]
    ExpertOutOfRange { expert: ExpertId, size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matroid does not fit the instance: {0}")]
    MatroidMismatch(String),

    #[error("arrival order is not a permutation of 0..{n}: {reason}")]
    InvalidOrder { n: usize, reason: String },

    #[error("brute force is limited to {max} experts, instance has {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("task skills not covered by any expert: {}", .0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "))]
    Uncoverable(Vec<SkillId>),

    #[error("task skills not covered by any expert: {}", .0.join(", "))]
    UncoverableNamed(Vec<String>),

    #[error("{category} category has {available} skills, task needs {needed}")]
    CategoryTooSmall {
        category: &'static str,
        available: usize,
        needed: usize,
    },

    #[error("corpus contains no skills")]
    NoSkills,

    #[error("unknown solver `{0}`")]
    UnknownSolver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
