use std::io;
use std::path::PathBuf;

use evstruct::enumeration::EnumError;
use evstruct::representation::RepError;
use evstruct::{EsError, EsVerdict, FgError, FgReason, RelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Limit(#[from] EnumError),
    #[error("not an event structure: {0}")]
    Invalid(EsVerdict),
    #[error("not a full graph: {0}")]
    NotFullGraph(FgReason),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 1 for well-formed input that fails a mathematical check, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::NotFullGraph(_) | CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

impl From<RelError> for CliError {
    fn from(e: RelError) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<EsError> for CliError {
    fn from(e: EsError) -> Self {
        match e {
            EsError::Invalid(v) => CliError::Invalid(v),
            EsError::Relation(r) => r.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::InvalidEs(v) => CliError::Invalid(v),
            RepError::Es(e) => e.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<FgError> for CliError {
    fn from(e: FgError) -> Self {
        match e {
            FgError::NotAFullGraph(r) => CliError::NotFullGraph(r),
            FgError::Relation(r) => r.into(),
            FgError::Es(e) => e.into(),
            FgError::Representation(e) => e.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}
