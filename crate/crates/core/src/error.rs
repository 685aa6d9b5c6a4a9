use std::path::Path;

use thiserror::Error;

use crate::primitives::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("pixel ({x}, {y}) has gray value {value}, not a mask label")]
    InvalidMaskValue { x: u32, y: u32, value: u8 },
    #[error("unknown primitive kind `{0}`")]
    UnknownKind(String),
    #[error("invalid tier {0}, expected 1, 2 or 3")]
    InvalidTier(u8),
    #[error("invalid action: {0:?}")]
    InvalidAction(Vec<Violation>),
    #[error("bag footprint left the workspace image")]
    StateOutOfWorkspace,
    #[error("mask contains no bag pixels")]
    EmptyBagMask,
    #[error("mask contains no rim pixels")]
    NoRim,
    #[error("opening is closed (a_ch = 0)")]
    ClosedOpening,
    #[error("action budget of {0} exhausted")]
    StepBudgetExhausted(u32),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }

    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }

    /// True for configuration or usage problems, as opposed to I/O failures.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
