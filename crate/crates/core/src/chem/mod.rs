//! Integral files, RDM export and the state-averaged CASSCF driver that
//! delegates orbital updates to an external program.

pub mod casscf;
pub mod fcidump;
pub mod rdm_io;

use std::path::{Path, PathBuf};

pub use casscf::{run_sa_casscf, CasscfConfig, CasscfRun, CasscfStatus, ExcitedMethod, MacroIterationRecord, SolverSettings};
pub use fcidump::{format_fcidump, parse_fcidump, parse_fcidump_str, write_fcidump, Fcidump};
pub use rdm_io::{format_rdms, parse_rdms, read_rdms, write_rdms};

use crate::solve::SolveError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChemError {
    /// `line` is 1-based; 0 when the problem is not tied to one line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("external command `{command}` failed ({status}): {stderr}")]
    External { command: String, status: String, stderr: String },
    #[error("external command did not write {0}")]
    MissingOutput(PathBuf),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl ChemError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        ChemError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        ChemError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}
