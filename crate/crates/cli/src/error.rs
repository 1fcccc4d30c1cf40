use std::path::PathBuf;

use thiserror::Error;

pub const EX_USAGE: u8 = 64;
pub const EX_DATAERR: u8 = 65;
pub const EX_NOINPUT: u8 = 66;
pub const EX_SOFTWARE: u8 = 70;
pub const EX_CANTCREAT: u8 = 73;
pub const EX_IOERR: u8 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    BadInput { path: PathBuf, msg: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("write to stdout failed: {0}")]
    Stdout(#[from] std::io::Error),
    #[error("solver aborted: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EX_USAGE,
            CliError::BadInput { .. } => EX_DATAERR,
            CliError::Read { .. } => EX_NOINPUT,
            CliError::Write { .. } => EX_CANTCREAT,
            CliError::Stdout(_) => EX_IOERR,
            CliError::Solver(_) => EX_SOFTWARE,
        }
    }
}
