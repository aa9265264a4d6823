//! Command errors mapped onto the documented exit codes:
//! 0 success, 2 configuration error, 3 data error, 4 numeric failure.

use std::fmt;
use std::path::Path;

use spikeload_core::Error as CoreError;

#[derive(Debug)]
pub enum CmdError {
    /// Bad flags, unknown config keys, invalid parameter values. Exit 2.
    Config(String),
    /// Missing or malformed input files. Exit 3.
    Data(String),
    /// Numeric or model-contract failures inside the pipeline. Exit 4.
    Numeric(String),
}

pub type CmdResult<T> = Result<T, CmdError>;

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Data(_) => 3,
            CmdError::Numeric(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> CmdError {
        CmdError::Data(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Config(m) => write!(f, "config error: {m}"),
            CmdError::Data(m) => write!(f, "data error: {m}"),
            CmdError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl From<CoreError> for CmdError {
    fn from(err: CoreError) -> Self {
        match &err {
            CoreError::MalformedHeader { .. }
            | CoreError::MalformedRow { .. }
            | CoreError::LabelOutOfRange { .. }
            | CoreError::TooFewRecords { .. }
            | CoreError::ClassTooSmall { .. }
            | CoreError::BadSyntheticSize { .. }
            | CoreError::EmptyDataset => CmdError::Data(err.to_string()),
            CoreError::InvalidParam { .. } => CmdError::Config(err.to_string()),
            _ => CmdError::Numeric(err.to_string()),
        }
    }
}
