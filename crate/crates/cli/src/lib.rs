//! IO, file formats, configuration, and the command implementations behind
//! the `spikeload` binary. The algorithms live in `spikeload-core`; this
//! crate only moves bytes and wires stages together.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod jobs;

pub use error::{CmdError, CmdResult};
