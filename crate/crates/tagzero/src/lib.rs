//! File formats, configuration and the `tagzero` command line on top of
//! [`tagzero_core`].

pub mod bundle;
pub mod cli;
pub mod config;
pub mod error;
pub mod files;
pub mod raw;
pub mod table;
pub mod word2vec;

pub use error::{CliError, Result};
