//! File formats, benchmarking and the `repdet` command line on top of
//! [`repdet_core`].

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;

pub use error::{Error, Result};
