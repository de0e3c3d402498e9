//! Threaded runtime, binary file formats and command-line interface for
//! [`magicvec_core`].

pub mod bench;
pub mod cli;
pub mod format;
pub mod report;
pub mod runtime;

pub use runtime::{resolve_workers, ThreadPool};
