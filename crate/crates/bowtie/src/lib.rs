//! File formats, dataset loaders, checkpoints and the command-line driver for
//! the BowTie sentiment classifier. The numerical core lives in `bowtie_core`.

pub mod checkpoint;
pub mod commands;
pub mod datasets;
pub mod error;
pub mod format;
pub mod metrics;
pub mod runtime;
pub mod scenario;
pub mod transfer;

pub use error::{Error, Result};
