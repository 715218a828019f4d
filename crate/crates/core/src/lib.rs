//! Allocation-only core of the BowTie binary sentiment classifier.
//!
//! Everything here is a pure function of its inputs: no files, no clocks, no
//! threads. The `bowtie` crate layers dataset loaders, file formats,
//! checkpoints and the command-line interface on top.
//!
//! Pipeline:
//!
//! - [`corpus`]: vocabularies, polarity tables and labeled bags of words.
//! - [`encode`]: multi-hot and polarity-weighted multi-hot sparse rows.
//! - [`net`]: the dense cascade (sparse first layer, dropout, sigmoid) with
//!   hand-derived gradients.
//! - [`optim`]: SGD, RMSProp, Adam and Nadam update rules.
//! - [`train`]: mini-batch training with early stopping and evaluation.
//! - [`transfer`]: mapping one vocabulary onto another and re-encoding a
//!   corpus with the target polarity table.
//!
//! All arithmetic is `f64`.
#![no_std]

extern crate alloc;

pub mod corpus;
pub mod encode;
pub mod error;
pub(crate) mod math;
pub mod net;
pub mod optim;
pub(crate) mod seed;
pub mod train;
pub mod transfer;

pub use corpus::{Corpus, LabeledBag, PolarityTable, Split, Vocabulary};
pub use encode::{EncodedDataset, EncodingKind, PolarityStats, SparseExample};
pub use error::{Error, Result};
pub use net::{Activation, BowTieModel, ForwardCache, Gradients, ModelConfig};
pub use optim::{MomentState, OptimizerSpec, Rule};
pub use train::{Confusion, EpochMetrics, Evaluation, TrainConfig};
pub use transfer::VocabMap;
