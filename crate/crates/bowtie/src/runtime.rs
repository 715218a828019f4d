//! Training hooks for the std environment: wall-clock timing, progress on
//! stderr, and multi-threaded scoring.

use std::time::Instant;

use bowtie_core::train::TrainHooks;
use bowtie_core::{BowTieModel, EncodedDataset, EpochMetrics};
use rayon::prelude::*;

use crate::metrics::progress_line;

/// Scores examples on a rayon pool of `threads` workers (1 = inline).
///
/// Probabilities are collected in example order and reduced sequentially by
/// the caller, so results do not depend on the thread count.
pub struct Scorer {
    pool: Option<rayon::ThreadPool>,
}

impl Scorer {
    pub fn new(threads: usize) -> Self {
        let pool = (threads > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool")
        });
        Self { pool }
    }

    pub fn probabilities(&self, model: &BowTieModel, dataset: &EncodedDataset) -> bowtie_core::Result<Vec<f64>> {
        match &self.pool {
            None => bowtie_core::train::probabilities(model, dataset),
            Some(pool) => pool.install(|| {
                dataset
                    .examples()
                    .par_iter()
                    .map(|ex| model.predict_proba(ex))
                    .collect()
            }),
        }
    }

    pub fn evaluate(
        &self,
        model: &BowTieModel,
        dataset: &EncodedDataset,
    ) -> bowtie_core::Result<bowtie_core::Evaluation> {
        if dataset.is_empty() {
            return Err(bowtie_core::Error::EmptyDataset);
        }
        let probs = self.probabilities(model, dataset)?;
        bowtie_core::Evaluation::from_probabilities(&probs, &dataset.labels(), model.config().discriminator)
    }
}

pub struct StdHooks {
    start: Instant,
    scorer: Scorer,
    progress: bool,
}

impl StdHooks {
    pub fn new(threads: usize, progress: bool) -> Self {
        Self {
            start: Instant::now(),
            scorer: Scorer::new(threads),
            progress,
        }
    }
}

impl TrainHooks for StdHooks {
    fn now(&mut self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn epoch_done(&mut self, m: &EpochMetrics) {
        if self.progress {
            eprintln!("{}", progress_line(m));
        }
    }

    fn probabilities(&mut self, model: &BowTieModel, dataset: &EncodedDataset) -> bowtie_core::Result<Vec<f64>> {
        self.scorer.probabilities(model, dataset)
    }
}
