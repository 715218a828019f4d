//! Mini-batch training with per-epoch metrics and target-accuracy early stopping.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::encode::{EncodedDataset, SparseExample};
use crate::error::{Error, Result};
use crate::net::{self, BowTieModel, Gradients};
use crate::optim::{self, MomentState, OptimizerSpec};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop after the first epoch whose validation accuracy reaches this value.
    pub target_val_accuracy: Option<f64>,
    pub data_seed: u64,
    pub dropout_seed: u64,
    pub optimizer: OptimizerSpec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 512,
            max_epochs: 20,
            target_val_accuracy: None,
            data_seed: 0,
            dropout_seed: 1,
            optimizer: OptimizerSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    /// 1-based.
    pub epoch: usize,
    pub train_bce: f64,
    pub train_accuracy: f64,
    pub val_bce: f64,
    pub val_accuracy: f64,
    pub epoch_seconds: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub true_positive: usize,
    pub true_negative: usize,
    pub false_positive: usize,
    pub false_negative: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_positive + self.true_negative + self.false_positive + self.false_negative
    }

    pub fn correct(&self) -> usize {
        self.true_positive + self.true_negative
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    /// Mean binary cross-entropy, no L2 term.
    pub bce: f64,
    pub confusion: Confusion,
}

impl Evaluation {
    /// Scores precomputed probabilities; the sum runs in example order.
    pub fn from_probabilities(probs: &[f64], labels: &[u8], discriminator: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let bce = net::bce(probs, labels)?;
        let mut confusion = Confusion::default();
        for (&p, &y) in probs.iter().zip(labels) {
            let predicted = p >= discriminator;
            match (predicted, y == 1) {
                (true, true) => confusion.true_positive += 1,
                (false, false) => confusion.true_negative += 1,
                (true, false) => confusion.false_positive += 1,
                (false, true) => confusion.false_negative += 1,
            }
        }
        Ok(Self {
            accuracy: confusion.correct() as f64 / probs.len() as f64,
            bce,
            confusion,
        })
    }
}

/// Inference-mode accuracy, BCE and confusion counts.
pub fn evaluate(model: &BowTieModel, dataset: &EncodedDataset) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let probs = probabilities(model, dataset)?;
    Evaluation::from_probabilities(&probs, &dataset.labels(), model.config().discriminator)
}

/// Inference-mode probability of every example, in dataset order.
pub fn probabilities(model: &BowTieModel, dataset: &EncodedDataset) -> Result<Vec<f64>> {
    dataset.examples().iter().map(|ex| model.predict_proba(ex)).collect()
}

/// Callbacks the training loop uses for timing and progress.
pub trait TrainHooks {
    /// Monotonic seconds; only differences are used.
    fn now(&mut self) -> f64 {
        0.0
    }

    fn epoch_done(&mut self, _metrics: &EpochMetrics) {}

    /// Per-epoch scoring; overriding implementations must return the same
    /// values as [`probabilities`] in the same order.
    fn probabilities(&mut self, model: &BowTieModel, dataset: &EncodedDataset) -> Result<Vec<f64>> {
        probabilities(model, dataset)
    }
}

/// No timing, no progress output.
pub struct NoHooks;

impl TrainHooks for NoHooks {}

pub fn train(
    model: &mut BowTieModel,
    train_set: &EncodedDataset,
    val_set: &EncodedDataset,
    config: &TrainConfig,
) -> Result<Vec<EpochMetrics>> {
    train_with_hooks(model, train_set, val_set, config, &mut NoHooks)
}

pub fn train_with_hooks<H: TrainHooks>(
    model: &mut BowTieModel,
    train_set: &EncodedDataset,
    val_set: &EncodedDataset,
    config: &TrainConfig,
    hooks: &mut H,
) -> Result<Vec<EpochMetrics>> {
    if config.max_epochs == 0 {
        return Ok(Vec::new());
    }
    let width = model.config().input_width;
    for ds in [train_set, val_set] {
        if ds.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: ds.width(),
            });
        }
    }
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.batch_size == 0 || config.batch_size > train_set.len() {
        return Err(Error::InvalidConfig(format!(
            "batch size {} must be in [1, {}]",
            config.batch_size,
            train_set.len()
        )));
    }
    if let Some(t) = config.target_val_accuracy {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidConfig(format!("target accuracy {t} outside (0, 1]")));
        }
    }
    config.optimizer.validate()?;

    let mut examples: Vec<SparseExample> = train_set.examples().to_vec();
    let mut labels: Vec<u8> = Vec::with_capacity(config.batch_size);
    let mut state = MomentState::new(model);
    let mut grads = Gradients::zeros_like(model);
    let mut metrics = Vec::new();

    for epoch in 1..=config.max_epochs {
        let started = hooks.now();
        let mut rng = seed::rng(seed::derive(config.data_seed, epoch as u64));
        examples.shuffle(&mut rng);
        let epoch_dropout = seed::derive(config.dropout_seed, epoch as u64);

        for (b, batch) in examples.chunks(config.batch_size).enumerate() {
            let diverged = |reason| Error::Diverged {
                epoch,
                batch: b,
                reason,
            };
            labels.clear();
            labels.extend(batch.iter().map(SparseExample::label));
            let cache = model
                .forward(batch, true, seed::derive(epoch_dropout, b as u64))
                .map_err(|e| match e {
                    Error::NonFinite(what) => diverged(what),
                    other => other,
                })?;
            let bce = net::bce(cache.probabilities(), &labels)?;
            if !bce.is_finite() {
                return Err(diverged("loss"));
            }
            model.backward_into(&cache, &labels, &mut grads)?;
            optim::apply_update(&config.optimizer, &mut state, model, &grads).map_err(|e| match e {
                Error::NonFinite(what) => diverged(what),
                other => other,
            })?;
        }

        let delta = model.config().discriminator;
        let tr = Evaluation::from_probabilities(&hooks.probabilities(model, train_set)?, &train_set.labels(), delta)?;
        let va = Evaluation::from_probabilities(&hooks.probabilities(model, val_set)?, &val_set.labels(), delta)?;
        let m = EpochMetrics {
            epoch,
            train_bce: tr.bce,
            train_accuracy: tr.accuracy,
            val_bce: va.bce,
            val_accuracy: va.accuracy,
            epoch_seconds: hooks.now() - started,
        };
        hooks.epoch_done(&m);
        metrics.push(m);
        if config.target_val_accuracy.is_some_and(|t| va.accuracy >= t) {
            break;
        }
    }
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::EncodingKind;
    use crate::net::ModelConfig;
    use crate::optim::Rule;
    use alloc::vec;

    /// Token 0 marks positives, token 1 negatives, tokens 2.. are noise.
    fn separable(n: usize, width: usize) -> EncodedDataset {
        let examples = (0..n)
            .map(|i| {
                let label = (i % 2) as u8;
                let signal = if label == 1 { 0 } else { 1 };
                let noise = 2 + (i * 7) % (width - 2);
                SparseExample::new(vec![(signal, 1.0), (noise as u32, 1.0)], width, label).unwrap()
            })
            .collect();
        EncodedDataset::new(examples, width, EncodingKind::MultiHot).unwrap()
    }

    fn small_model(width: usize) -> BowTieModel {
        let mut c = ModelConfig::new(width);
        c.hidden_widths = vec![4, 1];
        c.l2_weight = 0.001;
        BowTieModel::init(c).unwrap()
    }

    #[test]
    fn zero_epochs_leave_model_untouched() {
        let ds = separable(10, 6);
        let mut m = small_model(6);
        let before = m.clone();
        let cfg = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::default()
        };
        assert!(train(&mut m, &ds, &ds, &cfg).unwrap().is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn learns_separable_data_and_stops_early() {
        let ds = separable(64, 10);
        let mut m = small_model(10);
        let cfg = TrainConfig {
            batch_size: 8,
            max_epochs: 200,
            target_val_accuracy: Some(1.0),
            optimizer: OptimizerSpec::new(Rule::Adam).with_learning_rate(0.05),
            ..TrainConfig::default()
        };
        let metrics = train(&mut m, &ds, &ds, &cfg).unwrap();
        let last = metrics.last().unwrap();
        assert_eq!(last.val_accuracy, 1.0);
        assert!(metrics[..metrics.len() - 1].iter().all(|e| e.val_accuracy < 1.0));
        assert!(metrics.len() < 200);
    }

    #[test]
    fn target_met_in_first_epoch_gives_one_record() {
        let ds = separable(16, 6);
        let mut m = small_model(6);
        let cfg = TrainConfig {
            batch_size: 4,
            max_epochs: 5,
            target_val_accuracy: Some(1e-9),
            ..TrainConfig::default()
        };
        assert_eq!(train(&mut m, &ds, &ds, &cfg).unwrap().len(), 1);
    }

    #[test]
    fn oversized_batch_rejected() {
        let ds = separable(4, 6);
        let mut m = small_model(6);
        let cfg = TrainConfig {
            batch_size: 5,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&mut m, &ds, &ds, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn divergence_reports_position() {
        let ds = separable(8, 6);
        let mut m = small_model(6);
        let mut cfg = TrainConfig {
            batch_size: 4,
            max_epochs: 3,
            optimizer: OptimizerSpec::new(Rule::Sgd).with_learning_rate(1e308),
            ..TrainConfig::default()
        };
        cfg.optimizer.learning_rate = 1e308;
        let err = train(&mut m, &ds, &ds, &cfg).unwrap_err();
        assert!(matches!(err, Error::Diverged { epoch: 1, .. }), "{err:?}");
    }

    #[test]
    fn zero_model_on_balanced_set() {
        let ds = separable(10, 6);
        let m = BowTieModel::zeros(ModelConfig::new(6)).unwrap();
        let e = evaluate(&m, &ds).unwrap();
        assert_eq!(e.accuracy, 0.5);
        assert!((e.bce - core::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(e.confusion.true_positive, 5);
        assert_eq!(e.confusion.false_positive, 5);
    }

    #[test]
    fn evaluate_empty_errors() {
        let ds = EncodedDataset::new(vec![], 6, EncodingKind::MultiHot).unwrap();
        let m = BowTieModel::zeros(ModelConfig::new(6)).unwrap();
        assert_eq!(evaluate(&m, &ds).unwrap_err(), Error::EmptyDataset);
    }
}
