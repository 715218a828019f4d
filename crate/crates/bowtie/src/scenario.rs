//! Training runs, the four benchmark scenarios, and replayable run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use bowtie_core::encode::encode_corpus;
use bowtie_core::net::Activation;
use bowtie_core::optim::Rule;
use bowtie_core::train::train_with_hooks;
use bowtie_core::{BowTieModel, EncodedDataset, EncodingKind, EpochMetrics, ModelConfig, OptimizerSpec, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::checkpoint::{Checkpoint, Provenance, VocabFingerprint};
use crate::error::{Error, Result};
use crate::format::{self, Prepared};
use crate::metrics::emit_metrics_csv;
use crate::runtime::{Scorer, StdHooks};
use crate::transfer::{transfer_dataset, transfer_evaluate, TransferReport};

pub const METRICS_FILE: &str = "metrics.csv";
pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "transfer_report.txt";

/// Every knob of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub hidden: Vec<usize>,
    pub activation: String,
    pub dropout: f64,
    pub l2: f64,
    pub delta: f64,
    pub optimizer: String,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub target_acc: Option<f64>,
    /// Initialization uses `seed`, shuffling `seed + 1`, dropout `seed + 2`.
    pub seed: u64,
    pub threads: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            hidden: ModelConfig::DEFAULT_HIDDEN.to_vec(),
            activation: "none".into(),
            dropout: 0.2,
            l2: 0.019,
            delta: 0.5,
            optimizer: "nadam".into(),
            learning_rate: 0.001,
            batch_size: 512,
            epochs: 20,
            target_acc: None,
            seed: 0,
            threads: 1,
        }
    }
}

impl Settings {
    pub fn model_config(&self, input_width: usize) -> Result<ModelConfig> {
        let activation: Activation = self.activation.parse()?;
        let config = ModelConfig {
            input_width,
            hidden_widths: self.hidden.clone(),
            activation,
            dropout_rate: self.dropout,
            l2_weight: self.l2,
            discriminator: self.delta,
            init_seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let rule: Rule = self.optimizer.parse()?;
        let optimizer = OptimizerSpec::new(rule).with_learning_rate(self.learning_rate);
        optimizer.validate()?;
        Ok(TrainConfig {
            batch_size: self.batch_size,
            max_epochs: self.epochs,
            target_val_accuracy: self.target_acc,
            data_seed: self.seed.wrapping_add(1),
            dropout_seed: self.seed.wrapping_add(2),
            optimizer,
        })
    }
}

pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub metrics: Vec<EpochMetrics>,
}

/// Encodes a prepared dataset's splits.
pub fn encode_prepared(prepared: &Prepared, encoding: EncodingKind) -> Result<(EncodedDataset, EncodedDataset)> {
    let polarity = prepared.data.polarity.as_ref();
    if encoding == EncodingKind::PolarityWeighted && polarity.is_none() {
        return Err(Error::Usage(format!(
            "dataset {:?} has no polarity table; use --encoding multi-hot",
            prepared.name
        )));
    }
    let train = encode_corpus(&prepared.data.train, encoding, polarity)?;
    let test = encode_corpus(&prepared.data.test, encoding, polarity)?;
    Ok((train, test))
}

/// Trains on the train split, validates on the test split.
pub fn run_training(
    prepared: &Prepared,
    encoding: EncodingKind,
    settings: &Settings,
    progress: bool,
) -> Result<TrainOutcome> {
    let (train_set, val_set) = encode_prepared(prepared, encoding)?;
    let config = settings.model_config(train_set.width())?;
    let train_config = settings.train_config()?;
    let mut model = BowTieModel::init(config)?;
    let mut hooks = StdHooks::new(settings.threads, progress);
    let metrics = train_with_hooks(&mut model, &train_set, &val_set, &train_config, &mut hooks)?;
    let checkpoint = Checkpoint {
        model,
        vocabulary: VocabFingerprint::of(&prepared.data.vocab),
        encoding,
        provenance: Provenance {
            dataset: prepared.name.clone(),
            optimizer: settings.optimizer.clone(),
            learning_rate: settings.learning_rate,
            batch_size: settings.batch_size,
            data_seed: train_config.data_seed,
            dropout_seed: train_config.dropout_seed,
            epochs_run: metrics.len(),
        },
    };
    Ok(TrainOutcome { checkpoint, metrics })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// KID, multi-hot, train and validate.
    KidMultiHot = 1,
    /// SLMRD, multi-hot, train and validate.
    SlmrdMultiHot = 2,
    /// SLMRD, polarity-weighted, train and validate.
    SlmrdWeighted = 3,
    /// Scenario 3 training, then transfer to all KID reviews.
    Transfer = 4,
}

impl Scenario {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Scenario::KidMultiHot),
            2 => Ok(Scenario::SlmrdMultiHot),
            3 => Ok(Scenario::SlmrdWeighted),
            4 => Ok(Scenario::Transfer),
            other => Err(Error::Usage(format!("scenario must be 1-4, got {other}"))),
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn encoding(self) -> EncodingKind {
        match self {
            Scenario::KidMultiHot | Scenario::SlmrdMultiHot => EncodingKind::MultiHot,
            Scenario::SlmrdWeighted | Scenario::Transfer => EncodingKind::PolarityWeighted,
        }
    }

    /// Validation accuracy at which training stops early.
    pub fn target_accuracy(self) -> f64 {
        match self {
            Scenario::KidMultiHot => 0.88,
            Scenario::SlmrdMultiHot => 0.8795,
            Scenario::SlmrdWeighted | Scenario::Transfer => 0.89,
        }
    }

    /// Weakest reported accuracy for the verdict metric.
    pub fn weakest_reported(self) -> f64 {
        match self {
            Scenario::KidMultiHot => 0.8808,
            Scenario::SlmrdMultiHot => 0.8795,
            Scenario::SlmrdWeighted => 0.8902,
            Scenario::Transfer => 0.9156,
        }
    }

    /// Weakest reported value minus a half-point stochastic allowance.
    pub fn verdict_threshold(self) -> f64 {
        self.weakest_reported() - 0.005
    }

    pub fn trains_on_kid(self) -> bool {
        self == Scenario::KidMultiHot
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: u8,
    pub metric: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Verdict {
    pub fn line(&self) -> String {
        format!(
            "verdict scenario={} metric={} value={:.4} threshold={:.4} allowance=0.5pt result={}",
            self.scenario,
            self.metric,
            self.value,
            self.threshold,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Inputs and outputs of one command, sufficient to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: Option<u8>,
    pub settings: Settings,
    pub encoding: String,
    pub data: Option<PathBuf>,
    pub slmrd: Option<PathBuf>,
    pub kid: Option<PathBuf>,
    pub out: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub verdict: Option<Verdict>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })
    }
}

pub struct ScenarioOutcome {
    pub manifest: RunManifest,
    pub metrics: Vec<EpochMetrics>,
    pub transfer: Option<TransferReport>,
    pub verdict: Verdict,
}

pub struct ScenarioPaths<'a> {
    pub slmrd: Option<&'a Path>,
    pub kid: Option<&'a Path>,
    pub out: &'a Path,
}

fn need<'a>(p: Option<&'a Path>, what: &str) -> Result<&'a Path> {
    p.ok_or_else(|| Error::Usage(format!("this scenario needs --{what} <prepared dir>")))
}

/// Runs a scenario and writes metrics, checkpoint, manifest and (for 4) the transfer report.
pub fn run_scenario(
    scenario: Scenario,
    paths: &ScenarioPaths<'_>,
    settings: &Settings,
    progress: bool,
) -> Result<ScenarioOutcome> {
    let train_dir = if scenario.trains_on_kid() {
        need(paths.kid, "kid")?
    } else {
        need(paths.slmrd, "slmrd")?
    };
    let kid_for_transfer = match scenario {
        Scenario::Transfer => Some(format::read_prepared(need(paths.kid, "kid")?)?),
        _ => None,
    };
    let prepared = format::read_prepared(train_dir)?;

    let outcome = run_training(&prepared, scenario.encoding(), settings, progress)?;
    fs::create_dir_all(paths.out).map_err(|e| Error::io(paths.out, e))?;
    let metrics_path = paths.out.join(METRICS_FILE);
    let ckpt_path = paths.out.join(CHECKPOINT_FILE);
    emit_metrics_csv(&outcome.metrics, &metrics_path)?;
    outcome.checkpoint.save(&ckpt_path)?;
    let mut artifacts = vec![metrics_path, ckpt_path];

    let last_val = outcome.metrics.last().map_or(0.0, |m| m.val_accuracy);
    let (metric, value, transfer) = match kid_for_transfer {
        Some(kid) => {
            let polarity = prepared
                .data
                .polarity
                .as_ref()
                .ok_or_else(|| Error::Usage("transfer target needs a polarity table".into()))?;
            let full = kid.data.train.clone().concat(kid.data.test.clone())?;
            let (map, dataset) = transfer_dataset(&kid.data.vocab, &full, &prepared.data.vocab, polarity)?;
            let report = transfer_evaluate(
                &outcome.checkpoint,
                &VocabFingerprint::of(&prepared.data.vocab),
                &dataset,
                &map,
                &Scorer::new(settings.threads),
            )?;
            let report_path = paths.out.join(REPORT_FILE);
            report.write(&report_path)?;
            artifacts.push(report_path);
            ("transfer_accuracy", report.accuracy, Some(report))
        }
        None => ("val_accuracy", last_val, None),
    };

    let verdict = Verdict {
        scenario: scenario.number(),
        metric: metric.into(),
        value,
        threshold: scenario.verdict_threshold(),
        passed: value >= scenario.verdict_threshold(),
    };
    let manifest_path = paths.out.join(MANIFEST_FILE);
    artifacts.push(manifest_path.clone());
    let manifest = RunManifest {
        command: "scenario".into(),
        scenario: Some(scenario.number()),
        settings: settings.clone(),
        encoding: scenario.encoding().as_str().into(),
        data: None,
        slmrd: paths.slmrd.map(Path::to_owned),
        kid: paths.kid.map(Path::to_owned),
        out: paths.out.to_owned(),
        artifacts,
        verdict: Some(verdict.clone()),
    };
    manifest.write(&manifest_path)?;
    Ok(ScenarioOutcome {
        manifest,
        metrics: outcome.metrics,
        transfer,
        verdict,
    })
}

/// Default settings for a scenario: the shared defaults plus its early-stop target.
pub fn scenario_settings(scenario: Scenario) -> Settings {
    Settings {
        target_acc: Some(scenario.target_accuracy()),
        ..Settings::default()
    }
}

/// `bowtie train`: trains and writes metrics, checkpoint and manifest.
pub fn run_train_command(
    data: &Path,
    encoding: EncodingKind,
    settings: &Settings,
    out: &Path,
    progress: bool,
) -> Result<(RunManifest, Vec<EpochMetrics>)> {
    let prepared = format::read_prepared(data)?;
    let outcome = run_training(&prepared, encoding, settings, progress)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let metrics_path = out.join(METRICS_FILE);
    let ckpt_path = out.join(CHECKPOINT_FILE);
    let manifest_path = out.join(MANIFEST_FILE);
    emit_metrics_csv(&outcome.metrics, &metrics_path)?;
    outcome.checkpoint.save(&ckpt_path)?;
    let manifest = RunManifest {
        command: "train".into(),
        scenario: None,
        settings: settings.clone(),
        encoding: encoding.as_str().into(),
        data: Some(data.to_owned()),
        slmrd: None,
        kid: None,
        out: out.to_owned(),
        artifacts: vec![metrics_path, ckpt_path, manifest_path.clone()],
        verdict: None,
    };
    manifest.write(&manifest_path)?;
    Ok((manifest, outcome.metrics))
}

/// Reruns a manifest, optionally into a different output directory.
pub fn replay(manifest: &RunManifest, out: Option<&Path>, progress: bool) -> Result<Vec<EpochMetrics>> {
    let out = out.unwrap_or(&manifest.out);
    match manifest.command.as_str() {
        "train" => {
            let data = manifest
                .data
                .as_deref()
                .ok_or_else(|| Error::Usage("train manifest without data path".into()))?;
            let encoding: EncodingKind = manifest.encoding.parse()?;
            Ok(run_train_command(data, encoding, &manifest.settings, out, progress)?.1)
        }
        "scenario" => {
            let n = manifest
                .scenario
                .ok_or_else(|| Error::Usage("scenario manifest without number".into()))?;
            let paths = ScenarioPaths {
                slmrd: manifest.slmrd.as_deref(),
                kid: manifest.kid.as_deref(),
                out,
            };
            Ok(run_scenario(Scenario::from_number(n)?, &paths, &manifest.settings, progress)?.metrics)
        }
        other => Err(Error::Usage(format!("cannot replay command {other:?}"))),
    }
}
