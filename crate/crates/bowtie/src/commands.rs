//! Library side of the `prepare`, `eval`, `transfer` and `stats` subcommands.

use std::path::Path;

use bowtie_core::encode::{encode_corpus, polarity_stats, PolarityStats};
use bowtie_core::{EncodingKind, Evaluation};

use crate::checkpoint::{Checkpoint, VocabFingerprint};
use crate::datasets::{self, KID_ID, SLMRD_ID};
use crate::error::{Error, Result};
use crate::format::{self, sig, DatasetSummary, Prepared};
use crate::runtime::Scorer;
use crate::transfer::{transfer_dataset, transfer_evaluate, TransferReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Slmrd,
    Kid,
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            SLMRD_ID => Ok(Source::Slmrd),
            KID_ID => Ok(Source::Kid),
            other => Err(Error::Usage(format!(
                "unknown dataset {other:?} (expected slmrd or kid)"
            ))),
        }
    }
}

/// Reads a raw distribution directory and writes its canonical form.
pub fn prepare(source: Source, input: &Path, output: &Path, kid_offset: u32) -> Result<DatasetSummary> {
    let (name, raw) = match source {
        Source::Slmrd => (SLMRD_ID, datasets::load_slmrd_dir(input)?),
        Source::Kid => (KID_ID, datasets::load_kid_dir(input, kid_offset)?),
    };
    format::write_prepared(name, &raw, output)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalSplit {
    Train,
    Test,
    All,
}

impl std::str::FromStr for EvalSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(EvalSplit::Train),
            "test" => Ok(EvalSplit::Test),
            "all" => Ok(EvalSplit::All),
            other => Err(Error::Usage(format!(
                "unknown split {other:?} (expected train, test or all)"
            ))),
        }
    }
}

/// Scores a checkpoint on a prepared dataset with the checkpoint's own encoding.
pub fn evaluate(checkpoint: &Checkpoint, prepared: &Prepared, split: EvalSplit, threads: usize) -> Result<Evaluation> {
    checkpoint
        .vocabulary
        .ensure_matches(&VocabFingerprint::of(&prepared.data.vocab))?;
    let corpus = select(prepared, split)?;
    let polarity = prepared.data.polarity.as_ref();
    if checkpoint.encoding == EncodingKind::PolarityWeighted && polarity.is_none() {
        return Err(Error::Usage(
            "checkpoint uses polarity weighting but the dataset has no polarity table".into(),
        ));
    }
    let dataset = encode_corpus(&corpus, checkpoint.encoding, polarity)?;
    Ok(Scorer::new(threads).evaluate(&checkpoint.model, &dataset)?)
}

pub fn render_evaluation(e: &Evaluation) -> String {
    let c = &e.confusion;
    format!(
        "accuracy={} bce={} reviews={} tp={} tn={} fp={} fn={}",
        sig(e.accuracy, 9),
        sig(e.bce, 9),
        c.total(),
        c.true_positive,
        c.true_negative,
        c.false_positive,
        c.false_negative
    )
}

/// Transfers every review (train and test) of `source` onto `target`'s
/// vocabulary and scores the checkpoint on the result.
pub fn transfer(
    checkpoint: &Checkpoint,
    source: &Prepared,
    target: &Prepared,
    threads: usize,
) -> Result<TransferReport> {
    let polarity = target
        .data
        .polarity
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("target dataset {:?} has no polarity table", target.name)))?;
    let full = source.data.train.clone().concat(source.data.test.clone())?;
    let (map, dataset) = transfer_dataset(&source.data.vocab, &full, &target.data.vocab, polarity)?;
    transfer_evaluate(
        checkpoint,
        &VocabFingerprint::of(&target.data.vocab),
        &dataset,
        &map,
        &Scorer::new(threads),
    )
}

fn select(prepared: &Prepared, split: EvalSplit) -> Result<bowtie_core::Corpus> {
    Ok(match split {
        EvalSplit::Train => prepared.data.train.clone(),
        EvalSplit::Test => prepared.data.test.clone(),
        EvalSplit::All => prepared.data.train.clone().concat(prepared.data.test.clone())?,
    })
}

/// Polarity-weighted value ranges over one split of `data`, optionally after
/// mapping onto the vocabulary and polarity table of `onto`.
pub fn stats(data: &Prepared, split: EvalSplit, onto: Option<&Prepared>) -> Result<PolarityStats> {
    let full = select(data, split)?;
    let dataset = match onto {
        Some(target) => {
            let polarity = target
                .data
                .polarity
                .as_ref()
                .ok_or_else(|| Error::Usage(format!("dataset {:?} has no polarity table", target.name)))?;
            transfer_dataset(&data.data.vocab, &full, &target.data.vocab, polarity)?.1
        }
        None => {
            let polarity =
                data.data.polarity.as_ref().ok_or_else(|| {
                    Error::Usage(format!("dataset {:?} has no polarity table; pass --onto", data.name))
                })?;
            encode_corpus(&full, EncodingKind::PolarityWeighted, Some(polarity))?
        }
    };
    Ok(polarity_stats(&dataset)?)
}

pub fn render_stats(s: &PolarityStats) -> String {
    format!(
        "element_min={} element_max={} rowsum_min={} rowsum_max={}",
        sig(s.element_min, 9),
        sig(s.element_max, 9),
        sig(s.rowsum_min, 9),
        sig(s.rowsum_max, 9)
    )
}
