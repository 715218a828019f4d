//! Scoring a checkpoint on a corpus carried over from another vocabulary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bowtie_core::encode::{polarity_stats, PolarityStats};
use bowtie_core::transfer::{build_vocab_map, reencode};
use bowtie_core::{Confusion, Corpus, EncodedDataset, PolarityTable, VocabMap, Vocabulary};

use crate::checkpoint::{Checkpoint, VocabFingerprint};
use crate::error::{Error, Result};
use crate::format::sig;
use crate::runtime::Scorer;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub accuracy: f64,
    pub bce: f64,
    pub confusion: Confusion,
    pub reviews: usize,
    pub source_tokens: usize,
    pub mapped_tokens: usize,
    pub dropped: Vec<String>,
    pub stats: PolarityStats,
}

/// Maps a source corpus onto the target vocabulary and applies the target
/// polarity weighting.
pub fn transfer_dataset(
    source_vocab: &Vocabulary,
    source: &Corpus,
    target_vocab: &Vocabulary,
    target_polarity: &PolarityTable,
) -> Result<(VocabMap, EncodedDataset)> {
    let map = build_vocab_map(source_vocab, target_vocab);
    let dataset = reencode(source, &map, target_polarity)?;
    Ok((map, dataset))
}

/// Evaluates the checkpoint over every example of the transferred dataset.
pub fn transfer_evaluate(
    checkpoint: &Checkpoint,
    target: &VocabFingerprint,
    dataset: &EncodedDataset,
    map: &VocabMap,
    scorer: &Scorer,
) -> Result<TransferReport> {
    checkpoint.vocabulary.ensure_matches(target)?;
    checkpoint.vocabulary.ensure_width(dataset.width())?;
    let eval = scorer.evaluate(&checkpoint.model, dataset)?;
    Ok(TransferReport {
        accuracy: eval.accuracy,
        bce: eval.bce,
        confusion: eval.confusion,
        reviews: dataset.len(),
        source_tokens: map.source_size(),
        mapped_tokens: map.mapped_count(),
        dropped: map.dropped().to_vec(),
        stats: polarity_stats(dataset)?,
    })
}

pub fn transfer_evaluate_path(
    checkpoint_path: &Path,
    target: &VocabFingerprint,
    dataset: &EncodedDataset,
    map: &VocabMap,
    scorer: &Scorer,
) -> Result<TransferReport> {
    transfer_evaluate(&Checkpoint::load(checkpoint_path)?, target, dataset, map, scorer)
}

impl TransferReport {
    /// Dropped tokens, summary lines, then a `key=value` footer.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dropped source tokens ({}):", self.dropped.len());
        for tok in &self.dropped {
            let _ = writeln!(s, "{tok}");
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "mapped {} of {} source tokens; {} reviews scored",
            self.mapped_tokens, self.source_tokens, self.reviews
        );
        let st = &self.stats;
        let _ = writeln!(
            s,
            "polarity elements in [{}, {}], row sums in [{}, {}]",
            sig(st.element_min, 9),
            sig(st.element_max, 9),
            sig(st.rowsum_min, 9),
            sig(st.rowsum_max, 9)
        );
        let _ = writeln!(
            s,
            "transfer accuracy {:.4}%, bce {:.4}",
            100.0 * self.accuracy,
            self.bce
        );
        let _ = writeln!(s, "---");
        for (k, v) in self.footer() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn footer(&self) -> Vec<(&'static str, String)> {
        let c = &self.confusion;
        vec![
            ("accuracy", sig(self.accuracy, 9)),
            ("bce", sig(self.bce, 9)),
            ("reviews", self.reviews.to_string()),
            ("source_tokens", self.source_tokens.to_string()),
            ("mapped_tokens", self.mapped_tokens.to_string()),
            ("dropped_tokens", self.dropped.len().to_string()),
            ("element_min", sig(self.stats.element_min, 9)),
            ("element_max", sig(self.stats.element_max, 9)),
            ("rowsum_min", sig(self.stats.rowsum_min, 9)),
            ("rowsum_max", sig(self.stats.rowsum_max, 9)),
            ("true_positive", c.true_positive.to_string()),
            ("true_negative", c.true_negative.to_string()),
            ("false_positive", c.false_positive.to_string()),
            ("false_negative", c.false_negative.to_string()),
        ]
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
        fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}

/// Reads the `key=value` footer of a rendered report.
pub fn parse_footer(text: &str) -> Vec<(String, String)> {
    text.split("\n---\n")
        .nth(1)
        .unwrap_or("")
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_owned(), v.to_owned())))
        .collect()
}
