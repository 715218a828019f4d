//! Carrying a corpus from one vocabulary onto another by exact token match.

use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, LabeledBag, PolarityTable, Vocabulary};
use crate::encode::{self, EncodedDataset, EncodingKind};
use crate::error::{Error, Result};

/// Source-index to target-index map plus the source tokens with no match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabMap {
    targets: Vec<Option<u32>>,
    dropped: Vec<String>,
    target_size: usize,
}

impl VocabMap {
    pub fn target(&self, source_index: usize) -> Option<usize> {
        self.targets.get(source_index).copied().flatten().map(|t| t as usize)
    }

    pub fn source_size(&self) -> usize {
        self.targets.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn mapped_count(&self) -> usize {
        self.targets.iter().filter(|t| t.is_some()).count()
    }

    /// Unmatched source tokens, sorted.
    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }

    /// Remaps a source bag; unmatched tokens vanish and collisions sum.
    pub fn remap_bag(&self, bag: &LabeledBag) -> Result<LabeledBag> {
        let mut pairs = Vec::with_capacity(bag.distinct_tokens());
        for &(idx, count) in bag.counts() {
            let idx = idx as usize;
            if idx >= self.targets.len() {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    width: self.targets.len(),
                });
            }
            if let Some(t) = self.targets[idx] {
                pairs.push((t, count));
            }
        }
        // exact matching over unique vocabularies keeps targets distinct, but
        // order is not preserved
        LabeledBag::from_unsorted(pairs, bag.label())
    }
}

/// Exact string-equality matching, no normalization.
pub fn build_vocab_map(source: &Vocabulary, target: &Vocabulary) -> VocabMap {
    let mut dropped = Vec::new();
    let targets = source
        .tokens()
        .iter()
        .map(|tok| match target.index_of(tok) {
            Some(t) => Some(t as u32),
            None => {
                dropped.push(tok.clone());
                None
            }
        })
        .collect();
    dropped.sort();
    VocabMap {
        targets,
        dropped,
        target_size: target.len(),
    }
}

/// Remaps every bag and applies the polarity-weighted encoding at the target width.
///
/// Bags left empty by dropping stay in the dataset as all-zero rows.
pub fn reencode(corpus: &Corpus, map: &VocabMap, polarity: &PolarityTable) -> Result<EncodedDataset> {
    if corpus.vocab_size() != map.source_size() {
        return Err(Error::WidthMismatch {
            expected: map.source_size(),
            found: corpus.vocab_size(),
        });
    }
    if polarity.len() != map.target_size() {
        return Err(Error::LengthMismatch {
            what: "polarity table",
            expected: map.target_size(),
            found: polarity.len(),
        });
    }
    let bags = corpus
        .bags()
        .iter()
        .map(|b| map.remap_bag(b))
        .collect::<Result<Vec<_>>>()?;
    encode::encode_bags(&bags, map.target_size(), EncodingKind::PolarityWeighted, Some(polarity))
}
