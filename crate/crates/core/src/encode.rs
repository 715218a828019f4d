//! Sparse multi-hot and polarity-weighted multi-hot rows.
//!
//! Rows are stored as ascending `(column, value)` pairs; absent columns are
//! zero. The first dense layer of the network reads this form directly.

use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Corpus, LabeledBag, PolarityTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseExample {
    entries: Vec<(u32, f64)>,
    width: usize,
    label: u8,
}

impl SparseExample {
    /// Checks ordering, range, label and that no stored value is zero.
    pub fn new(entries: Vec<(u32, f64)>, width: usize, label: u8) -> Result<Self> {
        if label > 1 {
            return Err(Error::InvalidLabel(label));
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::UnsortedIndices {
                    previous: w[0].0 as usize,
                    index: w[1].0 as usize,
                });
            }
        }
        if let Some(&(idx, _)) = entries.last() {
            if idx as usize >= width {
                return Err(Error::IndexOutOfRange {
                    index: idx as usize,
                    width,
                });
            }
        }
        if entries.iter().any(|&(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite("encoded value"));
        }
        if entries.iter().any(|&(_, v)| v == 0.0) {
            return Err(Error::InvalidConfig("stored sparse value is exactly zero".into()));
        }
        Ok(Self { entries, width, label })
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingKind {
    MultiHot,
    PolarityWeighted,
}

impl EncodingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::MultiHot => "multi-hot",
            EncodingKind::PolarityWeighted => "polarity-weighted",
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi-hot" | "multihot" => Ok(EncodingKind::MultiHot),
            "polarity-weighted" | "weighted" => Ok(EncodingKind::PolarityWeighted),
            other => Err(Error::InvalidConfig(alloc::format!("unknown encoding {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    examples: Vec<SparseExample>,
    width: usize,
    kind: EncodingKind,
}

impl EncodedDataset {
    pub fn new(examples: Vec<SparseExample>, width: usize, kind: EncodingKind) -> Result<Self> {
        if let Some(ex) = examples.iter().find(|e| e.width != width) {
            return Err(Error::WidthMismatch {
                expected: width,
                found: ex.width,
            });
        }
        Ok(Self { examples, width, kind })
    }

    pub fn examples(&self) -> &[SparseExample] {
        &self.examples
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.examples.iter().map(SparseExample::label).collect()
    }
}

/// Value extrema over a weighted dataset: per stored element and per row sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarityStats {
    pub element_min: f64,
    pub element_max: f64,
    pub rowsum_min: f64,
    pub rowsum_max: f64,
}

/// Eq. (1)-style row: 1.0 at each distinct token, counts ignored.
pub fn multi_hot(bag: &LabeledBag, width: usize) -> Result<SparseExample> {
    bag.check_width(width)?;
    let entries = bag.counts().iter().map(|&(idx, _)| (idx, 1.0)).collect();
    Ok(SparseExample {
        entries,
        width,
        label: bag.label(),
    })
}

/// Row whose value at token `k` is `polarity[k] * count[k]`; exact zeros are dropped.
pub fn polarity_weighted(bag: &LabeledBag, polarity: &PolarityTable, width: usize) -> Result<SparseExample> {
    if polarity.len() != width {
        return Err(Error::LengthMismatch {
            what: "polarity table",
            expected: width,
            found: polarity.len(),
        });
    }
    bag.check_width(width)?;
    let mut entries = Vec::with_capacity(bag.distinct_tokens());
    for &(idx, count) in bag.counts() {
        let v = polarity.rating(idx as usize) * f64::from(count);
        if !v.is_finite() {
            return Err(Error::NonFinite("polarity-weighted value"));
        }
        if v != 0.0 {
            entries.push((idx, v));
        }
    }
    Ok(SparseExample {
        entries,
        width,
        label: bag.label(),
    })
}

pub fn encode_corpus(corpus: &Corpus, kind: EncodingKind, polarity: Option<&PolarityTable>) -> Result<EncodedDataset> {
    encode_bags(corpus.bags(), corpus.vocab_size(), kind, polarity)
}

/// Encodes bags at an explicit width, preserving order.
pub fn encode_bags(
    bags: &[LabeledBag],
    width: usize,
    kind: EncodingKind,
    polarity: Option<&PolarityTable>,
) -> Result<EncodedDataset> {
    let examples = match kind {
        EncodingKind::MultiHot => bags.iter().map(|b| multi_hot(b, width)).collect::<Result<Vec<_>>>()?,
        EncodingKind::PolarityWeighted => {
            let table = polarity.ok_or(Error::MissingPolarity)?;
            bags.iter()
                .map(|b| polarity_weighted(b, table, width))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(EncodedDataset { examples, width, kind })
}

/// Exact extrema of stored values and of per-example sums.
///
/// Examples with no stored entries contribute a row sum of 0 and no element.
pub fn polarity_stats(dataset: &EncodedDataset) -> Result<PolarityStats> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut stats = PolarityStats {
        element_min: f64::INFINITY,
        element_max: f64::NEG_INFINITY,
        rowsum_min: f64::INFINITY,
        rowsum_max: f64::NEG_INFINITY,
    };
    for ex in dataset.examples() {
        for &(_, v) in ex.entries() {
            stats.element_min = stats.element_min.min(v);
            stats.element_max = stats.element_max.max(v);
        }
        let s = ex.row_sum();
        stats.rowsum_min = stats.rowsum_min.min(s);
        stats.rowsum_max = stats.rowsum_max.max(s);
    }
    if stats.element_min > stats.element_max {
        // every row was empty
        stats.element_min = 0.0;
        stats.element_max = 0.0;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Split, Vocabulary};
    use alloc::vec;

    fn bag(counts: &[(u32, u32)], label: u8) -> LabeledBag {
        LabeledBag::new(counts.to_vec(), label).unwrap()
    }

    #[test]
    fn multi_hot_ignores_counts() {
        let ex = multi_hot(&bag(&[(0, 2), (5, 1)], 1), 10).unwrap();
        assert_eq!(ex.entries(), &[(0, 1.0), (5, 1.0)]);
        assert_eq!(ex.label(), 1);
        assert_eq!(multi_hot(&bag(&[], 0), 10).unwrap().nnz(), 0);
        assert!(matches!(
            multi_hot(&bag(&[(10, 1)], 0), 10),
            Err(Error::IndexOutOfRange { index: 10, width: 10 })
        ));
    }

    #[test]
    fn weighted_multiplies_and_drops_zero() {
        let mut ratings = vec![0.0; 5];
        ratings[3] = -1.25;
        let table = PolarityTable::from_ratings(ratings.clone()).unwrap();
        let ex = polarity_weighted(&bag(&[(3, 4)], 0), &table, 5).unwrap();
        assert_eq!(ex.entries(), &[(3, -5.0)]);
        ratings[3] = 0.0;
        let table = PolarityTable::from_ratings(ratings).unwrap();
        assert_eq!(polarity_weighted(&bag(&[(3, 4)], 0), &table, 5).unwrap().nnz(), 0);
    }

    #[test]
    fn weighted_rejects_overflowing_product() {
        let table = PolarityTable::from_ratings(vec![f64::MAX]).unwrap();
        assert_eq!(
            polarity_weighted(&bag(&[(0, 4)], 0), &table, 1).unwrap_err(),
            Error::NonFinite("polarity-weighted value")
        );
    }

    #[test]
    fn weighted_requires_table() {
        let v = Vocabulary::from_tokens(["a", "b"]).unwrap();
        let c = Corpus::new(vec![bag(&[(1, 1)], 1)], "v", v.len(), Split::Train).unwrap();
        assert_eq!(
            encode_corpus(&c, EncodingKind::PolarityWeighted, None).unwrap_err(),
            Error::MissingPolarity
        );
        let empty = Corpus::new(vec![], "v", 2, Split::Train).unwrap();
        assert!(encode_corpus(&empty, EncodingKind::MultiHot, None).unwrap().is_empty());
    }

    #[test]
    fn stats_single_example() {
        let ex = SparseExample::new(vec![(0, 2.0), (1, -3.0)], 2, 1).unwrap();
        let ds = EncodedDataset::new(vec![ex.clone()], 2, EncodingKind::PolarityWeighted).unwrap();
        let s = polarity_stats(&ds).unwrap();
        assert_eq!((s.element_min, s.element_max), (-3.0, 2.0));
        assert_eq!((s.rowsum_min, s.rowsum_max), (-1.0, -1.0));

        let ds = EncodedDataset::new(vec![ex.clone(), ex], 2, EncodingKind::PolarityWeighted).unwrap();
        let s = polarity_stats(&ds).unwrap();
        assert_eq!(s.rowsum_min, s.rowsum_max);
    }

    #[test]
    fn stats_empty_dataset_errors() {
        let ds = EncodedDataset::new(vec![], 2, EncodingKind::MultiHot).unwrap();
        assert_eq!(polarity_stats(&ds).unwrap_err(), Error::EmptyDataset);
    }

    #[test]
    fn sparse_example_rejects_stored_zero() {
        assert!(SparseExample::new(vec![(0, 0.0)], 2, 0).is_err());
        assert!(SparseExample::new(vec![(1, 1.0), (0, 1.0)], 2, 0).is_err());
    }
}
