//! Vocabularies, polarity tables and labeled bags of words.
//!
//! A [`Corpus`] is the source-agnostic form every later stage consumes: one
//! [`LabeledBag`] per review, indices referring to a named [`Vocabulary`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// Ordered token list; a token's index is its position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index_of: BTreeMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from tokens in index order.
    ///
    /// Duplicates are reported with 1-based positions, which match line
    /// numbers when the tokens come from a one-token-per-line file.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list = Vec::new();
        let mut index_of = BTreeMap::new();
        for (i, tok) in tokens.into_iter().enumerate() {
            let tok = tok.into();
            if let Some(&prev) = index_of.get(&tok) {
                return Err(Error::DuplicateToken {
                    token: tok,
                    first: prev as usize + 1,
                    second: i + 1,
                });
            }
            let idx = u32::try_from(i).map_err(|_| Error::InvalidConfig("vocabulary too large".into()))?;
            index_of.insert(tok.clone(), idx);
            list.push(tok);
        }
        if list.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(Self { tokens: list, index_of })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index_of.get(token).map(|&i| i as usize)
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Per-token polarity ratings aligned with a [`Vocabulary`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityTable {
    ratings: Vec<f64>,
}

impl PolarityTable {
    pub fn new(ratings: Vec<f64>, vocab: &Vocabulary) -> Result<Self> {
        if ratings.len() != vocab.len() {
            return Err(Error::LengthMismatch {
                what: "polarity table",
                expected: vocab.len(),
                found: ratings.len(),
            });
        }
        Self::from_ratings(ratings)
    }

    /// Builds a table without a vocabulary to check against.
    pub fn from_ratings(ratings: Vec<f64>) -> Result<Self> {
        if ratings.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite("polarity rating"));
        }
        Ok(Self { ratings })
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn rating(&self, index: usize) -> f64 {
        self.ratings[index]
    }

    pub fn ratings(&self) -> &[f64] {
        &self.ratings
    }
}

/// One review: ascending `(token index, count)` pairs and a 0/1 label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledBag {
    counts: Vec<(u32, u32)>,
    label: u8,
}

impl LabeledBag {
    pub fn new(counts: Vec<(u32, u32)>, label: u8) -> Result<Self> {
        if label > 1 {
            return Err(Error::InvalidLabel(label));
        }
        for w in counts.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::UnsortedIndices {
                    previous: w[0].0 as usize,
                    index: w[1].0 as usize,
                });
            }
        }
        if let Some(&(idx, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(Error::ZeroCount { index: idx as usize });
        }
        Ok(Self { counts, label })
    }

    /// Folds a token-index sequence into a bag by counting occurrences.
    pub fn from_sequence<I: IntoIterator<Item = u32>>(seq: I, label: u8) -> Result<Self> {
        let mut tally: BTreeMap<u32, u32> = BTreeMap::new();
        for idx in seq {
            *tally.entry(idx).or_insert(0) += 1;
        }
        Self::new(tally.into_iter().collect(), label)
    }

    /// Builds a bag from unordered pairs, summing counts of repeated indices.
    pub fn from_unsorted<I: IntoIterator<Item = (u32, u32)>>(pairs: I, label: u8) -> Result<Self> {
        let mut tally: BTreeMap<u32, u32> = BTreeMap::new();
        for (idx, count) in pairs {
            if count == 0 {
                return Err(Error::ZeroCount { index: idx as usize });
            }
            *tally.entry(idx).or_insert(0) += count;
        }
        Self::new(tally.into_iter().collect(), label)
    }

    pub fn counts(&self) -> &[(u32, u32)] {
        &self.counts
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    pub fn distinct_tokens(&self) -> usize {
        self.counts.len()
    }

    pub fn token_mass(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn check_width(&self, width: usize) -> Result<()> {
        match self.counts.last() {
            Some(&(idx, _)) if idx as usize >= width => Err(Error::IndexOutOfRange {
                index: idx as usize,
                width,
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
    /// Train and test concatenated, e.g. all 50 000 KID reviews.
    Full,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Full => "full",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "full" => Ok(Split::Full),
            other => Err(Error::InvalidConfig(alloc::format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    bags: Vec<LabeledBag>,
    vocab_id: String,
    vocab_size: usize,
    split: Split,
}

impl Corpus {
    /// Validates every bag against `vocab_size`.
    pub fn new(bags: Vec<LabeledBag>, vocab_id: impl Into<String>, vocab_size: usize, split: Split) -> Result<Self> {
        for bag in &bags {
            bag.check_width(vocab_size)?;
        }
        Ok(Self {
            bags,
            vocab_id: vocab_id.into(),
            vocab_size,
            split,
        })
    }

    pub fn bags(&self) -> &[LabeledBag] {
        &self.bags
    }

    pub fn into_bags(self) -> Vec<LabeledBag> {
        self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn vocab_id(&self) -> &str {
        &self.vocab_id
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn split(&self) -> Split {
        self.split
    }

    /// `(negative, positive)` counts.
    pub fn label_counts(&self) -> (usize, usize) {
        let pos = self.bags.iter().filter(|b| b.label() == 1).count();
        (self.bags.len() - pos, pos)
    }

    /// Concatenates two corpora over the same vocabulary into a [`Split::Full`] corpus.
    pub fn concat(self, other: Corpus) -> Result<Self> {
        if self.vocab_id != other.vocab_id || self.vocab_size != other.vocab_size {
            return Err(Error::InvalidConfig(alloc::format!(
                "cannot concatenate corpora over vocabularies {:?} and {:?}",
                self.vocab_id,
                other.vocab_id
            )));
        }
        let mut bags = self.bags;
        bags.extend(other.bags);
        Ok(Self {
            bags,
            vocab_id: self.vocab_id,
            vocab_size: self.vocab_size,
            split: Split::Full,
        })
    }

    /// Deterministic permutation of the bags for a given seed.
    pub fn shuffle(mut self, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        self.bags.shuffle(&mut rng);
        self
    }
}

/// Lowercases, strips `<br />` markup and splits on anything that is neither
/// alphanumeric nor an apostrophe.
pub fn tokenize_raw(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut rest = lower.as_str();
    while let Some(c) = rest.chars().next() {
        if c == '<' {
            if let Some(len) = line_break_len(rest) {
                flush(&mut current, &mut tokens);
                rest = &rest[len..];
                continue;
            }
        }
        if c.is_alphanumeric() || c == '\'' {
            current.push(c);
        } else {
            flush(&mut current, &mut tokens);
        }
        rest = &rest[c.len_utf8()..];
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if !current.is_empty() {
        tokens.push(core::mem::take(current));
    }
}

/// Byte length of a leading `<br>`, `<br/>` or `<br />` tag.
fn line_break_len(s: &str) -> Option<usize> {
    let tail = s.strip_prefix("<br")?;
    let trimmed = tail.trim_start_matches(' ');
    let trimmed = trimmed.strip_prefix('/').unwrap_or(trimmed);
    let trimmed = trimmed.strip_prefix('>')?;
    Some(s.len() - trimmed.len())
}
