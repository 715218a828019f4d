//! Loaders for the two distributed corpora.
//!
//! SLMRD (`aclImdb/`): `imdb.vocab`, `imdbEr.txt`, `{train,test}/labeledBow.feat`.
//!
//! KID: the Keras word index (`imdb_word_index.json`, token -> 1-based rank)
//! and one text file per split with a review per line, `label<TAB>v1 v2 ...`,
//! holding the raw integer values Keras stores. `scripts/kid_npz_to_text.py`
//! produces these from `imdb.npz`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use bowtie_core::{Corpus, LabeledBag, PolarityTable, Split, Vocabulary};

use crate::error::{Error, Result};

pub const SLMRD_VOCAB: &str = "imdb.vocab";
pub const SLMRD_POLARITY: &str = "imdbEr.txt";
pub const SLMRD_BOW: &str = "labeledBow.feat";
pub const KID_WORD_INDEX: &str = "imdb_word_index.json";
pub const KID_TRAIN: &str = "train_sequences.txt";
pub const KID_TEST: &str = "test_sequences.txt";

/// Keras stores rank `r` as `r + 3`; values 0..=3 are padding, start, OOV and unused.
pub const KID_DEFAULT_OFFSET: u32 = 4;

pub const SLMRD_ID: &str = "slmrd";
pub const KID_ID: &str = "kid";

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Yields `(1-based line number, line)`.
fn lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>> + '_> {
    let reader = open(path)?;
    Ok(reader
        .lines()
        .enumerate()
        .map(move |(i, l)| l.map(|l| (i + 1, l)).map_err(|e| Error::io(path, e))))
}

/// One token per line; the 0-based line number is the index.
pub fn load_slmrd_vocab(path: &Path) -> Result<Vocabulary> {
    let mut tokens = Vec::new();
    for item in lines(path)? {
        let (n, line) = item?;
        let tok = line.trim_end_matches('\r');
        if tok.is_empty() {
            return Err(Error::parse(path, n, "empty token line"));
        }
        tokens.push(tok.to_owned());
    }
    Vocabulary::from_tokens(tokens).map_err(|e| Error::data(path, e))
}

/// One real number per line, aligned with `vocab`.
pub fn load_polarity(path: &Path, vocab: &Vocabulary) -> Result<PolarityTable> {
    let mut ratings = Vec::with_capacity(vocab.len());
    for item in lines(path)? {
        let (n, line) = item?;
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, n, format!("not a number: {line:?}")))?;
        ratings.push(v);
    }
    PolarityTable::new(ratings, vocab).map_err(|e| Error::data(path, e))
}

/// Rating >= 7 is positive, <= 4 negative; 5 and 6 are rejected.
pub fn label_from_rating(rating: u32) -> Option<u8> {
    match rating {
        1..=4 => Some(0),
        7..=10 => Some(1),
        _ => None,
    }
}

/// `labeledBow.feat`: each line `rating idx:count idx:count ...`.
pub fn load_slmrd_bow(path: &Path, vocab: &Vocabulary, split: Split) -> Result<Corpus> {
    let mut bags = Vec::new();
    for item in lines(path)? {
        let (n, line) = item?;
        let mut fields = line.split_ascii_whitespace();
        let Some(head) = fields.next() else {
            return Err(Error::parse(path, n, "empty line"));
        };
        let rating: u32 = head
            .parse()
            .map_err(|_| Error::parse(path, n, format!("bad rating {head:?}")))?;
        let label = label_from_rating(rating)
            .ok_or_else(|| Error::parse(path, n, format!("rating {rating} has no binary label")))?;
        let mut pairs = Vec::new();
        for field in fields {
            let (idx, count) =
                parse_pair(field).ok_or_else(|| Error::parse(path, n, format!("malformed pair {field:?}")))?;
            if idx as usize >= vocab.len() {
                return Err(Error::parse(
                    path,
                    n,
                    format!("index {idx} out of range for vocabulary of {}", vocab.len()),
                ));
            }
            pairs.push((idx, count));
        }
        let bag = LabeledBag::from_unsorted(pairs, label).map_err(|e| Error::parse(path, n, e.to_string()))?;
        bags.push(bag);
    }
    Corpus::new(bags, SLMRD_ID, vocab.len(), split).map_err(|e| Error::data(path, e))
}

fn parse_pair(field: &str) -> Option<(u32, u32)> {
    let (i, c) = field.split_once(':')?;
    Some((i.parse().ok()?, c.parse().ok()?))
}

/// Keras word index: JSON object token -> rank, ranks dense in `1..=N`.
pub fn load_kid_vocab(path: &Path) -> Result<Vocabulary> {
    let map: HashMap<String, u64> = serde_json::from_reader(open(path)?).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })?;
    let n = map.len();
    let mut slots: Vec<Option<String>> = vec![None; n];
    for (tok, rank) in map {
        let slot = rank
            .checked_sub(1)
            .and_then(|r| slots.get_mut(r as usize))
            .ok_or_else(|| Error::parse(path, 0, format!("rank {rank} of {tok:?} outside 1..={n}")))?;
        if let Some(prev) = slot {
            return Err(Error::parse(
                path,
                0,
                format!("rank {rank} shared by {prev:?} and {tok:?}"),
            ));
        }
        *slot = Some(tok);
    }
    let tokens: Vec<String> = slots.into_iter().map(|s| s.expect("dense ranks")).collect();
    Vocabulary::from_tokens(tokens).map_err(|e| Error::data(path, e))
}

/// One split of KID sequences, folded into bags.
///
/// Stored values below `index_offset` are control codes and are dropped; the
/// rest map to vocabulary index `value - index_offset`.
pub fn load_kid_sequences(path: &Path, vocab: &Vocabulary, index_offset: u32, split: Split) -> Result<Corpus> {
    let mut bags = Vec::new();
    for item in lines(path)? {
        let (n, line) = item?;
        let (label, seq) = match line.split_once('\t') {
            Some((l, s)) => (l.trim(), s),
            None => (line.trim(), ""),
        };
        let label: u8 = match label {
            "0" => 0,
            "1" => 1,
            "" => return Err(Error::parse(path, n, "missing label")),
            other => return Err(Error::parse(path, n, format!("bad label {other:?}"))),
        };
        let mut indices = Vec::new();
        for field in seq.split_ascii_whitespace() {
            let v: u64 = field
                .parse()
                .map_err(|_| Error::parse(path, n, format!("bad value {field:?}")))?;
            if v < u64::from(index_offset) {
                continue;
            }
            let idx = v - u64::from(index_offset);
            if idx >= vocab.len() as u64 {
                return Err(Error::parse(
                    path,
                    n,
                    format!(
                        "rank {idx} outside [0, {}) after removing offset {index_offset}",
                        vocab.len()
                    ),
                ));
            }
            indices.push(idx as u32);
        }
        bags.push(LabeledBag::from_sequence(indices, label).map_err(|e| Error::parse(path, n, e.to_string()))?);
    }
    Corpus::new(bags, KID_ID, vocab.len(), split).map_err(|e| Error::data(path, e))
}

pub fn load_kid(word_index: &Path, sequences: &Path, index_offset: u32, split: Split) -> Result<(Vocabulary, Corpus)> {
    let vocab = load_kid_vocab(word_index)?;
    let corpus = load_kid_sequences(sequences, &vocab, index_offset, split)?;
    Ok((vocab, corpus))
}

/// Train and test corpora over one vocabulary.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub vocab: Vocabulary,
    pub polarity: Option<PolarityTable>,
    pub train: Corpus,
    pub test: Corpus,
}

fn require(dir: &Path, rel: &str) -> Result<PathBuf> {
    let p = dir.join(rel);
    if p.is_file() {
        Ok(p)
    } else {
        Err(Error::MissingFile(p))
    }
}

/// Loads an unpacked `aclImdb/` directory.
pub fn load_slmrd_dir(dir: &Path) -> Result<RawDataset> {
    let vocab_path = require(dir, SLMRD_VOCAB)?;
    let polarity_path = require(dir, SLMRD_POLARITY)?;
    let train_path = require(dir, &format!("train/{SLMRD_BOW}"))?;
    let test_path = require(dir, &format!("test/{SLMRD_BOW}"))?;
    let vocab = load_slmrd_vocab(&vocab_path)?;
    let polarity = load_polarity(&polarity_path, &vocab)?;
    let train = load_slmrd_bow(&train_path, &vocab, Split::Train)?;
    let test = load_slmrd_bow(&test_path, &vocab, Split::Test)?;
    Ok(RawDataset {
        vocab,
        polarity: Some(polarity),
        train,
        test,
    })
}

/// Loads a KID directory with the word index and both sequence files.
pub fn load_kid_dir(dir: &Path, index_offset: u32) -> Result<RawDataset> {
    let wi = require(dir, KID_WORD_INDEX)?;
    let train_path = require(dir, KID_TRAIN)?;
    let test_path = require(dir, KID_TEST)?;
    let vocab = load_kid_vocab(&wi)?;
    let train = load_kid_sequences(&train_path, &vocab, index_offset, Split::Train)?;
    let test = load_kid_sequences(&test_path, &vocab, index_offset, Split::Test)?;
    Ok(RawDataset {
        vocab,
        polarity: None,
        train,
        test,
    })
}
