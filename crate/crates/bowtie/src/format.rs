//! Canonical on-disk forms produced by `bowtie prepare` and consumed by every
//! other command.
//!
//! A prepared directory holds:
//!
//! - `vocab.txt`: one token per line, line number (0-based) is the index;
//! - `polarity.txt`: one rating per line (only for corpora that ship one);
//! - `train.bow`, `test.bow`: one review per line, `label<TAB>idx:count ...`
//!   with ascending indices;
//! - `dataset.json`: dataset name and counts.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use bowtie_core::{Corpus, EncodedDataset, LabeledBag, PolarityTable, Split, Vocabulary};
use serde::{Deserialize, Serialize};

use crate::datasets::{self, RawDataset};
use crate::error::{Error, Result};

pub const VOCAB_FILE: &str = "vocab.txt";
pub const POLARITY_FILE: &str = "polarity.txt";
pub const TRAIN_FILE: &str = "train.bow";
pub const TEST_FILE: &str = "test.bow";
pub const SUMMARY_FILE: &str = "dataset.json";

/// Rounds to `digits` significant digits and prints the shortest form.
pub fn sig(v: f64, digits: usize) -> String {
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v);
    format!("{rounded}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn format_bag(bag: &LabeledBag) -> String {
    let mut line = bag.label().to_string();
    line.push('\t');
    let body: Vec<String> = bag.counts().iter().map(|(i, c)| format!("{i}:{c}")).collect();
    line.push_str(&body.join(" "));
    line
}

pub fn parse_bag(line: &str) -> std::result::Result<LabeledBag, String> {
    let (label, body) = line.split_once('\t').ok_or("missing tab after label")?;
    let label = match label {
        "0" => 0,
        "1" => 1,
        other => return Err(format!("bad label {other:?}")),
    };
    let mut counts = Vec::new();
    for field in body.split(' ').filter(|f| !f.is_empty()) {
        let (i, c) = field
            .split_once(':')
            .ok_or_else(|| format!("malformed pair {field:?}"))?;
        let i = i.parse().map_err(|_| format!("bad index {i:?}"))?;
        let c = c.parse().map_err(|_| format!("bad count {c:?}"))?;
        counts.push((i, c));
    }
    LabeledBag::new(counts, label).map_err(|e| e.to_string())
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for bag in corpus.bags() {
        writeln!(w, "{}", format_bag(bag)).map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

pub fn read_corpus(path: &Path, vocab_id: &str, vocab_size: usize, split: Split) -> Result<Corpus> {
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut bags = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let bag = parse_bag(&line).map_err(|m| Error::parse(path, i + 1, m))?;
        bag.check_width(vocab_size)
            .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        bags.push(bag);
    }
    Corpus::new(bags, vocab_id, vocab_size, split).map_err(|e| Error::data(path, e))
}

pub fn write_vocab(vocab: &Vocabulary, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for tok in vocab.tokens() {
        writeln!(w, "{tok}").map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

pub fn read_vocab(path: &Path) -> Result<Vocabulary> {
    datasets::load_slmrd_vocab(path)
}

/// Ratings in shortest round-trip form, so reloading is exact.
pub fn write_polarity(table: &PolarityTable, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for r in table.ratings() {
        writeln!(w, "{r}").map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

/// `label<TAB>idx:value ...` with values at 9 significant digits.
pub fn write_encoded(dataset: &EncodedDataset, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for ex in dataset.examples() {
        let body: Vec<String> = ex
            .entries()
            .iter()
            .map(|&(i, v)| format!("{i}:{}", sig(v, 9)))
            .collect();
        writeln!(w, "{}\t{}", ex.label(), body.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub vocab_size: usize,
    pub has_polarity: bool,
    pub train: SplitSummary,
    pub test: SplitSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub reviews: usize,
    pub negative: usize,
    pub positive: usize,
}

impl SplitSummary {
    fn of(c: &Corpus) -> Self {
        let (negative, positive) = c.label_counts();
        Self {
            reviews: c.len(),
            negative,
            positive,
        }
    }
}

pub fn summarize(name: &str, ds: &RawDataset) -> DatasetSummary {
    DatasetSummary {
        name: name.to_owned(),
        vocab_size: ds.vocab.len(),
        has_polarity: ds.polarity.is_some(),
        train: SplitSummary::of(&ds.train),
        test: SplitSummary::of(&ds.test),
    }
}

pub fn write_prepared(name: &str, ds: &RawDataset, dir: &Path) -> Result<DatasetSummary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_vocab(&ds.vocab, &dir.join(VOCAB_FILE))?;
    if let Some(p) = &ds.polarity {
        write_polarity(p, &dir.join(POLARITY_FILE))?;
    }
    write_corpus(&ds.train, &dir.join(TRAIN_FILE))?;
    write_corpus(&ds.test, &dir.join(TEST_FILE))?;
    let summary = summarize(name, ds);
    let path = dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&summary).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub name: String,
    pub dir: PathBuf,
    pub data: RawDataset,
}

pub fn read_prepared(dir: &Path) -> Result<Prepared> {
    let summary_path = dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&summary_path).map_err(|e| Error::io(&summary_path, e))?;
    let summary: DatasetSummary = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: summary_path.clone(),
        source,
    })?;
    let vocab = read_vocab(&dir.join(VOCAB_FILE))?;
    let polarity = if summary.has_polarity {
        Some(datasets::load_polarity(&dir.join(POLARITY_FILE), &vocab)?)
    } else {
        None
    };
    let train = read_corpus(&dir.join(TRAIN_FILE), &summary.name, vocab.len(), Split::Train)?;
    let test = read_corpus(&dir.join(TEST_FILE), &summary.name, vocab.len(), Split::Test)?;
    Ok(Prepared {
        name: summary.name,
        dir: dir.to_owned(),
        data: RawDataset {
            vocab,
            polarity,
            train,
            test,
        },
    })
}
