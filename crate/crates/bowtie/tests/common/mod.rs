//! Miniature raw SLMRD and KID distributions with a learnable sentiment signal.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const POSITIVE: [&str; 8] = [
    "great",
    "love",
    "superb",
    "moving",
    "brilliant",
    "fun",
    "best",
    "wonderful",
];
pub const NEGATIVE: [&str; 8] = ["awful", "boring", "worst", "dull", "waste", "bad", "poor", "mess"];
pub const NEUTRAL: [&str; 16] = [
    "the", "a", "movie", "film", "plot", "actor", "scene", "and", "of", "it", "was", "this", "story", "end", "cast",
    "music",
];
/// Present only in the KID vocabulary.
pub const KID_ONLY: [&str; 2] = ["walmington", "zzextra"];

pub fn slmrd_tokens() -> Vec<&'static str> {
    POSITIVE
        .iter()
        .chain(NEGATIVE.iter())
        .chain(NEUTRAL.iter())
        .copied()
        .collect()
}

/// KID ranks follow a different order than the SLMRD vocabulary and include
/// two tokens the SLMRD vocabulary lacks.
pub fn kid_tokens() -> Vec<&'static str> {
    let mut t: Vec<&str> = NEUTRAL.iter().rev().copied().collect();
    t.insert(3, KID_ONLY[0]);
    t.extend(NEGATIVE.iter().chain(POSITIVE.iter()));
    t.push(KID_ONLY[1]);
    t
}

pub fn slmrd_polarity() -> Vec<f64> {
    let mut p = Vec::new();
    for i in 0..POSITIVE.len() {
        p.push(1.0 + 0.25 * i as f64);
    }
    for i in 0..NEGATIVE.len() {
        p.push(-1.0 - 0.25 * i as f64);
    }
    for i in 0..NEUTRAL.len() {
        p.push(0.05 * (i as f64 - 7.5));
    }
    p
}

fn review(rng: &mut ChaCha8Rng, tokens: &[&str], label: u8) -> Vec<usize> {
    let pos = |t: &str| tokens.iter().position(|x| *x == t).unwrap();
    let len = rng.gen_range(6..14);
    (0..len)
        .map(|_| {
            let r: f64 = rng.gen();
            if r < 0.45 {
                let set = if label == 1 { &POSITIVE } else { &NEGATIVE };
                pos(set[rng.gen_range(0..set.len())])
            } else if r < 0.52 {
                let set = if label == 1 { &NEGATIVE } else { &POSITIVE };
                pos(set[rng.gen_range(0..set.len())])
            } else if r < 0.55 && tokens.contains(&KID_ONLY[0]) {
                pos(KID_ONLY[0])
            } else {
                pos(NEUTRAL[rng.gen_range(0..NEUTRAL.len())])
            }
        })
        .collect()
}

fn slmrd_bow(rng: &mut ChaCha8Rng, n: usize) -> String {
    let tokens = slmrd_tokens();
    let mut s = String::new();
    for _ in 0..n {
        let label = rng.gen_range(0..2u8);
        let rating = if label == 1 {
            rng.gen_range(7..=10)
        } else {
            rng.gen_range(1..=4)
        };
        let mut counts = std::collections::BTreeMap::new();
        for i in review(rng, &tokens, label) {
            *counts.entry(i).or_insert(0u32) += 1;
        }
        // Raw files do not promise index order.
        let mut pairs: Vec<_> = counts.into_iter().collect();
        pairs.reverse();
        let body: Vec<String> = pairs.iter().map(|(i, c)| format!("{i}:{c}")).collect();
        writeln!(s, "{rating} {}", body.join(" ")).unwrap();
    }
    s
}

fn kid_sequences(rng: &mut ChaCha8Rng, n: usize) -> String {
    let tokens = kid_tokens();
    let mut s = String::new();
    for _ in 0..n {
        let label = rng.gen_range(0..2u8);
        // 1 marks the start of a sequence, 2 an out-of-vocabulary word.
        let mut values = vec![1usize];
        for i in review(rng, &tokens, label) {
            values.push(i + 4);
            if rng.gen_bool(0.05) {
                values.push(2);
            }
        }
        let body: Vec<String> = values.iter().map(usize::to_string).collect();
        writeln!(s, "{label}\t{}", body.join(" ")).unwrap();
    }
    s
}

pub fn write_raw_slmrd(dir: &Path, seed: u64, train: usize, test: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fs::create_dir_all(dir.join("train")).unwrap();
    fs::create_dir_all(dir.join("test")).unwrap();
    fs::write(dir.join("imdb.vocab"), slmrd_tokens().join("\n") + "\n").unwrap();
    let pol: Vec<String> = slmrd_polarity().iter().map(f64::to_string).collect();
    fs::write(dir.join("imdbEr.txt"), pol.join("\n") + "\n").unwrap();
    fs::write(dir.join("train/labeledBow.feat"), slmrd_bow(&mut rng, train)).unwrap();
    fs::write(dir.join("test/labeledBow.feat"), slmrd_bow(&mut rng, test)).unwrap();
}

pub fn write_raw_kid(dir: &Path, seed: u64, train: usize, test: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fs::create_dir_all(dir).unwrap();
    let entries: Vec<String> = kid_tokens()
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{t:?}: {}", i + 1))
        .collect();
    fs::write(dir.join("imdb_word_index.json"), format!("{{{}}}", entries.join(", "))).unwrap();
    fs::write(dir.join("train_sequences.txt"), kid_sequences(&mut rng, train)).unwrap();
    fs::write(dir.join("test_sequences.txt"), kid_sequences(&mut rng, test)).unwrap();
}

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bowtie"));
    for (k, _) in std::env::vars() {
        if k.starts_with("BOWTIE_") {
            c.env_remove(k);
        }
    }
    c.env("BOWTIE_QUIET", "true");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Raw and prepared copies of both datasets in a temporary directory.
pub struct Fixture {
    pub root: tempfile::TempDir,
    pub slmrd: PathBuf,
    pub kid: PathBuf,
}

impl Fixture {
    pub fn new(train: usize, test: usize) -> Self {
        let root = tempfile::tempdir().unwrap();
        let raw_s = root.path().join("raw/aclImdb");
        let raw_k = root.path().join("raw/kid");
        write_raw_slmrd(&raw_s, 11, train, test);
        write_raw_kid(&raw_k, 12, train, test);
        let slmrd = root.path().join("prep/slmrd");
        let kid = root.path().join("prep/kid");
        let o = run(&["prepare", "slmrd", "--input", p(&raw_s), "--output", p(&slmrd)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = run(&["prepare", "kid", "--input", p(&raw_k), "--output", p(&kid)]);
        assert!(o.status.success(), "{}", stderr(&o));
        Self { root, slmrd, kid }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.path().join(rel)
    }
}
