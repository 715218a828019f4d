use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bowtie::checkpoint::Checkpoint;
use bowtie::commands::{self, EvalSplit, Source};
use bowtie::datasets::KID_DEFAULT_OFFSET;
use bowtie::format::read_prepared;
use bowtie::metrics::metrics_csv;
use bowtie::scenario::{self, RunManifest, Scenario, ScenarioPaths, Settings};
use bowtie::{Error, Result};
use bowtie_core::EncodingKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bowtie",
    version,
    about = "Bag-of-words sentiment classifier for IMDB reviews"
)]
struct Cli {
    /// Suppress per-epoch progress on stderr.
    #[arg(long, global = true, env = "BOWTIE_QUIET")]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw dataset distribution into the canonical prepared form.
    Prepare {
        /// `slmrd` (aclImdb) or `kid` (Keras word index plus sequences).
        dataset: String,
        #[arg(long, env = "BOWTIE_INPUT")]
        input: PathBuf,
        #[arg(long, env = "BOWTIE_OUTPUT")]
        output: PathBuf,
        /// Stored KID value of the most frequent word.
        #[arg(long, env = "BOWTIE_INDEX_OFFSET", default_value_t = KID_DEFAULT_OFFSET)]
        index_offset: u32,
    },
    /// Run one of the four benchmark scenarios and report its verdict.
    Scenario {
        number: u8,
        #[arg(long, env = "BOWTIE_SLMRD")]
        slmrd: Option<PathBuf>,
        #[arg(long, env = "BOWTIE_KID")]
        kid: Option<PathBuf>,
        #[arg(long, env = "BOWTIE_OUT", default_value = "runs")]
        out: PathBuf,
        /// Train for the full epoch budget even after the target accuracy is reached.
        #[arg(long, env = "BOWTIE_NO_EARLY_STOP")]
        no_early_stop: bool,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Train on a prepared dataset and write metrics, checkpoint and manifest.
    Train {
        #[arg(long, env = "BOWTIE_DATA")]
        data: PathBuf,
        #[arg(long, env = "BOWTIE_ENCODING", default_value = "multi-hot")]
        encoding: String,
        #[arg(long, env = "BOWTIE_OUT", default_value = "runs/train")]
        out: PathBuf,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Score a checkpoint on a prepared dataset.
    Eval {
        #[arg(long, env = "BOWTIE_CHECKPOINT")]
        checkpoint: PathBuf,
        #[arg(long, env = "BOWTIE_DATA")]
        data: PathBuf,
        /// `train`, `test` or `all`.
        #[arg(long, env = "BOWTIE_SPLIT", default_value = "test")]
        split: String,
        #[arg(long, env = "BOWTIE_THREADS", default_value_t = 1)]
        threads: usize,
    },
    /// Map a source corpus onto the checkpoint's vocabulary and score every review.
    Transfer {
        #[arg(long, env = "BOWTIE_CHECKPOINT")]
        checkpoint: PathBuf,
        /// Prepared dataset whose reviews are transferred.
        #[arg(long, env = "BOWTIE_SOURCE")]
        source: PathBuf,
        /// Prepared dataset the checkpoint was trained on.
        #[arg(long, env = "BOWTIE_TARGET")]
        target: PathBuf,
        #[arg(long, env = "BOWTIE_REPORT")]
        report: Option<PathBuf>,
        #[arg(long, env = "BOWTIE_THREADS", default_value_t = 1)]
        threads: usize,
    },
    /// Print polarity-weighted element and row-sum ranges of a dataset.
    Stats {
        #[arg(long, env = "BOWTIE_DATA")]
        data: PathBuf,
        /// `train`, `test` or `all`.
        #[arg(long, env = "BOWTIE_SPLIT", default_value = "all")]
        split: String,
        /// Map onto this dataset's vocabulary and polarity table first.
        #[arg(long, env = "BOWTIE_ONTO")]
        onto: Option<PathBuf>,
    },
    /// Rerun the command recorded in a manifest.
    Replay {
        #[arg(env = "BOWTIE_MANIFEST")]
        manifest: PathBuf,
        #[arg(long, env = "BOWTIE_OUT")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SettingsArgs {
    /// Comma-separated hidden widths; the last must be 1.
    #[arg(long, value_delimiter = ',', env = "BOWTIE_HIDDEN")]
    hidden: Option<Vec<usize>>,
    /// `none` or `relu`.
    #[arg(long, env = "BOWTIE_ACTIVATION")]
    activation: Option<String>,
    #[arg(long, env = "BOWTIE_DROPOUT")]
    dropout: Option<f64>,
    #[arg(long, env = "BOWTIE_L2")]
    l2: Option<f64>,
    /// Probability at or above which a review is positive.
    #[arg(long, env = "BOWTIE_DELTA")]
    delta: Option<f64>,
    /// `sgd`, `rmsprop`, `adam` or `nadam`.
    #[arg(long, env = "BOWTIE_OPTIMIZER")]
    optimizer: Option<String>,
    #[arg(long, env = "BOWTIE_LR")]
    lr: Option<f64>,
    #[arg(long, env = "BOWTIE_BATCH_SIZE")]
    batch_size: Option<usize>,
    #[arg(long, env = "BOWTIE_EPOCHS")]
    epochs: Option<usize>,
    #[arg(long, env = "BOWTIE_TARGET_ACC")]
    target_acc: Option<f64>,
    #[arg(long, env = "BOWTIE_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "BOWTIE_THREADS")]
    threads: Option<usize>,
}

impl SettingsArgs {
    fn apply(self, mut s: Settings) -> Settings {
        if let Some(v) = self.hidden {
            s.hidden = v;
        }
        if let Some(v) = self.activation {
            s.activation = v;
        }
        if let Some(v) = self.dropout {
            s.dropout = v;
        }
        if let Some(v) = self.l2 {
            s.l2 = v;
        }
        if let Some(v) = self.delta {
            s.delta = v;
        }
        if let Some(v) = self.optimizer {
            s.optimizer = v;
        }
        if let Some(v) = self.lr {
            s.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            s.batch_size = v;
        }
        if let Some(v) = self.epochs {
            s.epochs = v;
        }
        if let Some(v) = self.target_acc {
            s.target_acc = Some(v);
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.threads {
            s.threads = v;
        }
        s
    }
}

fn print_manifest_paths(manifest: &RunManifest) {
    for a in &manifest.artifacts {
        println!("wrote {}", a.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let progress = !cli.quiet;
    match cli.command {
        Command::Prepare {
            dataset,
            input,
            output,
            index_offset,
        } => {
            let source: Source = dataset.parse()?;
            let summary = commands::prepare(source, &input, &output, index_offset)?;
            println!(
                "prepared {} vocab={} train={} ({} neg, {} pos) test={} ({} neg, {} pos) polarity={}",
                summary.name,
                summary.vocab_size,
                summary.train.reviews,
                summary.train.negative,
                summary.train.positive,
                summary.test.reviews,
                summary.test.negative,
                summary.test.positive,
                summary.has_polarity
            );
        }
        Command::Scenario {
            number,
            slmrd,
            kid,
            out,
            no_early_stop,
            settings,
        } => {
            let scenario = Scenario::from_number(number)?;
            let mut s = settings.apply(scenario::scenario_settings(scenario));
            if no_early_stop {
                s.target_acc = None;
            }
            let paths = ScenarioPaths {
                slmrd: slmrd.as_deref(),
                kid: kid.as_deref(),
                out: &out,
            };
            let outcome = scenario::run_scenario(scenario, &paths, &s, progress)?;
            print!("{}", metrics_csv(&outcome.metrics));
            if let Some(report) = &outcome.transfer {
                println!(
                    "transfer mapped={} dropped={} reviews={}",
                    report.mapped_tokens,
                    report.dropped.len(),
                    report.reviews
                );
            }
            print_manifest_paths(&outcome.manifest);
            println!("{}", outcome.verdict.line());
            if !outcome.verdict.passed {
                return Err(Error::Verdict(format!(
                    "scenario {} {}={:.4} below {:.4}",
                    outcome.verdict.scenario, outcome.verdict.metric, outcome.verdict.value, outcome.verdict.threshold
                )));
            }
        }
        Command::Train {
            data,
            encoding,
            out,
            settings,
        } => {
            let encoding: EncodingKind = encoding.parse()?;
            let s = settings.apply(Settings::default());
            let (manifest, metrics) = scenario::run_train_command(&data, encoding, &s, &out, progress)?;
            print!("{}", metrics_csv(&metrics));
            print_manifest_paths(&manifest);
        }
        Command::Eval {
            checkpoint,
            data,
            split,
            threads,
        } => {
            let split: EvalSplit = split.parse()?;
            let ck = Checkpoint::load(&checkpoint)?;
            let prepared = read_prepared(&data)?;
            let eval = commands::evaluate(&ck, &prepared, split, threads)?;
            println!("{}", commands::render_evaluation(&eval));
        }
        Command::Transfer {
            checkpoint,
            source,
            target,
            report,
            threads,
        } => {
            let ck = Checkpoint::load(&checkpoint)?;
            let source = read_prepared(&source)?;
            let target = read_prepared(&target)?;
            let r = commands::transfer(&ck, &source, &target, threads)?;
            match report {
                Some(path) => {
                    r.write(&path)?;
                    for (k, v) in r.footer() {
                        println!("{k}={v}");
                    }
                    println!("wrote {}", path.display());
                }
                None => print!("{}", r.render()),
            }
        }
        Command::Stats { data, split, onto } => {
            let split: EvalSplit = split.parse()?;
            let data = read_prepared(&data)?;
            let onto = onto.as_deref().map(read_prepared).transpose()?;
            let s = commands::stats(&data, split, onto.as_ref())?;
            println!("{}", commands::render_stats(&s));
        }
        Command::Replay { manifest, out } => {
            let m = RunManifest::read(&manifest)?;
            let metrics = scenario::replay(&m, out.as_deref(), progress)?;
            print!("{}", metrics_csv(&metrics));
            let dir = out.as_deref().unwrap_or(&m.out);
            println!("wrote {}", Path::new(dir).display());
        }
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn fail(kind: &str, code: i32, message: &str) -> ExitCode {
    eprintln!("error kind={kind} exit={code} message={:?}", one_line(message));
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return fail("usage", 1, first.trim_start_matches("error: "));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.exit_code(), &e.to_string()),
    }
}
