mod common;

use std::fs;

use bowtie::checkpoint::Checkpoint;
use bowtie::commands::{self, EvalSplit};
use bowtie::format::read_prepared;
use bowtie::metrics::read_metrics_csv;
use bowtie::scenario::{run_training, RunManifest, Settings};
use bowtie::transfer::parse_footer;
use bowtie_core::EncodingKind;
use common::{p, run, stderr, stdout, Fixture};

fn small(epochs: &str) -> Vec<&str> {
    vec![
        "--hidden",
        "4,1",
        "--epochs",
        epochs,
        "--batch-size",
        "16",
        "--lr",
        "0.01",
        "--seed",
        "3",
    ]
}

#[test]
fn prepare_writes_canonical_dirs() {
    let fx = Fixture::new(40, 30);
    let slmrd = read_prepared(&fx.slmrd).unwrap();
    assert_eq!(slmrd.data.vocab.len(), common::slmrd_tokens().len());
    assert_eq!(slmrd.data.train.len(), 40);
    assert!(slmrd.data.polarity.is_some());
    let kid = read_prepared(&fx.kid).unwrap();
    assert_eq!(kid.data.vocab.len(), common::kid_tokens().len());
    assert_eq!(kid.data.test.len(), 30);
    assert!(kid.data.polarity.is_none());
    assert_eq!(kid.data.vocab.token(0), Some(common::kid_tokens()[0]));
}

#[test]
fn scenario_end_to_end_writes_artifacts_and_verdict() {
    let fx = Fixture::new(300, 200);
    let out = fx.path("s4");
    let mut args = vec![
        "scenario",
        "4",
        "--slmrd",
        p(&fx.slmrd),
        "--kid",
        p(&fx.kid),
        "--out",
        p(&out),
    ];
    args.extend(small("8"));
    let o = run(&args);
    let text = stdout(&o);
    let verdict = text.lines().find(|l| l.starts_with("verdict ")).expect("verdict line");
    assert!(verdict.contains("scenario=4 metric=transfer_accuracy"), "{verdict}");
    let passed = verdict.ends_with("result=PASS");
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 4 }), "{}", stderr(&o));

    for f in ["metrics.csv", "model.ckpt", "manifest.json", "transfer_report.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report = fs::read_to_string(out.join("transfer_report.txt")).unwrap();
    let footer = parse_footer(&report);
    let get = |k: &str| footer.iter().find(|(a, _)| a == k).unwrap().1.clone();
    assert_eq!(get("dropped_tokens"), "2");
    assert!(report.contains("walmington"));
    let mapped: usize = get("mapped_tokens").parse().unwrap();
    assert_eq!(mapped + 2, common::kid_tokens().len());
    assert_eq!(get("reviews"), "500");
    let manifest = RunManifest::read(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.scenario, Some(4));
    assert_eq!(manifest.verdict.unwrap().passed, passed);
}

#[test]
fn synthetic_signal_is_learned() {
    let fx = Fixture::new(300, 200);
    let out = fx.path("s3");
    let mut args = vec![
        "scenario",
        "3",
        "--slmrd",
        p(&fx.slmrd),
        "--out",
        p(&out),
        "--no-early-stop",
    ];
    args.extend(small("10"));
    let o = run(&args);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(4));
    let m = read_metrics_csv(&out.join("metrics.csv")).unwrap();
    assert_eq!(m.len(), 10);
    assert!(m.last().unwrap().val_accuracy > 0.8, "{:?}", m.last());
    assert!(m.last().unwrap().train_bce < m[0].train_bce);
}

#[test]
fn checkpoint_reload_and_eval_are_exact() {
    let fx = Fixture::new(120, 80);
    let prepared = read_prepared(&fx.slmrd).unwrap();
    let settings = Settings {
        hidden: vec![4, 1],
        epochs: 3,
        batch_size: 32,
        learning_rate: 0.01,
        ..Settings::default()
    };
    let outcome = run_training(&prepared, EncodingKind::PolarityWeighted, &settings, false).unwrap();
    let path = fx.path("ck/model.ckpt");
    outcome.checkpoint.save(&path).unwrap();
    let back = Checkpoint::load(&path).unwrap();
    let a: Vec<u64> = outcome.checkpoint.model.parameters().map(f64::to_bits).collect();
    let b: Vec<u64> = back.model.parameters().map(f64::to_bits).collect();
    assert_eq!(a, b);

    let e1 = commands::evaluate(&outcome.checkpoint, &prepared, EvalSplit::Test, 1).unwrap();
    let e2 = commands::evaluate(&back, &prepared, EvalSplit::Test, 3).unwrap();
    assert_eq!(e1.accuracy.to_bits(), e2.accuracy.to_bits());
    assert_eq!(e1.bce.to_bits(), e2.bce.to_bits());
    let last = outcome.metrics.last().unwrap();
    assert_eq!(e1.bce.to_bits(), last.val_bce.to_bits());
    assert_eq!(e1.accuracy.to_bits(), last.val_accuracy.to_bits());

    let o = run(&["eval", "--checkpoint", p(&path), "--data", p(&fx.slmrd)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), commands::render_evaluation(&e1));
}

#[test]
fn fingerprint_mismatch_is_rejected() {
    let fx = Fixture::new(60, 40);
    let out = fx.path("t");
    let mut args = vec!["train", "--data", p(&fx.slmrd), "--out", p(&out)];
    args.extend(small("1"));
    assert!(run(&args).status.success());
    let ck = out.join("model.ckpt");
    let o = run(&["eval", "--checkpoint", p(&ck), "--data", p(&fx.kid)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).starts_with("error kind=fingerprint exit=2 "),
        "{}",
        stderr(&o)
    );
}

#[test]
fn scenario_number_out_of_range_is_usage_error() {
    for n in ["0", "5"] {
        let o = run(&["scenario", n, "--slmrd", "x"]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).starts_with("error kind=usage exit=1 "), "{}", stderr(&o));
    }
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn prepare_on_empty_dir_names_missing_file() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&[
        "prepare",
        "slmrd",
        "--input",
        p(d.path()),
        "--output",
        p(&d.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.starts_with("error kind=missing-file exit=2 "), "{e}");
    assert!(e.contains("imdb.vocab"), "{e}");
    let o = run(&[
        "prepare",
        "kid",
        "--input",
        p(d.path()),
        "--output",
        p(&d.path().join("o")),
    ]);
    assert!(stderr(&o).contains("imdb_word_index.json"));
}

#[test]
fn corrupt_checkpoint_is_reported() {
    let fx = Fixture::new(30, 20);
    let ck = fx.path("bad.ckpt");
    fs::write(&ck, b"NOTACKPT\x01\0\0\0").unwrap();
    let o = run(&["eval", "--checkpoint", p(&ck), "--data", p(&fx.slmrd)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).starts_with("error kind=checkpoint-version"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn divergence_exits_three() {
    let fx = Fixture::new(60, 40);
    let o = run(&[
        "train",
        "--data",
        p(&fx.slmrd),
        "--encoding",
        "polarity-weighted",
        "--out",
        p(&fx.path("d")),
        "--optimizer",
        "sgd",
        "--lr",
        "1e308",
        "--l2",
        "0",
        "--epochs",
        "2",
        "--batch-size",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(
        stderr(&o).starts_with("error kind=divergence exit=3 "),
        "{}",
        stderr(&o)
    );
}

fn strip_seconds(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_owned()).collect()
}

#[test]
fn replay_reproduces_metrics_and_checkpoint() {
    let fx = Fixture::new(120, 80);
    let a = fx.path("a");
    let mut args = vec![
        "train",
        "--data",
        p(&fx.slmrd),
        "--encoding",
        "polarity-weighted",
        "--out",
        p(&a),
    ];
    args.extend(small("4"));
    assert!(run(&args).status.success());
    let b = fx.path("b");
    let o = run(&["replay", p(&a.join("manifest.json")), "--out", p(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ma = fs::read_to_string(a.join("metrics.csv")).unwrap();
    let mb = fs::read_to_string(b.join("metrics.csv")).unwrap();
    assert_eq!(strip_seconds(&ma), strip_seconds(&mb));
    assert_eq!(
        fs::read(a.join("model.ckpt")).unwrap(),
        fs::read(b.join("model.ckpt")).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let fx = Fixture::new(120, 80);
    let mut outs = Vec::new();
    for t in ["1", "4"] {
        let out = fx.path(&format!("t{t}"));
        let mut args = vec!["train", "--data", p(&fx.kid), "--out", p(&out), "--threads", t];
        args.extend(small("3"));
        assert!(run(&args).status.success());
        outs.push(out);
    }
    let m: Vec<_> = outs
        .iter()
        .map(|o| fs::read_to_string(o.join("metrics.csv")).unwrap())
        .collect();
    assert_eq!(strip_seconds(&m[0]), strip_seconds(&m[1]));
    assert_eq!(
        fs::read(outs[0].join("model.ckpt")).unwrap(),
        fs::read(outs[1].join("model.ckpt")).unwrap()
    );
}

#[test]
fn stats_reports_ranges() {
    let fx = Fixture::new(40, 30);
    let o = run(&["stats", "--data", p(&fx.slmrd), "--split", "train"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("element_min="), "{line}");
    let o = run(&["stats", "--data", p(&fx.kid), "--onto", p(&fx.slmrd)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["stats", "--data", p(&fx.kid)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn transfer_command_matches_library() {
    let fx = Fixture::new(100, 60);
    let out = fx.path("t");
    let mut args = vec![
        "train",
        "--data",
        p(&fx.slmrd),
        "--encoding",
        "polarity-weighted",
        "--out",
        p(&out),
    ];
    args.extend(small("2"));
    assert!(run(&args).status.success());
    let ck = out.join("model.ckpt");
    let report = fx.path("r/report.txt");
    let o = run(&[
        "transfer",
        "--checkpoint",
        p(&ck),
        "--source",
        p(&fx.kid),
        "--target",
        p(&fx.slmrd),
        "--report",
        p(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lib = commands::transfer(
        &Checkpoint::load(&ck).unwrap(),
        &read_prepared(&fx.kid).unwrap(),
        &read_prepared(&fx.slmrd).unwrap(),
        1,
    )
    .unwrap();
    assert_eq!(fs::read_to_string(report).unwrap(), lib.render());
    assert_eq!(lib.reviews, 160);
}

#[test]
fn train_stops_at_first_qualifying_epoch() {
    let fx = Fixture::new(200, 100);
    let out = fx.path("es");
    let mut args = vec![
        "train",
        "--data",
        p(&fx.slmrd),
        "--encoding",
        "polarity-weighted",
        "--out",
        p(&out),
    ];
    args.extend(small("30"));
    args.extend(["--target-acc", "0.75"]);
    assert!(run(&args).status.success());
    let m = read_metrics_csv(&out.join("metrics.csv")).unwrap();
    assert!(m.len() < 30, "never reached target");
    let (last, before) = m.split_last().unwrap();
    assert!(last.val_accuracy >= 0.75);
    assert!(before.iter().all(|e| e.val_accuracy < 0.75));
}

#[test]
fn environment_supplies_paths_and_flags() {
    let fx = Fixture::new(40, 30);
    let o = common::bin()
        .args(["stats"])
        .env("BOWTIE_DATA", &fx.slmrd)
        .env("BOWTIE_SPLIT", "train")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let flag = run(&["stats", "--data", p(&fx.slmrd), "--split", "train"]);
    assert_eq!(stdout(&o), stdout(&flag));
    let o = common::bin()
        .args(["scenario", "3", "--out", p(&fx.path("env"))])
        .env("BOWTIE_SLMRD", &fx.slmrd)
        .env("BOWTIE_EPOCHS", "1")
        .env("BOWTIE_BATCH_SIZE", "8")
        .output()
        .unwrap();
    assert!(matches!(o.status.code(), Some(0) | Some(4)), "{}", stderr(&o));
    assert_eq!(read_metrics_csv(&fx.path("env/metrics.csv")).unwrap().len(), 1);
}
