//! Per-epoch metrics as CSV and as `epoch=` progress lines.

use std::fs;
use std::path::Path;

use bowtie_core::EpochMetrics;

use crate::error::{Error, Result};
use crate::format::sig;

pub const CSV_HEADER: &str = "epoch,train_bce,train_acc,val_bce,val_acc,seconds";

pub fn metrics_csv(metrics: &[EpochMetrics]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for m in metrics {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            m.epoch,
            sig(m.train_bce, 6),
            sig(m.train_accuracy, 6),
            sig(m.val_bce, 6),
            sig(m.val_accuracy, 6),
            sig(m.epoch_seconds, 6),
        ));
    }
    out
}

pub fn emit_metrics_csv(metrics: &[EpochMetrics], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, metrics_csv(metrics)).map_err(|e| Error::io(path, e))
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<EpochMetrics>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::parse(path, 1, "unexpected header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::parse(path, i + 2, format!("malformed row {line:?}"));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(EpochMetrics {
                epoch: f[0].parse().map_err(|_| bad())?,
                train_bce: num(f[1])?,
                train_accuracy: num(f[2])?,
                val_bce: num(f[3])?,
                val_accuracy: num(f[4])?,
                epoch_seconds: num(f[5])?,
            })
        })
        .collect()
}

/// One machine-parseable progress line.
pub fn progress_line(m: &EpochMetrics) -> String {
    format!(
        "epoch={} train_bce={:.6} train_acc={:.6} val_bce={:.6} val_acc={:.6} seconds={:.3}",
        m.epoch, m.train_bce, m.train_accuracy, m.val_bce, m.val_accuracy, m.epoch_seconds
    )
}
