//! Batch labeling of a manifest with a bounded worker pool.
//!
//! Workers share only the immutable settings and send finished records over
//! a channel; the calling thread is the single writer. Each clip's seed comes
//! from its id, so content does not depend on the number of workers or the
//! order in which they finish.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::error::{exit, CliError, Result};
use crate::pipeline::{label, load_clip};
use crate::records::{LabelRecord, ManifestRecord};

#[derive(Debug, Clone, Copy, Default)]
pub struct BatchOptions {
    /// Write records in manifest order instead of completion order.
    pub sorted: bool,
    /// Record `elapsed_ms = 0` so that outputs of repeated runs are byte-identical.
    pub no_timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedClip {
    pub id: String,
    pub error: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub total: usize,
    pub labeled: usize,
    pub non_stationary: usize,
    /// `None` when nothing was labeled.
    pub non_stationary_fraction: Option<f64>,
    pub failed: Vec<FailedClip>,
}

impl std::fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "labeled {}/{} clips", self.labeled, self.total)?;
        if let Some(frac) = self.non_stationary_fraction {
            write!(f, "; non-stationary {} ({:.1}%)", self.non_stationary, 100.0 * frac)?;
        }
        if !self.failed.is_empty() {
            let ids: Vec<&str> = self.failed.iter().map(|c| c.id.as_str()).collect();
            write!(f, "; {} failed: {}", self.failed.len(), ids.join(", "))?;
        }
        Ok(())
    }
}

fn label_one(record: &ManifestRecord, settings: &Settings, opts: BatchOptions) -> Result<LabelRecord> {
    let clip = load_clip(&record.path, record.start_sec, &record.id)?;
    let labeled = label(&clip, settings)?;
    let mut out = labeled.record(settings);
    out.path = Some(record.path.clone());
    out.start_sec = record.start_sec;
    if opts.no_timing {
        out.elapsed_ms = 0.0;
    }
    Ok(out)
}

fn isolated(record: &ManifestRecord, settings: &Settings, opts: BatchOptions) -> std::result::Result<LabelRecord, FailedClip> {
    match catch_unwind(AssertUnwindSafe(|| label_one(record, settings, opts))) {
        Ok(Ok(r)) => Ok(r),
        Ok(Err(e)) => Err(FailedClip {
            id: record.id.clone(),
            error: e.to_string(),
            exit_code: e.exit_code(),
        }),
        Err(_) => Err(FailedClip {
            id: record.id.clone(),
            error: "internal error while labeling".into(),
            exit_code: exit::PRECONDITION,
        }),
    }
}

/// Labels every record and writes one JSON line per successful clip to
/// `out`. Failed clips are reported in the summary, never fatal.
pub fn run_batch(records: &[ManifestRecord], settings: &Settings, opts: BatchOptions, mut out: impl Write) -> Result<BatchSummary> {
    let pool = settings.thread_pool()?;
    let (tx, rx) = mpsc::channel();
    let mut summary = BatchSummary {
        total: records.len(),
        labeled: 0,
        non_stationary: 0,
        non_stationary_fraction: None,
        failed: Vec::new(),
    };
    let mut write_err: Option<std::io::Error> = None;

    std::thread::scope(|scope| {
        scope.spawn(move || {
            pool.install(|| {
                records
                    .par_iter()
                    .enumerate()
                    .for_each_with(tx, |tx, (i, r)| {
                        // The receiver only disappears if the writer failed.
                        let _ = tx.send((i, isolated(r, settings, opts)));
                    })
            })
        });

        let mut pending = BTreeMap::new();
        let mut next = 0;
        let mut emit = |result: std::result::Result<LabelRecord, FailedClip>, summary: &mut BatchSummary| match result {
            Ok(record) => {
                summary.labeled += 1;
                summary.non_stationary += record.label as usize;
                if write_err.is_none() {
                    if let Err(e) = serde_json::to_writer(&mut out, &record)
                        .map_err(std::io::Error::from)
                        .and_then(|_| out.write_all(b"\n"))
                    {
                        write_err = Some(e);
                    }
                }
            }
            Err(failed) => summary.failed.push(failed),
        };
        for (i, result) in rx {
            if opts.sorted {
                pending.insert(i, result);
                while let Some(result) = pending.remove(&next) {
                    emit(result, &mut summary);
                    next += 1;
                }
            } else {
                emit(result, &mut summary);
            }
        }
    });

    if let Some(e) = write_err {
        return Err(CliError::io("batch output", e));
    }
    out.flush().map_err(|e| CliError::io("batch output", e))?;
    let order: std::collections::HashMap<&str, usize> =
        records.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    summary.failed.sort_by_key(|f| order[f.id.as_str()]);
    if summary.labeled > 0 {
        summary.non_stationary_fraction = Some(summary.non_stationary as f64 / summary.labeled as f64);
    }
    Ok(summary)
}
