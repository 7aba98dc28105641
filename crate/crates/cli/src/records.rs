//! JSON record types exchanged with other tools.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use nonstat_core::hlc::{hlc_label, HlcConfig, HlcResult};
use nonstat_core::ins::{InsCurve, InsPoint};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One input clip: `start_sec` seconds into the audio file at `path`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub start_sec: f64,
    /// Generator kind for synthetic corpora.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

/// Reads a JSONL manifest. Blank lines are skipped; ids must be unique.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut record: ManifestRecord =
            serde_json::from_str(&line).map_err(|e| CliError::format(path, format!("line {}: {e}", i + 1)))?;
        if !seen.insert(record.id.clone()) {
            return Err(CliError::format(path, format!("line {}: duplicate id '{}'", i + 1, record.id)));
        }
        if record.path.is_relative() {
            if let Some(dir) = path.parent() {
                record.path = dir.join(&record.path);
            }
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_jsonl<T: Serialize>(mut out: impl Write, records: &[T]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// `(scale, ins, gamma)` of one observation scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsTriple {
    pub scale: f64,
    pub ins: f64,
    pub gamma: f64,
}

impl From<&InsPoint> for InsTriple {
    fn from(p: &InsPoint) -> Self {
        Self {
            scale: p.scale,
            ins: p.ins,
            gamma: p.gamma,
        }
    }
}

/// Global label of one clip, one JSON object per line in batch output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub start_sec: f64,
    /// 1 = non-stationary.
    pub label: u8,
    pub region_flags: Vec<u8>,
    pub ins_points: Vec<InsTriple>,
    pub elapsed_ms: f64,
    pub alpha: f64,
    pub config_fingerprint: String,
    pub seed: u64,
}

impl LabelRecord {
    pub fn new(id: &str, curve: &InsCurve, result: &HlcResult, alpha: f64, fingerprint: String, elapsed_ms: f64) -> Self {
        Self {
            id: id.to_string(),
            path: None,
            start_sec: 0.0,
            label: result.label as u8,
            region_flags: result.region_flags.iter().map(|&f| f as u8).collect(),
            ins_points: curve.points.iter().map(InsTriple::from).collect(),
            elapsed_ms,
            alpha,
            config_fingerprint: fingerprint,
            seed: curve.seed,
        }
    }

    /// Re-derives the label from the embedded points.
    pub fn recompute(&self, cfg: &HlcConfig) -> nonstat_core::Result<HlcResult> {
        let curve = InsCurve {
            clip_id: self.id.clone(),
            config_fingerprint: self.config_fingerprint.clone(),
            seed: self.seed,
            points: self
                .ins_points
                .iter()
                .map(|t| InsPoint {
                    scale: t.scale,
                    window_len: 0,
                    ins: t.ins,
                    gamma: t.gamma,
                    theta1: 0.0,
                    theta0_mean: 0.0,
                    gamma_degenerate: false,
                })
                .collect(),
        };
        hlc_label(&curve, &HlcConfig { alpha: self.alpha, ..cfg.clone() })
    }
}

/// Mean and standard deviation of a timing sample in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean_ms: f64,
    pub std_ms: f64,
}

impl Stat {
    /// Sample statistics; the standard deviation uses divisor `n - 1` and is
    /// zero for a single value.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self { mean_ms: 0.0, std_ms: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean_ms: mean,
            std_ms: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleStat {
    pub scale: f64,
    pub window_len: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    pub worker_threads: usize,
}

impl Machine {
    pub fn current(worker_threads: usize) -> Self {
        Self {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            worker_threads,
        }
    }
}

/// Timing of the full labeling path on synthetic clips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub clips: usize,
    pub clip_seconds: f64,
    pub j_surrogates: usize,
    /// Surrogates + all scales + label, per clip.
    pub ins_total: Stat,
    pub surrogate_gen: Stat,
    pub per_scale: Vec<ScaleStat>,
    /// Sum over scales of the per-clip scale times.
    pub per_scale_sum: Stat,
    pub hlc: Stat,
    /// `ins_total` at `2 J` divided by `ins_total` at `J`, when measured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doubled_j_ratio: Option<f64>,
    pub machine: Machine,
}
