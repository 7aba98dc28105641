//! Labeling accuracy on synthetic signals of known stationarity.

use nonstat_core::audio::{synth_signal, SignalKind, SynthSpec, CLIP_SECONDS};
use nonstat_core::seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::pipeline::label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindAccuracy {
    pub kind: SignalKind,
    pub expected_label: u8,
    pub correct: usize,
    pub total: usize,
    pub accuracy_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_per_class: usize,
    pub seed: u64,
    pub j_surrogates: usize,
    pub alpha: f64,
    pub rows: Vec<KindAccuracy>,
    pub macro_average_pct: f64,
}

impl ValidationReport {
    pub fn row(&self, kind: SignalKind) -> Option<&KindAccuracy> {
        self.rows.iter().find(|r| r.kind == kind)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<16} {:>8} {:>8} {:>9}", "kind", "expected", "correct", "accuracy")?;
        for r in &self.rows {
            let expected = if r.expected_label == 1 { "NS" } else { "S" };
            writeln!(f, "{:<16} {:>8} {:>8} {:>8.1}%", r.kind.name(), expected, format!("{}/{}", r.correct, r.total), r.accuracy_pct)?;
        }
        write!(f, "{:<16} {:>8} {:>8} {:>8.1}%", "macro average", "", "", self.macro_average_pct)
    }
}

/// Clip `index` of `kind` in a validation run: random generator parameters
/// and a stable id.
pub fn validation_clip_spec(kind: SignalKind, index: usize, base_seed: u64) -> (String, SynthSpec) {
    let id = format!("{}_{index:04}", kind.name());
    (id.clone(), SynthSpec::random(kind, seed::derive_named(base_seed, &format!("validate/{id}"))))
}

/// Labels `n` random clips of every stationary and non-stationary kind.
pub fn validate_synthetic(n: usize, settings: &Settings) -> Result<ValidationReport> {
    if n == 0 {
        return Err(CliError::Usage("need at least one clip per class".into()));
    }
    let kinds: Vec<SignalKind> = SignalKind::STATIONARY.iter().chain(SignalKind::NON_STATIONARY.iter()).copied().collect();
    let jobs: Vec<(SignalKind, usize)> = kinds.iter().flat_map(|&k| (0..n).map(move |i| (k, i))).collect();
    let pool = settings.thread_pool()?;
    let labels: Vec<bool> = pool.install(|| {
        jobs.par_iter()
            .map(|&(kind, i)| -> Result<bool> {
                let (id, spec) = validation_clip_spec(kind, i, settings.seed);
                let mut clip = synth_signal(&spec, CLIP_SECONDS)?;
                clip.source_id = id;
                Ok(label(&clip, settings)?.result.label)
            })
            .collect::<Result<Vec<bool>>>()
    })?;

    let rows: Vec<KindAccuracy> = kinds
        .iter()
        .zip(labels.chunks(n))
        .map(|(&kind, got)| {
            let expected = kind.expected_label().expect("validation kinds have a label");
            let correct = got.iter().filter(|&&l| l == expected).count();
            KindAccuracy {
                kind,
                expected_label: expected as u8,
                correct,
                total: n,
                accuracy_pct: 100.0 * correct as f64 / n as f64,
            }
        })
        .collect();
    let macro_average_pct = rows.iter().map(|r| r.accuracy_pct).sum::<f64>() / rows.len() as f64;
    Ok(ValidationReport {
        n_per_class: n,
        seed: settings.seed,
        j_surrogates: settings.surrogates,
        alpha: settings.alpha,
        rows,
        macro_average_pct,
    })
}
