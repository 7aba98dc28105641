//! Synthetic WAV corpora with a manifest.

use std::path::{Path, PathBuf};

use nonstat_core::audio::{synth_signal, write_wav, AudioClip, SignalKind, SynthSpec};
use nonstat_core::seed;

use crate::error::{CliError, Result};
use crate::records::{write_jsonl, ManifestRecord};

/// Largest absolute sample written to disk; decoding clamps to [-1, 1].
pub const PEAK_LIMIT: f64 = 0.99;

/// Rescales `clip` so that its peak does not exceed [`PEAK_LIMIT`].
/// INS is level-invariant, so this does not change any label.
pub fn limit_peak(clip: AudioClip) -> AudioClip {
    let peak = clip.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak > PEAK_LIMIT {
        clip.scaled(PEAK_LIMIT / peak)
    } else {
        clip
    }
}

pub fn write_synth(path: &Path, spec: &SynthSpec, duration_sec: f64) -> Result<AudioClip> {
    let clip = limit_peak(synth_signal(spec, duration_sec)?);
    write_wav(path, &clip)?;
    Ok(clip)
}

/// Writes `count` random clips of each kind to `dir` plus `dir/manifest.jsonl`
/// (paths relative to `dir`). Returns the manifest path.
pub fn write_corpus(dir: &Path, kinds: &[SignalKind], count: usize, base_seed: u64, duration_sec: f64) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut records = Vec::with_capacity(kinds.len() * count);
    for &kind in kinds {
        for i in 0..count {
            let id = format!("{}_{i:04}", kind.name());
            let spec = SynthSpec::random(kind, seed::derive_named(base_seed, &format!("corpus/{id}")));
            let file = format!("{id}.wav");
            write_synth(&dir.join(&file), &spec, duration_sec)?;
            records.push(ManifestRecord {
                id,
                path: PathBuf::from(file),
                start_sec: 0.0,
                kind: Some(kind.name().to_string()),
            });
        }
    }
    let manifest = dir.join("manifest.jsonl");
    let file = std::fs::File::create(&manifest).map_err(|e| CliError::io(&manifest, e))?;
    write_jsonl(std::io::BufWriter::new(file), &records).map_err(|e| CliError::io(&manifest, e))?;
    Ok(manifest)
}
