//! Per-clip analysis shared by every subcommand.

use std::path::Path;
use std::time::Instant;

use nonstat_core::audio::{load_audio, AudioClip, CLIP_SECONDS};
use nonstat_core::hlc::{hlc_label, HlcResult};
use nonstat_core::ins::{ins_curve_timed, CurveTiming, InsCurve};
use nonstat_core::seed;

use crate::config::Settings;
use crate::error::Result;
use crate::records::LabelRecord;

/// Seed of clip `id` under a base seed; independent of processing order.
pub fn clip_seed(base: u64, id: &str) -> u64 {
    seed::derive_named(base, id)
}

/// Id used for a file analyzed on its own: the file stem.
pub fn default_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads the analysis clip starting `start_sec` seconds into `path`.
pub fn load_clip(path: &Path, start_sec: f64, id: &str) -> Result<AudioClip> {
    let audio = load_audio(path)?;
    let mut clip = audio.extract(start_sec, CLIP_SECONDS)?;
    clip.source_id = id.to_string();
    Ok(clip)
}

pub fn analyze(clip: &AudioClip, settings: &Settings) -> Result<(InsCurve, CurveTiming)> {
    let cfg = settings.ins_config(clip_seed(settings.seed, &clip.source_id));
    Ok(ins_curve_timed(clip, &settings.scales(), &cfg)?)
}

/// Curve, label and timing of one clip.
pub struct Labeled {
    pub curve: InsCurve,
    pub result: HlcResult,
    pub timing: CurveTiming,
    /// Wall time of curve plus label.
    pub elapsed_ms: f64,
    pub hlc_ms: f64,
}

pub fn label(clip: &AudioClip, settings: &Settings) -> Result<Labeled> {
    let start = Instant::now();
    let (curve, timing) = analyze(clip, settings)?;
    let hlc_start = Instant::now();
    let result = hlc_label(&curve, &settings.hlc_config())?;
    let hlc_ms = hlc_start.elapsed().as_secs_f64() * 1e3;
    Ok(Labeled {
        curve,
        result,
        timing,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        hlc_ms,
    })
}

impl Labeled {
    pub fn record(&self, settings: &Settings) -> LabelRecord {
        LabelRecord::new(
            &self.curve.clip_id,
            &self.curve,
            &self.result,
            settings.alpha,
            settings.fingerprint(),
            self.elapsed_ms,
        )
    }
}
