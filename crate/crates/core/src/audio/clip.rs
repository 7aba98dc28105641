use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample rate of every clip after ingestion.
pub const SAMPLE_RATE: u32 = 16_000;

/// Duration of an analysis clip in seconds.
pub const CLIP_SECONDS: f64 = 1.5;

/// Samples in one analysis clip at [`SAMPLE_RATE`].
pub const CLIP_SAMPLES: usize = 24_000;

/// A mono PCM signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub source_id: String,
    pub offset_sec: f64,
}

impl AudioClip {
    /// Builds a clip at 16 kHz, rejecting non-finite samples.
    pub fn new(samples: Vec<f64>, source_id: impl Into<String>) -> Result<Self> {
        Self::with_rate(samples, SAMPLE_RATE, source_id)
    }

    pub fn with_rate(samples: Vec<f64>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParameter("sample rate must be positive".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("audio contains non-finite samples".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id: source_id.into(),
            offset_sec: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_sec(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            ..self.clone()
        }
    }

    /// Cuts `len_sec` seconds starting at `start_sec`.
    ///
    /// Fails when the requested window runs past the end of the signal.
    pub fn extract(&self, start_sec: f64, len_sec: f64) -> Result<Self> {
        if !(start_sec >= 0.0) || !(len_sec > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "invalid window start={start_sec} length={len_sec}"
            )));
        }
        let rate = f64::from(self.sample_rate);
        let start = (start_sec * rate).round() as usize;
        let len = (len_sec * rate).round() as usize;
        if start + len > self.samples.len() {
            return Err(Error::SignalTooShort {
                len: self.samples.len().saturating_sub(start),
                min: len,
            });
        }
        Ok(Self {
            samples: self.samples[start..start + len].to_vec(),
            sample_rate: self.sample_rate,
            source_id: self.source_id.clone(),
            offset_sec: self.offset_sec + start as f64 / rate,
        })
    }
}

/// Splits a clip into consecutive, non-overlapping windows of
/// `round(clip_len_sec * sample_rate)` samples. A trailing remainder shorter
/// than one window is dropped, so a short input yields an empty list.
pub fn segment_clips(clip: &AudioClip, clip_len_sec: f64) -> Result<Vec<AudioClip>> {
    if !(clip_len_sec > 0.0) || !clip_len_sec.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "clip length must be positive, got {clip_len_sec}"
        )));
    }
    let rate = f64::from(clip.sample_rate);
    let window = (clip_len_sec * rate).round() as usize;
    if window == 0 {
        return Err(Error::InvalidParameter(format!(
            "clip length {clip_len_sec} s is shorter than one sample"
        )));
    }
    Ok(clip
        .samples
        .chunks_exact(window)
        .enumerate()
        .map(|(i, chunk)| AudioClip {
            samples: chunk.to_vec(),
            sample_rate: clip.sample_rate,
            source_id: clip.source_id.clone(),
            offset_sec: clip.offset_sec + (i * window) as f64 / rate,
        })
        .collect())
}
