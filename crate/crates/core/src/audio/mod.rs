//! Audio ingestion: WAV decoding, resampling to 16 kHz, segmentation into
//! analysis clips, and synthetic test signals.

mod clip;
pub mod resample;
pub mod synth;
mod wav;

pub use clip::{segment_clips, AudioClip, CLIP_SAMPLES, CLIP_SECONDS, SAMPLE_RATE};
pub use synth::{synth_signal, SignalKind, SynthSpec};
pub use wav::{load_audio, write_wav};
