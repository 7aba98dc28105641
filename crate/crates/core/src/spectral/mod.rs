//! Multitaper short-time spectral estimation.

mod spectrogram;
mod taper;

pub use spectrogram::{multitaper_spectrogram, Spectrogram, SpectrogramPlan};
pub use taper::{TaperBank, TaperFamily, MAX_TAPERS, MIN_WINDOW};
