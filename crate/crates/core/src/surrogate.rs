//! Phase-randomized surrogates.
//!
//! A surrogate keeps the magnitude of every DFT bin of the source and
//! replaces the phase of each positive-frequency bin by an independent draw
//! from `U[-pi, pi]`. DC and (for even lengths) Nyquist keep their original
//! real value; negative frequencies are the conjugate mirror, so the inverse
//! transform is real up to rounding.
//!
//! Surrogate `j` of seed `s` draws its phases from a ChaCha8 stream keyed by
//! `seed::derive(s, j)`, so any subset can be generated in any order.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::seed;

/// Shortest clip accepted by [`generate_surrogates`].
pub const MIN_SURROGATE_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSet {
    pub surrogates: Vec<AudioClip>,
    pub seed: u64,
    pub source_id: String,
}

impl SurrogateSet {
    pub fn len(&self) -> usize {
        self.surrogates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surrogates.is_empty()
    }
}

/// Reusable forward spectrum of a clip from which surrogates are drawn.
pub struct SurrogateGenerator {
    spectrum: Vec<Complex<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    template: AudioClip,
}

impl SurrogateGenerator {
    pub fn new(clip: &AudioClip) -> Result<Self> {
        let n = clip.len();
        if n < MIN_SURROGATE_LEN {
            return Err(Error::SignalTooShort {
                len: n,
                min: MIN_SURROGATE_LEN,
            });
        }
        let mut planner = FftPlanner::new();
        let mut spectrum: Vec<Complex<f64>> = clip.samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut spectrum);
        Ok(Self {
            spectrum,
            inverse: planner.plan_fft_inverse(n),
            template: AudioClip {
                samples: Vec::new(),
                ..clip.clone()
            },
        })
    }

    /// Surrogate number `index` under `seed`, plus the largest imaginary
    /// residue of the inverse transform before it was discarded.
    pub fn surrogate_with_residue(&self, seed: u64, index: u64) -> (AudioClip, f64) {
        let n = self.spectrum.len();
        let half = (n - 1) / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, index));
        let phase = Uniform::new_inclusive(-PI, PI).expect("finite bounds");

        let mut buf = vec![Complex::new(0.0, 0.0); n];
        buf[0] = Complex::new(self.spectrum[0].re, 0.0);
        for k in 1..=half {
            let rotated = Complex::from_polar(self.spectrum[k].norm(), phase.sample(&mut rng));
            buf[k] = rotated;
            buf[n - k] = rotated.conj();
        }
        if n % 2 == 0 {
            buf[n / 2] = Complex::new(self.spectrum[n / 2].re, 0.0);
        }
        self.inverse.process(&mut buf);

        let scale = 1.0 / n as f64;
        let residue = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs())) * scale;
        let clip = AudioClip {
            samples: buf.iter().map(|c| c.re * scale).collect(),
            ..self.template.clone()
        };
        (clip, residue)
    }

    pub fn surrogate(&self, seed: u64, index: u64) -> AudioClip {
        self.surrogate_with_residue(seed, index).0
    }
}

/// Generates `count` surrogates of `clip`. Output is identical regardless of
/// how the work is scheduled across threads.
pub fn generate_surrogates(clip: &AudioClip, count: usize, seed: u64) -> Result<SurrogateSet> {
    if count == 0 {
        return Err(Error::InvalidParameter("need at least one surrogate".into()));
    }
    let generator = SurrogateGenerator::new(clip)?;
    let surrogates = (0..count as u64)
        .into_par_iter()
        .map(|j| generator.surrogate(seed, j))
        .collect();
    Ok(SurrogateSet {
        surrogates,
        seed,
        source_id: clip.source_id.clone(),
    })
}
