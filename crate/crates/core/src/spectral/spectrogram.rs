use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::taper::{TaperBank, TaperFamily};
use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Short-time multitaper power spectrum, `n_frames` rows of `n_bins` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    values: Vec<f64>,
    n_frames: usize,
    n_bins: usize,
    pub frame_times: Vec<f64>,
    pub freq_bins: Vec<f64>,
    pub window_len: usize,
    /// Length in samples of the analysed signal.
    pub signal_len: usize,
}

impl Spectrogram {
    /// Builds a spectrogram from row-major values.
    pub fn from_frames(frames: Vec<Vec<f64>>, window_len: usize, signal_len: usize, sample_rate: u32) -> Result<Self> {
        let n_bins = frames.first().map_or(0, Vec::len);
        if frames.iter().any(|f| f.len() != n_bins) {
            return Err(Error::InvalidParameter("ragged spectrogram frames".into()));
        }
        if frames.iter().flatten().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidSpectrum);
        }
        let n_frames = frames.len();
        let rate = f64::from(sample_rate);
        Ok(Self {
            values: frames.into_iter().flatten().collect(),
            n_frames,
            n_bins,
            frame_times: (0..n_frames).map(|z| z as f64).collect(),
            freq_bins: (0..n_bins).map(|f| f as f64 * rate / window_len.max(1) as f64).collect(),
            window_len,
            signal_len,
        })
    }

    /// Observation scale: window length over signal length.
    pub fn scale(&self) -> f64 {
        if self.signal_len == 0 {
            0.0
        } else {
            self.window_len as f64 / self.signal_len as f64
        }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn frame(&self, z: usize) -> &[f64] {
        &self.values[z * self.n_bins..(z + 1) * self.n_bins]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_bins.max(1)).take(self.n_frames)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Reusable analysis setup for one window length: tapers plus FFT plan.
///
/// The plan is immutable and can be shared across threads; every call to
/// [`SpectrogramPlan::compute`] allocates its own buffers.
pub struct SpectrogramPlan {
    bank: TaperBank,
    hop: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SpectrogramPlan {
    pub fn new(family: TaperFamily, window_len: usize, tapers: usize, hop: usize) -> Result<Self> {
        if hop == 0 {
            return Err(Error::InvalidParameter("hop must be at least one sample".into()));
        }
        let bank = TaperBank::new(family, window_len, tapers)?;
        let fft = FftPlanner::new().plan_fft_forward(window_len);
        Ok(Self { bank, hop, fft })
    }

    pub fn window_len(&self) -> usize {
        self.bank.window_len()
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn bank(&self) -> &TaperBank {
        &self.bank
    }

    /// Frames that fit in a signal of `len` samples: `floor((len - N)/hop) + 1`.
    pub fn frame_count(&self, len: usize) -> usize {
        let n = self.window_len();
        if len < n {
            0
        } else {
            (len - n) / self.hop + 1
        }
    }

    /// Multitaper spectrogram of `clip`.
    ///
    /// Frames start at multiples of the hop and must fit entirely inside the
    /// clip; the window may be at most half the clip length. Each row is the
    /// taper average of `|DFT(taper * frame)|^2` over bins `0..=N/2`.
    pub fn compute(&self, clip: &AudioClip) -> Result<Spectrogram> {
        let n = self.window_len();
        let len = clip.len();
        if 2 * n > len {
            return Err(Error::SignalTooShort { len, min: 2 * n });
        }
        let n_frames = self.frame_count(len);
        let n_bins = n / 2 + 1;
        let tapers = self.bank.tapers();
        let inv_m = 1.0 / tapers.len() as f64;

        let mut values = vec![0.0; n_frames * n_bins];
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];

        for (z, row) in values.chunks_exact_mut(n_bins).enumerate() {
            let frame = &clip.samples[z * self.hop..z * self.hop + n];
            // Two real tapered frames share one complex transform:
            // X_a = (Z[f] + conj Z[N-f]) / 2, X_b = (Z[f] - conj Z[N-f]) / 2i.
            for pair in tapers.chunks(2) {
                let (wa, wb) = (&pair[0], pair.get(1));
                for (i, c) in buf.iter_mut().enumerate() {
                    let im = wb.map_or(0.0, |w| w[i] * frame[i]);
                    *c = Complex::new(wa[i] * frame[i], im);
                }
                self.fft.process_with_scratch(&mut buf, &mut scratch);
                for (f, out) in row.iter_mut().enumerate() {
                    let zf = buf[f];
                    let zc = buf[(n - f) % n].conj();
                    let power = if wb.is_some() {
                        ((zf + zc) * 0.5).norm_sqr() + ((zf - zc) * 0.5).norm_sqr()
                    } else {
                        zf.norm_sqr()
                    };
                    *out += power;
                }
            }
            row.iter_mut().for_each(|v| *v *= inv_m);
        }

        let rate = f64::from(clip.sample_rate);
        Ok(Spectrogram {
            values,
            n_frames,
            n_bins,
            frame_times: (0..n_frames)
                .map(|z| (z * self.hop) as f64 / rate + n as f64 / (2.0 * rate))
                .collect(),
            freq_bins: (0..n_bins).map(|f| f as f64 * rate / n as f64).collect(),
            window_len: n,
            signal_len: len,
        })
    }
}

/// Multitaper spectrogram with Hermite tapers.
pub fn multitaper_spectrogram(clip: &AudioClip, window_len: usize, tapers: usize, hop: usize) -> Result<Spectrogram> {
    SpectrogramPlan::new(TaperFamily::Hermite, window_len, tapers, hop)?.compute(clip)
}
