//! Deterministic synthetic test signals.
//!
//! Three kinds are stationary by construction (`white_noise`, `ar1_noise`,
//! `lowpass_rumble`) and three are not (`impulse_train`, `am_noise`,
//! `tone_step`); `chirp` is provided for demonstrations. Each kind has a
//! table of named parameters with a default, an admissible range, and a
//! narrower range used when drawing random validation samples.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::clip::{AudioClip, SAMPLE_RATE};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    WhiteNoise,
    Ar1Noise,
    LowpassRumble,
    ImpulseTrain,
    AmNoise,
    ToneStep,
    Chirp,
}

/// One named parameter of a signal kind.
#[derive(Debug, Clone, Copy)]
pub struct ParamDef {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    /// Range sampled by [`SynthSpec::random`].
    pub random: (f64, f64),
}

const fn p(name: &'static str, default: f64, min: f64, max: f64, random: (f64, f64)) -> ParamDef {
    ParamDef { name, default, min, max, random }
}

const WHITE: &[ParamDef] = &[p("amplitude", 0.3, 0.0, 1.0, (0.05, 0.5))];
const AR1: &[ParamDef] = &[
    p("ar_coeff", 0.9, -0.99, 0.99, (-0.9, 0.95)),
    p("amplitude", 0.3, 0.0, 1.0, (0.05, 0.5)),
];
const RUMBLE: &[ParamDef] = &[
    p("cutoff_hz", 150.0, 20.0, 4_000.0, (40.0, 400.0)),
    p("amplitude", 0.3, 0.0, 1.0, (0.05, 0.5)),
];
const IMPULSE: &[ParamDef] = &[
    p("period_sec", 0.75, 0.02, 1.0, (0.6, 0.9)),
    p("decay_sec", 0.01, 0.001, 0.2, (0.005, 0.02)),
    p("offset_sec", 0.0, 0.0, 1.0, (0.0, 0.1)),
    p("amplitude", 0.6, 0.0, 1.0, (0.3, 0.9)),
    p("background", 0.001, 0.0, 0.5, (0.0005, 0.005)),
];
const AM: &[ParamDef] = &[
    p("mod_freq_hz", 2.0, 0.1, 50.0, (1.0, 3.0)),
    p("depth", 1.0, 0.0, 1.0, (1.0, 1.0)),
    p("amplitude", 0.3, 0.0, 1.0, (0.05, 0.5)),
];
const TONE_STEP: &[ParamDef] = &[
    p("freq_hz", 440.0, 20.0, 7_900.0, (100.0, 4_000.0)),
    p("amp_before", 0.0, 0.0, 1.0, (0.0, 0.0)),
    p("amp_after", 0.5, 0.0, 1.0, (0.2, 0.8)),
    p("step_at", 0.5, 0.05, 0.95, (0.4, 0.6)),
];
const CHIRP: &[ParamDef] = &[
    p("f0_hz", 200.0, 0.0, 8_000.0, (100.0, 1_000.0)),
    p("f1_hz", 4_000.0, 0.0, 8_000.0, (2_000.0, 6_000.0)),
    p("amplitude", 0.5, 0.0, 1.0, (0.2, 0.8)),
];

impl SignalKind {
    pub const ALL: [SignalKind; 7] = [
        SignalKind::WhiteNoise,
        SignalKind::Ar1Noise,
        SignalKind::LowpassRumble,
        SignalKind::ImpulseTrain,
        SignalKind::AmNoise,
        SignalKind::ToneStep,
        SignalKind::Chirp,
    ];

    /// Kinds used as the stationary class in synthetic validation.
    pub const STATIONARY: [SignalKind; 3] =
        [SignalKind::WhiteNoise, SignalKind::Ar1Noise, SignalKind::LowpassRumble];

    /// Kinds used as the non-stationary class in synthetic validation.
    pub const NON_STATIONARY: [SignalKind; 3] =
        [SignalKind::ImpulseTrain, SignalKind::AmNoise, SignalKind::ToneStep];

    pub fn name(self) -> &'static str {
        match self {
            SignalKind::WhiteNoise => "white_noise",
            SignalKind::Ar1Noise => "ar1_noise",
            SignalKind::LowpassRumble => "lowpass_rumble",
            SignalKind::ImpulseTrain => "impulse_train",
            SignalKind::AmNoise => "am_noise",
            SignalKind::ToneStep => "tone_step",
            SignalKind::Chirp => "chirp",
        }
    }

    pub fn params(self) -> &'static [ParamDef] {
        match self {
            SignalKind::WhiteNoise => WHITE,
            SignalKind::Ar1Noise => AR1,
            SignalKind::LowpassRumble => RUMBLE,
            SignalKind::ImpulseTrain => IMPULSE,
            SignalKind::AmNoise => AM,
            SignalKind::ToneStep => TONE_STEP,
            SignalKind::Chirp => CHIRP,
        }
    }

    /// Expected label for validation kinds; `None` for `chirp`.
    pub fn expected_label(self) -> Option<bool> {
        if Self::NON_STATIONARY.contains(&self) {
            Some(true)
        } else if Self::STATIONARY.contains(&self) {
            Some(false)
        } else {
            None
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown signal kind '{s}'")))
    }
}

/// A signal kind, its parameters and the seed of its random stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SignalKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl SynthSpec {
    /// Spec with all parameters at their defaults.
    pub fn new(kind: SignalKind, seed: u64) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    /// Spec with every parameter drawn uniformly from its validation range.
    pub fn random(kind: SignalKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, u64::MAX));
        let params = kind
            .params()
            .iter()
            .map(|d| {
                let (lo, hi) = d.random;
                let v = if hi > lo { rng.random_range(lo..hi) } else { lo };
                (d.name.to_string(), v)
            })
            .collect();
        Self { kind, params, seed }
    }

    /// Resolved parameter values in table order, with range checks.
    fn resolve(&self) -> Result<Vec<f64>> {
        let defs = self.kind.params();
        if let Some(unknown) = self.params.keys().find(|k| !defs.iter().any(|d| d.name == k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "{} has no parameter '{unknown}'",
                self.kind
            )));
        }
        defs.iter()
            .map(|d| {
                let v = self.params.get(d.name).copied().unwrap_or(d.default);
                if !v.is_finite() || v < d.min || v > d.max {
                    Err(Error::InvalidParameter(format!(
                        "{}.{} = {v} outside [{}, {}]",
                        self.kind, d.name, d.min, d.max
                    )))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }
}

/// Generates `duration_sec` seconds of the signal described by `spec` at 16 kHz.
pub fn synth_signal(spec: &SynthSpec, duration_sec: f64) -> Result<AudioClip> {
    if !(duration_sec > 0.0) || !duration_sec.is_finite() {
        return Err(Error::InvalidParameter(format!("duration {duration_sec} s")));
    }
    let v = spec.resolve()?;
    let rate = f64::from(SAMPLE_RATE);
    let n = (duration_sec * rate).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(spec.seed, 0));
    let mut gauss = move || -> f64 { rng.sample(StandardNormal) };

    let samples: Vec<f64> = match spec.kind {
        SignalKind::WhiteNoise => (0..n).map(|_| v[0] * gauss()).collect(),
        SignalKind::Ar1Noise => {
            let (coeff, amp) = (v[0], v[1]);
            let innovation = (1.0 - coeff * coeff).sqrt();
            // Start from the stationary distribution so there is no transient.
            let mut state = gauss();
            (0..n)
                .map(|_| {
                    let out = amp * state;
                    state = coeff * state + innovation * gauss();
                    out
                })
                .collect()
        }
        SignalKind::LowpassRumble => {
            let (cutoff, amp) = (v[0], v[1]);
            let warmup = SAMPLE_RATE as usize;
            let mut stages = [Biquad::lowpass(cutoff, rate), Biquad::lowpass(cutoff, rate)];
            let filtered: Vec<f64> = (0..n + warmup)
                .map(|_| stages.iter_mut().fold(gauss(), |x, s| s.process(x)))
                .skip(warmup)
                .collect();
            let rms = (filtered.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
            let gain = if rms > 0.0 { amp / rms } else { 0.0 };
            filtered.into_iter().map(|x| x * gain).collect()
        }
        SignalKind::ImpulseTrain => {
            let (period, decay, offset, amp, background) = (v[0], v[1], v[2], v[3], v[4]);
            let period_n = period * rate;
            let tail = (8.0 * decay * rate).ceil() as usize;
            let mut out: Vec<f64> = (0..n).map(|_| background * gauss()).collect();
            for onset in burst_onsets(n, period_n, offset * rate) {
                for (i, s) in out.iter_mut().enumerate().skip(onset).take(tail) {
                    let age = (i - onset) as f64 / rate;
                    *s += amp * (-age / decay).exp() * gauss();
                }
            }
            out
        }
        SignalKind::AmNoise => {
            let (mod_freq, depth, amp) = (v[0], v[1], v[2]);
            (0..n)
                .map(|i| {
                    let t = i as f64 / rate;
                    let envelope = (1.0 + depth * (2.0 * PI * mod_freq * t).sin()) / (1.0 + depth);
                    amp * envelope * gauss()
                })
                .collect()
        }
        SignalKind::ToneStep => {
            let (freq, before, after, step_at) = (v[0], v[1], v[2], v[3]);
            let step = (step_at * n as f64).round() as usize;
            (0..n)
                .map(|i| {
                    let level = if i < step { before } else { after };
                    level * (2.0 * PI * freq * i as f64 / rate).sin()
                })
                .collect()
        }
        SignalKind::Chirp => {
            let (f0, f1, amp) = (v[0], v[1], v[2]);
            let sweep = (f1 - f0) / duration_sec;
            (0..n)
                .map(|i| {
                    let t = i as f64 / rate;
                    amp * (2.0 * PI * (f0 * t + 0.5 * sweep * t * t)).sin()
                })
                .collect()
        }
    };

    AudioClip::new(samples, format!("{}-{}", spec.kind, spec.seed))
}

/// Sample indices of impulse-train burst onsets.
pub fn burst_onsets(n: usize, period_samples: f64, offset_samples: f64) -> Vec<usize> {
    (0..)
        .map(|k| (offset_samples + k as f64 * period_samples).round() as usize)
        .take_while(|&i| i < n)
        .collect()
}

/// RBJ cookbook second-order Butterworth low-pass section.
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
    z: [f64; 2],
}

impl Biquad {
    fn lowpass(cutoff: f64, rate: f64) -> Self {
        let w0 = 2.0 * PI * cutoff / rate;
        let alpha = w0.sin() / (2.0 * std::f64::consts::FRAC_1_SQRT_2);
        let cos = w0.cos();
        let a0 = 1.0 + alpha;
        let b1 = (1.0 - cos) / a0;
        Self {
            b: [b1 / 2.0, b1, b1 / 2.0],
            a: [-2.0 * cos / a0, (1.0 - alpha) / a0],
            z: [0.0; 2],
        }
    }

    /// Transposed direct form II.
    fn process(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.z[0];
        self.z[0] = self.b[1] * x - self.a[0] * y + self.z[1];
        self.z[1] = self.b[2] * x - self.a[1] * y;
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_spec_is_bit_identical() {
        for kind in SignalKind::ALL {
            let spec = SynthSpec::random(kind, 99);
            let a = synth_signal(&spec, 0.5).unwrap();
            let b = synth_signal(&spec, 0.5).unwrap();
            assert_eq!(a.samples, b.samples, "{kind}");
            assert_eq!(a.len(), 8_000);
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = synth_signal(&SynthSpec::new(SignalKind::WhiteNoise, 1), 0.1).unwrap();
        let b = synth_signal(&SynthSpec::new(SignalKind::WhiteNoise, 2), 0.1).unwrap();
        assert_ne!(a.samples, b.samples);
    }

    #[test]
    fn impulse_train_has_six_onsets_in_clip() {
        assert_eq!(burst_onsets(24_000, 0.25 * 16_000.0, 0.0).len(), 6);

        // Detect onsets from the generated signal itself: 2 ms blocks whose
        // energy jumps well above the preceding block.
        let clip = synth_signal(
            &SynthSpec::new(SignalKind::ImpulseTrain, 5).with("period_sec", 0.25),
            1.5,
        )
        .unwrap();
        let block = 32;
        let energy: Vec<f64> = clip
            .samples
            .chunks(block)
            .map(|c| c.iter().map(|x| x * x).sum())
            .collect();
        let onsets = energy
            .windows(2)
            .filter(|w| w[1] > 100.0 * (w[0] + 1e-6))
            .count()
            + usize::from(energy[0] > 1e-2);
        assert_eq!(onsets, 6);
    }

    #[test]
    fn am_envelope_period_matches_modulation() {
        // Oracle: autocorrelation of the 5 ms block-RMS envelope peaks at the
        // modulation period.
        let clip = synth_signal(&SynthSpec::new(SignalKind::AmNoise, 3).with("mod_freq_hz", 4.0), 1.5).unwrap();
        let block = 80;
        let env: Vec<f64> = clip
            .samples
            .chunks(block)
            .map(|c| (c.iter().map(|x| x * x).sum::<f64>() / c.len() as f64).sqrt())
            .collect();
        let mean = env.iter().sum::<f64>() / env.len() as f64;
        let centred: Vec<f64> = env.iter().map(|e| e - mean).collect();
        let acf = |lag: usize| -> f64 {
            centred.iter().zip(&centred[lag..]).map(|(a, b)| a * b).sum::<f64>()
                / (centred.len() - lag) as f64
        };
        // Search lags 0.1 s .. 0.4 s.
        let best = (20..80).max_by(|&a, &b| acf(a).total_cmp(&acf(b))).unwrap();
        let lag_sec = best as f64 * block as f64 / 16_000.0;
        assert!((lag_sec - 0.25).abs() <= 0.01, "peak at {lag_sec} s");
    }

    #[test]
    fn tone_step_is_silent_then_tone() {
        let clip = synth_signal(&SynthSpec::new(SignalKind::ToneStep, 0), 1.5).unwrap();
        assert!(clip.samples[..12_000].iter().all(|&s| s == 0.0));
        let peak = clip.samples[12_000..].iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!((peak - 0.5).abs() < 1e-3);
    }

    #[test]
    fn white_noise_has_flat_spectrum_on_average() {
        let clip = synth_signal(&SynthSpec::new(SignalKind::WhiteNoise, 8), 1.5).unwrap();
        let var = clip.samples.iter().map(|x| x * x).sum::<f64>() / clip.len() as f64;
        assert!((var.sqrt() - 0.3).abs() < 0.01);
        let lag1 = clip.samples.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / clip.len() as f64;
        assert!(lag1.abs() < 0.03 * var);
    }

    #[test]
    fn ar1_lag_one_correlation() {
        let clip = synth_signal(&SynthSpec::new(SignalKind::Ar1Noise, 4).with("ar_coeff", 0.7), 1.5).unwrap();
        let var = clip.samples.iter().map(|x| x * x).sum::<f64>();
        let lag1 = clip.samples.windows(2).map(|w| w[0] * w[1]).sum::<f64>();
        assert!((lag1 / var - 0.7).abs() < 0.03);
    }

    #[test]
    fn rumble_is_normalized() {
        let clip = synth_signal(&SynthSpec::new(SignalKind::LowpassRumble, 4), 1.5).unwrap();
        let rms = (clip.samples.iter().map(|x| x * x).sum::<f64>() / clip.len() as f64).sqrt();
        assert!((rms - 0.3).abs() < 1e-9);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = SynthSpec::new(SignalKind::ImpulseTrain, 0).with("period_sec", -1.0);
        assert!(synth_signal(&bad, 1.0).is_err());
        let unknown = SynthSpec::new(SignalKind::WhiteNoise, 0).with("cutoff_hz", 10.0);
        assert!(synth_signal(&unknown, 1.0).is_err());
        assert!(synth_signal(&SynthSpec::new(SignalKind::WhiteNoise, 0), 0.0).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SignalKind::ALL {
            assert_eq!(kind.name().parse::<SignalKind>().unwrap(), kind);
        }
        assert!("pink_noise".parse::<SignalKind>().is_err());
    }

    #[test]
    fn random_specs_stay_in_range() {
        for kind in SignalKind::ALL {
            for s in 0..20 {
                let spec = SynthSpec::random(kind, s);
                assert!(spec.resolve().is_ok(), "{spec:?}");
            }
        }
    }
}
