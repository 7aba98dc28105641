use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::{spectral_distance, DistanceSpec};
use super::gamma::{gamma_threshold, MIN_NULL_SAMPLES};
use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::spectral::{Spectrogram, SpectrogramPlan, TaperFamily, MAX_TAPERS, MIN_WINDOW};
use crate::surrogate::{generate_surrogates, SurrogateSet};

/// Contrast frames required for a variance estimate that can be compared
/// across signals.
pub const MIN_FRAMES: usize = 3;

/// Contrasts `c_z` of one spectrogram against its own time average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastSeries {
    pub values: Vec<f64>,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VarianceEstimator {
    /// Unbiased sample variance, divisor `n - 1`.
    #[default]
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsConfig {
    pub j_surrogates: usize,
    pub epsilon: f64,
    pub distance: DistanceSpec,
    pub tapers: usize,
    pub taper_family: TaperFamily,
    pub variance: VarianceEstimator,
    pub seed: u64,
}

impl Default for InsConfig {
    fn default() -> Self {
        Self {
            j_surrogates: 50,
            epsilon: 0.05,
            distance: DistanceSpec::default(),
            tapers: 5,
            taper_family: TaperFamily::Hermite,
            variance: VarianceEstimator::Sample,
            seed: 0,
        }
    }
}

impl InsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!("epsilon must be in (0, 0.5), got {}", self.epsilon)));
        }
        if self.j_surrogates < MIN_NULL_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_NULL_SAMPLES} surrogates, got {}",
                self.j_surrogates
            )));
        }
        if !(1..=MAX_TAPERS).contains(&self.tapers) {
            return Err(Error::InvalidParameter(format!("taper count must be in 1..={MAX_TAPERS}")));
        }
        self.distance.validate()
    }

    /// Canonical description of every setting that affects INS values,
    /// except the seed.
    pub fn fingerprint(&self) -> String {
        format!(
            "ins-v1;j={};eps={};dist={};floor={:e};tapers={};family={};var=sample",
            self.j_surrogates, self.epsilon, self.distance.mode, self.distance.floor, self.tapers, self.taper_family
        )
    }
}

/// INS statistic and threshold at one observation scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsPoint {
    pub scale: f64,
    pub window_len: usize,
    pub ins: f64,
    pub gamma: f64,
    pub theta1: f64,
    pub theta0_mean: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gamma_degenerate: bool,
}

impl InsPoint {
    pub fn is_non_stationary(&self) -> bool {
        self.ins > self.gamma
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsCurve {
    pub clip_id: String,
    pub config_fingerprint: String,
    pub seed: u64,
    pub points: Vec<InsPoint>,
}

impl InsCurve {
    pub fn scales(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.scale).collect()
    }
}

/// Wall-clock breakdown of one [`ins_curve_timed`] call, in milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTiming {
    pub surrogate_ms: f64,
    pub per_scale_ms: Vec<f64>,
    pub total_ms: f64,
}

/// Distances from every frame to the frame average.
///
/// The distance floor is applied relative to the mean power of the
/// reference spectrum, so contrasts do not depend on the overall level; an
/// all-zero spectrogram falls back to the absolute floor.
pub fn contrast_series(spectrogram: &Spectrogram, spec: &DistanceSpec) -> Result<ContrastSeries> {
    let z = spectrogram.n_frames();
    if z < MIN_FRAMES {
        return Err(Error::TooFewFrames { got: z, min: MIN_FRAMES });
    }
    let mut reference = vec![0.0; spectrogram.n_bins()];
    for frame in spectrogram.frames() {
        reference.iter_mut().zip(frame).for_each(|(r, v)| *r += v);
    }
    reference.iter_mut().for_each(|r| *r /= z as f64);
    let level = reference.iter().sum::<f64>() / reference.len() as f64;
    let spec = DistanceSpec {
        floor: if level > 0.0 { spec.floor * level } else { spec.floor },
        ..*spec
    };
    let values = spectrogram
        .frames()
        .map(|frame| spectral_distance(frame, &reference, &spec))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ContrastSeries {
        values,
        scale: spectrogram.scale(),
    })
}

/// Unbiased sample variance of the contrasts.
pub fn theta_variance(series: &ContrastSeries) -> Result<f64> {
    sample_variance(&series.values)
}

fn sample_variance(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewFrames { got: n, min: 2 });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    // Corrected two-pass: the second term cancels rounding error in `mean`.
    let (sq, lin) = values
        .iter()
        .fold((0.0, 0.0), |(sq, lin), v| (sq + (v - mean) * (v - mean), lin + (v - mean)));
    Ok(((sq - lin * lin / n as f64) / (n - 1) as f64).max(0.0))
}

/// Analysis window in samples for `scale` of a `len`-sample clip.
pub fn window_for_scale(scale: f64, len: usize) -> Result<usize> {
    if !(scale > 0.0 && scale <= 0.5) {
        return Err(Error::ScaleOutOfRange(scale));
    }
    let window = ((scale * len as f64).round() as usize).min(len / 2);
    if window < MIN_WINDOW {
        return Err(Error::WindowTooShort {
            window_len: window,
            min: MIN_WINDOW,
        });
    }
    Ok(window)
}

fn variance_at(plan: &SpectrogramPlan, clip: &AudioClip, cfg: &InsConfig) -> Result<f64> {
    let sg = plan.compute(clip)?;
    theta_variance(&contrast_series(&sg, &cfg.distance)?)
}

/// INS and threshold of `clip` at one scale against a given surrogate family.
pub fn ins_at_scale(clip: &AudioClip, surrogates: &SurrogateSet, scale: f64, cfg: &InsConfig) -> Result<InsPoint> {
    cfg.validate()?;
    if surrogates.len() < MIN_NULL_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_NULL_SAMPLES} surrogates, got {}",
            surrogates.len()
        )));
    }
    if surrogates.surrogates.iter().any(|s| s.len() != clip.len()) {
        return Err(Error::InvalidParameter("surrogate length differs from clip".into()));
    }
    let window = window_for_scale(scale, clip.len())?;
    let plan = SpectrogramPlan::new(cfg.taper_family, window, cfg.tapers, (window / 2).max(1))?;

    let theta1 = variance_at(&plan, clip, cfg)?;
    let theta0 = surrogates
        .surrogates
        .par_iter()
        .map(|s| variance_at(&plan, s, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let threshold = gamma_threshold(&theta0, cfg.epsilon)?;
    let theta0_mean = theta0.iter().sum::<f64>() / theta0.len() as f64;

    Ok(InsPoint {
        scale,
        window_len: window,
        ins: (theta1 / theta0_mean).sqrt(),
        gamma: threshold.gamma,
        theta1,
        theta0_mean,
        gamma_degenerate: threshold.degenerate,
    })
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::InvalidParameter("no scales requested".into()));
    }
    if let Some(&bad) = scales.iter().find(|&&s| !(s > 0.0 && s <= 0.5)) {
        return Err(Error::ScaleOutOfRange(bad));
    }
    if scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("scales must be strictly ascending".into()));
    }
    Ok(())
}

/// INS curve over `scales` with a single surrogate family drawn from `cfg.seed`.
pub fn ins_curve(clip: &AudioClip, scales: &[f64], cfg: &InsConfig) -> Result<InsCurve> {
    ins_curve_timed(clip, scales, cfg).map(|(curve, _)| curve)
}

/// [`ins_curve`] plus a timing breakdown.
pub fn ins_curve_timed(clip: &AudioClip, scales: &[f64], cfg: &InsConfig) -> Result<(InsCurve, CurveTiming)> {
    cfg.validate()?;
    check_scales(scales)?;
    for &s in scales {
        window_for_scale(s, clip.len())?;
    }
    let start = Instant::now();
    let surrogates = generate_surrogates(clip, cfg.j_surrogates, cfg.seed)?;
    let surrogate_ms = elapsed_ms(start);

    let mut points = Vec::with_capacity(scales.len());
    let mut per_scale_ms = Vec::with_capacity(scales.len());
    for &scale in scales {
        let t = Instant::now();
        points.push(ins_at_scale(clip, &surrogates, scale, cfg)?);
        per_scale_ms.push(elapsed_ms(t));
    }
    let curve = InsCurve {
        clip_id: clip.source_id.clone(),
        config_fingerprint: cfg.fingerprint(),
        seed: cfg.seed,
        points,
    };
    let timing = CurveTiming {
        surrogate_ms,
        per_scale_ms,
        total_ms: elapsed_ms(start),
    };
    Ok((curve, timing))
}

fn elapsed_ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}
