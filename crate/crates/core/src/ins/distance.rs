use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor added to spectral power before logarithms and ratios.
pub const DEFAULT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Kullback-Leibler divergence of the unit-sum normalized spectra.
    Kl,
    /// Log-spectral deviation: mean absolute log-power difference.
    Lsd,
    /// `KL * (1 + LSD)`.
    #[default]
    Combined,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Kl => "kl",
            DistanceMode::Lsd => "lsd",
            DistanceMode::Combined => "combined",
        })
    }
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kl" => Ok(DistanceMode::Kl),
            "lsd" => Ok(DistanceMode::Lsd),
            "combined" => Ok(DistanceMode::Combined),
            other => Err(Error::InvalidParameter(format!("unknown distance mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpec {
    pub mode: DistanceMode,
    pub floor: f64,
}

impl Default for DistanceSpec {
    fn default() -> Self {
        Self {
            mode: DistanceMode::Combined,
            floor: DEFAULT_FLOOR,
        }
    }
}

impl DistanceSpec {
    pub fn new(mode: DistanceMode, floor: f64) -> Result<Self> {
        let spec = Self { mode, floor };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.floor > 0.0 && self.floor.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("distance floor must be positive, got {}", self.floor)))
        }
    }
}

/// Distance between a local spectrum and a reference spectrum.
pub fn spectral_distance(local: &[f64], global_ref: &[f64], spec: &DistanceSpec) -> Result<f64> {
    spec.validate()?;
    if local.len() != global_ref.len() {
        return Err(Error::LengthMismatch(local.len(), global_ref.len()));
    }
    if local.iter().chain(global_ref).any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidSpectrum);
    }
    if local.is_empty() {
        return Ok(0.0);
    }
    Ok(match spec.mode {
        DistanceMode::Kl => kl(local, global_ref, spec.floor),
        DistanceMode::Lsd => lsd(local, global_ref, spec.floor),
        DistanceMode::Combined => kl(local, global_ref, spec.floor) * (1.0 + lsd(local, global_ref, spec.floor)),
    })
}

/// `sum p ln(p/q)` with `p`, `q` the floor-guarded spectra scaled to unit sum.
pub(crate) fn kl(local: &[f64], reference: &[f64], floor: f64) -> f64 {
    let p_sum: f64 = local.iter().map(|v| v + floor).sum();
    let q_sum: f64 = reference.iter().map(|v| v + floor).sum();
    let d: f64 = local
        .iter()
        .zip(reference)
        .map(|(a, b)| {
            let p = (a + floor) / p_sum;
            let q = (b + floor) / q_sum;
            p * (p / q).ln()
        })
        .sum();
    // Rounding can push an exact zero slightly negative.
    d.max(0.0)
}

/// `mean |ln(local + floor) - ln(reference + floor)|`.
pub(crate) fn lsd(local: &[f64], reference: &[f64], floor: f64) -> f64 {
    local
        .iter()
        .zip(reference)
        .map(|(a, b)| ((a + floor) / (b + floor)).ln().abs())
        .sum::<f64>()
        / local.len() as f64
}
