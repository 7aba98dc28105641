//! Hard Label Criteria: region flags from a hardened per-scale threshold and
//! a global label by strict majority of regions.
//!
//! A scale is non-stationary for labeling when `INS > alpha * gamma(scale)`.
//! A region is flagged when strictly more than half of its scales are
//! non-stationary, and the signal is labeled non-stationary when strictly
//! more than half of the regions are flagged. Ties resolve to stationary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ins::{InsCurve, InsPoint};

/// Default threshold multiplier.
pub const DEFAULT_ALPHA: f64 = 10.0;

/// Default short-, mid- and long-term regions.
pub const DEFAULT_REGIONS: [[f64; 3]; 3] = [[0.006, 0.012, 0.025], [0.05, 0.1, 0.2], [0.3, 0.4, 0.5]];

const SCALE_TOLERANCE: f64 = 1e-9;

/// Disjoint groups of observation scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPartition {
    regions: Vec<Vec<f64>>,
}

impl Default for RegionPartition {
    fn default() -> Self {
        Self {
            regions: DEFAULT_REGIONS.iter().map(|r| r.to_vec()).collect(),
        }
    }
}

impl RegionPartition {
    /// Validates that regions are non-empty, equally sized, disjoint and
    /// drawn from `(0, 0.5]`.
    pub fn new(regions: Vec<Vec<f64>>) -> Result<Self> {
        let size = regions.first().map_or(0, Vec::len);
        if size == 0 || regions.iter().any(Vec::is_empty) {
            return Err(Error::EmptyRegion);
        }
        if regions.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidParameter("regions must all hold the same number of scales".into()));
        }
        let mut all: Vec<f64> = regions.iter().flatten().copied().collect();
        if let Some(&bad) = all.iter().find(|&&s| !(s > 0.0 && s <= 0.5)) {
            return Err(Error::ScaleOutOfRange(bad));
        }
        all.sort_by(f64::total_cmp);
        if all.windows(2).any(|w| (w[1] - w[0]).abs() < SCALE_TOLERANCE) {
            return Err(Error::InvalidParameter("regions must be disjoint".into()));
        }
        Ok(Self { regions })
    }

    pub fn regions(&self) -> &[Vec<f64>] {
        &self.regions
    }

    /// Number of regions, K.
    pub fn k(&self) -> usize {
        self.regions.len()
    }

    /// Scales per region, N.
    pub fn n(&self) -> usize {
        self.regions.first().map_or(0, Vec::len)
    }

    /// Every scale in ascending order; the scale sequence of an INS curve
    /// suitable for this partition.
    pub fn scales(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.regions.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlcConfig {
    pub alpha: f64,
    pub partition: RegionPartition,
}

impl Default for HlcConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            partition: RegionPartition::default(),
        }
    }
}

impl HlcConfig {
    pub fn new(alpha: f64, partition: RegionPartition) -> Result<Self> {
        let cfg = Self { alpha, partition };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > 1.0 && self.alpha.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("alpha must exceed 1, got {}", self.alpha)))
        }
    }

    pub fn fingerprint(&self) -> String {
        let regions: Vec<String> = self
            .partition
            .regions()
            .iter()
            .map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        format!("hlc-v1;alpha={};regions={}", self.alpha, regions.join("|"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlcResult {
    /// True when the signal is non-stationary.
    pub label: bool,
    pub region_flags: Vec<bool>,
    /// Non-stationary scales of each region.
    pub ns_scales: Vec<Vec<f64>>,
    /// Hardened threshold `alpha * gamma` per scale, in partition order.
    pub thresholds_used: Vec<Vec<f64>>,
}

/// Flags one region and returns the scales whose INS strictly exceeds
/// `alpha * gamma`.
pub fn region_flag(points: &[InsPoint], alpha: f64) -> Result<(bool, Vec<f64>)> {
    if points.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let ns: Vec<f64> = points
        .iter()
        .filter(|p| p.ins > alpha * p.gamma)
        .map(|p| p.scale)
        .collect();
    let flag = ns.len() > points.len() - ns.len();
    Ok((flag, ns))
}

/// Strict majority over region flags.
pub fn majority(flags: &[bool]) -> bool {
    let set = flags.iter().filter(|&&f| f).count();
    2 * set > flags.len()
}

/// Global label of an INS curve whose scales are exactly the partition's.
pub fn hlc_label(curve: &InsCurve, cfg: &HlcConfig) -> Result<HlcResult> {
    cfg.validate()?;
    let expected = cfg.partition.scales();
    if curve.points.len() != expected.len() {
        return Err(Error::ScaleMismatch(format!(
            "curve has {} scales, partition has {}",
            curve.points.len(),
            expected.len()
        )));
    }
    let find = |scale: f64| -> Result<&InsPoint> {
        curve
            .points
            .iter()
            .find(|p| (p.scale - scale).abs() < SCALE_TOLERANCE)
            .ok_or_else(|| Error::ScaleMismatch(format!("scale {scale} missing from curve")))
    };

    let mut region_flags = Vec::with_capacity(cfg.partition.k());
    let mut ns_scales = Vec::with_capacity(cfg.partition.k());
    let mut thresholds_used = Vec::with_capacity(cfg.partition.k());
    for region in cfg.partition.regions() {
        let points: Vec<InsPoint> = region.iter().map(|&s| find(s).cloned()).collect::<Result<_>>()?;
        let (flag, ns) = region_flag(&points, cfg.alpha)?;
        region_flags.push(flag);
        ns_scales.push(ns);
        thresholds_used.push(points.iter().map(|p| cfg.alpha * p.gamma).collect());
    }
    Ok(HlcResult {
        label: majority(&region_flags),
        region_flags,
        ns_scales,
        thresholds_used,
    })
}
