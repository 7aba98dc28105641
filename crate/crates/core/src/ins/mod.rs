//! Index of Non-Stationarity: spectral contrasts, surrogate variances, the
//! INS ratio and its calibrated threshold, per observation scale.

pub mod distance;
mod engine;
pub mod gamma;

pub use distance::{spectral_distance, DistanceMode, DistanceSpec, DEFAULT_FLOOR};
pub use engine::{
    contrast_series, ins_at_scale, ins_curve, ins_curve_timed, theta_variance, window_for_scale, ContrastSeries,
    CurveTiming, InsConfig, InsCurve, InsPoint, VarianceEstimator, MIN_FRAMES,
};
pub use gamma::{gamma_threshold, GammaThreshold};
