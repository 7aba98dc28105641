//! Surrogate-calibrated threshold.
//!
//! The surrogate variances are summarized by a Gamma distribution fitted by
//! the method of moments; the threshold is the square root of its upper
//! `epsilon` quantile relative to the mean, so that `INS > gamma` exactly when
//! the target variance exceeds that quantile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of surrogate variances for the quantile fit.
pub const MIN_NULL_SAMPLES: usize = 8;

/// Relative spread `var / mean^2` below which the fit is considered degenerate.
const DEGENERATE_SPREAD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaThreshold {
    pub gamma: f64,
    /// Fitted shape; `f64::INFINITY` when degenerate.
    pub shape: f64,
    /// Fitted scale; `0` when degenerate.
    pub scale: f64,
    /// Zero-spread input: `gamma` fell back to 1.
    pub degenerate: bool,
}

/// Threshold from the surrogate variances `theta0` at false-alarm rate `epsilon`.
pub fn gamma_threshold(theta0: &[f64], epsilon: f64) -> Result<GammaThreshold> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon must be in (0, 0.5), got {epsilon}")));
    }
    if theta0.len() < MIN_NULL_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_NULL_SAMPLES} surrogate variances, got {}",
            theta0.len()
        )));
    }
    if theta0.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateNull("negative or non-finite variance".into()));
    }
    let n = theta0.len() as f64;
    let mean = theta0.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(Error::DegenerateNull("all surrogate variances are zero".into()));
    }
    let var = theta0.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var / (mean * mean) < DEGENERATE_SPREAD {
        return Ok(GammaThreshold {
            gamma: 1.0,
            shape: f64::INFINITY,
            scale: 0.0,
            degenerate: true,
        });
    }
    let shape = mean * mean / var;
    let scale = var / mean;
    let quantile = scale * inverse_regularized_gamma(shape, 1.0 - epsilon);
    Ok(GammaThreshold {
        gamma: (quantile / mean).sqrt(),
        shape,
        scale,
        degenerate: false,
    })
}

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + G + 0.5;
    let series = COEF[1..]
        .iter()
        .enumerate()
        .fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Series: P = e^{-x} x^a / Gamma(a+1) * sum x^n / ((a+1)...(a+n)).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum.ln() + log_prefactor).exp().min(1.0)
    } else {
        // Continued fraction for Q(a, x), modified Lentz.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (1.0 - (log_prefactor.exp() * h)).max(0.0)
    }
}

/// Solves `P(a, x) = p` for `x` (Halley iteration from a Wilson-Hilferty or
/// small-shape starting point).
pub fn inverse_regularized_gamma(a: f64, p: f64) -> f64 {
    assert!(a > 0.0, "shape must be positive");
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p <= 0.0 {
        return 0.0;
    }
    let gln = ln_gamma(a);
    let a1 = a - 1.0;
    let (lna1, afac) = if a > 1.0 {
        let lna1 = a1.ln();
        (lna1, (a1 * (lna1 - 1.0) - gln).exp())
    } else {
        (0.0, 0.0)
    };

    let mut x = if a > 1.0 {
        let pp = if p < 0.5 { p } else { 1.0 - p };
        let t = (-2.0 * pp.ln()).sqrt();
        let mut z = (2.307_53 + t * 0.270_61) / (1.0 + t * (0.992_29 + t * 0.044_81)) - t;
        if p < 0.5 {
            z = -z;
        }
        (a * (1.0 - 1.0 / (9.0 * a) - z / (3.0 * a.sqrt())).powi(3)).max(1e-3)
    } else {
        let t = 1.0 - a * (0.253 + a * 0.12);
        if p < t {
            (p / t).powf(1.0 / a)
        } else {
            1.0 - (1.0 - (p - t) / (1.0 - t)).ln()
        }
    };

    for _ in 0..100 {
        if x <= 0.0 {
            return 0.0;
        }
        let err = regularized_gamma(a, x) - p;
        let density = if a > 1.0 {
            afac * (-(x - a1) + a1 * (x.ln() - lna1)).exp()
        } else {
            (-x + a1 * x.ln() - gln).exp()
        };
        if density == 0.0 {
            break;
        }
        let u = err / density;
        let step = u / (1.0 - 0.5 * (u * (a1 / x - 1.0)).min(1.0));
        x -= step;
        if x <= 0.0 {
            x = 0.5 * (x + step);
        }
        if step.abs() < 1e-14 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Gamma};
    use statrs::distribution::{ContinuousCDF, Gamma as StatrsGamma};

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(100.5) - statrs::function::gamma::ln_gamma(100.5)).abs() < 1e-10);
    }

    #[test]
    fn quantiles_match_independent_library() {
        for &a in &[0.3, 1.0, 2.5, 3.0, 17.0, 250.0, 4_000.0] {
            let reference = StatrsGamma::new(a, 1.0).unwrap();
            for &p in &[0.01, 0.5, 0.9, 0.95, 0.999] {
                let ours = inverse_regularized_gamma(a, p);
                // The reference CDF is exact to ~1e-14; its inverse is a
                // bisection with looser tolerance.
                assert!((reference.cdf(ours) - p).abs() < 1e-11, "a={a} p={p}: cdf {}", reference.cdf(ours));
                let theirs = reference.inverse_cdf(p);
                assert!(((ours - theirs) / theirs).abs() < 1e-4, "a={a} p={p}: {ours} vs {theirs}");
                let back = regularized_gamma(a, ours);
                assert!((back - p).abs() < 1e-10, "a={a} p={p}: P={back}");
            }
        }
    }

    #[test]
    fn exponential_closed_form() {
        // a = 1: P(1, x) = 1 - e^{-x}, quantile -ln(1 - p).
        let q = inverse_regularized_gamma(1.0, 0.95);
        assert!((q - (-(0.05f64).ln())).abs() < 1e-12);
    }

    #[test]
    fn constant_input_falls_back_to_one() {
        let t = gamma_threshold(&[2.5; 20], 0.05).unwrap();
        assert_eq!(t.gamma, 1.0);
        assert!(t.degenerate);
    }

    #[test]
    fn all_zero_is_an_error() {
        assert!(matches!(gamma_threshold(&[0.0; 10], 0.05), Err(Error::DegenerateNull(_))));
    }

    #[test]
    fn preconditions() {
        assert!(gamma_threshold(&[1.0, 2.0, 3.0], 0.05).is_err());
        let ok = [1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 3.0, 4.0];
        assert!(gamma_threshold(&ok, 0.0).is_err());
        assert!(gamma_threshold(&ok, 0.5).is_err());
        assert!(gamma_threshold(&ok, 0.05).is_ok());
    }

    #[test]
    fn scale_invariant() {
        let theta: Vec<f64> = (0..50).map(|i| 1.0 + ((i * 37) % 11) as f64 * 0.1).collect();
        let scaled: Vec<f64> = theta.iter().map(|v| 7.0 * v).collect();
        let a = gamma_threshold(&theta, 0.05).unwrap();
        let b = gamma_threshold(&scaled, 0.05).unwrap();
        assert!((a.gamma - b.gamma).abs() < 1e-12);
        assert!(a.gamma > 1.0);
    }

    #[test]
    fn recovers_gamma_quantile_by_monte_carlo() {
        // Oracle: analytic quantile of Gamma(3, 2) from an independent
        // implementation; 1e5 draws fitted by moments.
        let dist = Gamma::new(3.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let draws: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
        let q = StatrsGamma::new(3.0, 0.5).unwrap().inverse_cdf(0.95);
        let expected = (q / 6.0).sqrt();
        let got = gamma_threshold(&draws, 0.05).unwrap().gamma;
        assert!(((got - expected) / expected).abs() < 0.02, "{got} vs {expected}");
    }
}
