use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shortest window accepted by [`TaperBank::new`].
pub const MIN_WINDOW: usize = 16;
/// Largest supported taper count.
pub const MAX_TAPERS: usize = 10;

/// Half-width of the Hermite sampling grid in natural units: the turning
/// point `sqrt(2m - 1)` of the highest-order function, and never below 3 so
/// that the Gaussian envelope of low-order tapers is resolved.
fn hermite_half_width(count: usize) -> f64 {
    (2.0 * count as f64 - 1.0).sqrt().max(3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TaperFamily {
    #[default]
    Hermite,
    Sine,
}

impl fmt::Display for TaperFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaperFamily::Hermite => "hermite",
            TaperFamily::Sine => "sine",
        })
    }
}

impl FromStr for TaperFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermite" => Ok(TaperFamily::Hermite),
            "sine" => Ok(TaperFamily::Sine),
            other => Err(Error::InvalidParameter(format!("unknown taper family '{other}'"))),
        }
    }
}

/// An orthonormal set of data windows of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct TaperBank {
    tapers: Vec<Vec<f64>>,
    family: TaperFamily,
    window_len: usize,
}

impl TaperBank {
    /// Builds `count` tapers of `window_len` samples.
    ///
    /// Hermite tapers are Hermite functions sampled on a symmetric grid and
    /// re-orthonormalized with two passes of modified Gram-Schmidt. Sine
    /// tapers are `sqrt(2/(N+1)) sin(pi k (n+1)/(N+1))`, orthonormal in closed
    /// form.
    pub fn new(family: TaperFamily, window_len: usize, count: usize) -> Result<Self> {
        if !(1..=MAX_TAPERS).contains(&count) {
            return Err(Error::InvalidParameter(format!(
                "taper count must be in 1..={MAX_TAPERS}, got {count}"
            )));
        }
        if window_len < MIN_WINDOW {
            return Err(Error::WindowTooShort {
                window_len,
                min: MIN_WINDOW,
            });
        }
        let tapers = match family {
            TaperFamily::Sine => sine_tapers(window_len, count),
            TaperFamily::Hermite => {
                let mut t = hermite_functions(window_len, count);
                orthonormalize(&mut t);
                orthonormalize(&mut t);
                t
            }
        };
        Ok(Self {
            tapers,
            family,
            window_len,
        })
    }

    pub fn tapers(&self) -> &[Vec<f64>] {
        &self.tapers
    }

    pub fn family(&self) -> TaperFamily {
        self.family
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn len(&self) -> usize {
        self.tapers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tapers.is_empty()
    }

    /// Largest absolute deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.tapers.iter().enumerate() {
            for (j, b) in self.tapers.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn sine_tapers(n: usize, count: usize) -> Vec<Vec<f64>> {
    let scale = (2.0 / (n as f64 + 1.0)).sqrt();
    (1..=count)
        .map(|k| {
            (0..n)
                .map(|i| {
                    scale * (std::f64::consts::PI * k as f64 * (i + 1) as f64 / (n as f64 + 1.0)).sin()
                })
                .collect()
        })
        .collect()
}

/// Orthonormal Hermite functions psi_k(t) on `n` points spanning
/// `[-L, L]` with `L = hermite_half_width(count)`, via the three-term recurrence
/// `psi_k = sqrt(2/k) t psi_{k-1} - sqrt((k-1)/k) psi_{k-2}`.
fn hermite_functions(n: usize, count: usize) -> Vec<Vec<f64>> {
    let half_width = hermite_half_width(count);
    let step = 2.0 * half_width / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| -half_width + i as f64 * step).collect();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    let psi0: Vec<f64> = grid
        .iter()
        .map(|t| std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp())
        .collect();
    out.push(psi0);
    for k in 1..count {
        let kf = k as f64;
        let next: Vec<f64> = grid
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let prev = out[k - 1][i];
                let prev2 = if k >= 2 { out[k - 2][i] } else { 0.0 };
                (2.0 / kf).sqrt() * t * prev - ((kf - 1.0) / kf).sqrt() * prev2
            })
            .collect();
        out.push(next);
    }
    out
}

/// Modified Gram-Schmidt in place; rows become orthonormal.
fn orthonormalize(rows: &mut [Vec<f64>]) {
    for i in 0..rows.len() {
        let (done, rest) = rows.split_at_mut(i);
        let row = &mut rest[0];
        for prev in done.iter() {
            let dot: f64 = row.iter().zip(prev).map(|(a, b)| a * b).sum();
            row.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = row.iter().map(|a| a * a).sum::<f64>().sqrt();
        row.iter_mut().for_each(|a| *a /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sine_taper_is_half_sine() {
        let bank = TaperBank::new(TaperFamily::Sine, 256, 1).unwrap();
        let t = &bank.tapers()[0];
        let energy: f64 = t.iter().map(|x| x * x).sum();
        assert!((energy - 1.0).abs() < 1e-12);
        let expected = (2.0f64 / 257.0).sqrt() * (std::f64::consts::PI * 10.0 / 257.0).sin();
        assert!((t[9] - expected).abs() < 1e-15);
        assert!(t.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn hermite_bank_is_orthonormal() {
        let bank = TaperBank::new(TaperFamily::Hermite, 256, 5).unwrap();
        assert_eq!(bank.len(), 5);
        assert!(bank.orthonormality_error() < 1e-8);
    }

    #[test]
    fn orthonormal_over_all_sizes() {
        for family in [TaperFamily::Hermite, TaperFamily::Sine] {
            for n in [16, 17, 144, 600, 12_000] {
                for m in [1, 5, 10] {
                    let bank = TaperBank::new(family, n, m).unwrap();
                    assert!(bank.orthonormality_error() < 1e-8, "{family} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn hermite_parity_alternates() {
        let bank = TaperBank::new(TaperFamily::Hermite, 101, 4).unwrap();
        for (k, t) in bank.tapers().iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..50 {
                assert!((t[i] - sign * t[100 - i]).abs() < 1e-9);
            }
        }
    }

    /// Fraction of taper-averaged power within +-2 DFT bins of DC.
    fn concentration(bank: &TaperBank) -> f64 {
        let n = bank.window_len();
        let (mut total, mut near) = (0.0, 0.0);
        for w in bank.tapers() {
            for f in 0..n {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, x) in w.iter().enumerate() {
                    let a = -2.0 * std::f64::consts::PI * (f * i) as f64 / n as f64;
                    re += x * a.cos();
                    im += x * a.sin();
                }
                total += re * re + im * im;
                if f.min(n - f) <= 2 {
                    near += re * re + im * im;
                }
            }
        }
        near / total
    }

    #[test]
    fn hermite_leakage_comparable_to_sine() {
        for m in 1..=10 {
            let h = concentration(&TaperBank::new(TaperFamily::Hermite, 144, m).unwrap());
            let s = concentration(&TaperBank::new(TaperFamily::Sine, 144, m).unwrap());
            assert!(h > s - 0.03, "m={m}: hermite {h:.4} sine {s:.4}");
            if m <= 5 {
                assert!(h > 0.9, "m={m}: {h:.4}");
            }
        }
    }

    #[test]
    fn short_window_rejected() {
        assert!(matches!(
            TaperBank::new(TaperFamily::Hermite, 8, 5),
            Err(Error::WindowTooShort { .. })
        ));
        assert!(TaperBank::new(TaperFamily::Hermite, 64, 0).is_err());
        assert!(TaperBank::new(TaperFamily::Hermite, 64, 11).is_err());
    }
}
