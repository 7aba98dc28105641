//! Band-limited sample-rate conversion.
//!
//! Each output sample is a windowed-sinc interpolation of the input around the
//! corresponding input position. The kernel spans [`ZERO_CROSSINGS`] lobes on
//! each side, is tapered by a Kaiser window with [`KAISER_BETA`], and has its
//! cutoff at [`ROLLOFF`] times the lower of the two Nyquist frequencies. The
//! kernel is tabulated at 512 points per lobe and linearly
//! interpolated.

use std::f64::consts::PI;

/// Kaiser window shape parameter (about 90 dB stopband).
pub const KAISER_BETA: f64 = 8.6;
/// Kernel half-width in sinc lobes.
pub const ZERO_CROSSINGS: usize = 32;
/// Cutoff as a fraction of the lower Nyquist frequency.
pub const ROLLOFF: f64 = 0.95;
const TABLE_RESOLUTION: usize = 512;

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

struct Kernel {
    table: Vec<f64>,
}

impl Kernel {
    fn new() -> Self {
        let n = ZERO_CROSSINGS * TABLE_RESOLUTION;
        let norm = bessel_i0(KAISER_BETA);
        let table = (0..=n + 1)
            .map(|i| {
                let x = i as f64 / TABLE_RESOLUTION as f64;
                let r = (x / ZERO_CROSSINGS as f64).min(1.0);
                let window = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / norm;
                let sinc = if i == 0 { 1.0 } else { (PI * x).sin() / (PI * x) };
                sinc * window
            })
            .collect();
        Self { table }
    }

    /// Kernel value at `x` lobes from the centre.
    fn at(&self, x: f64) -> f64 {
        let pos = x.abs() * TABLE_RESOLUTION as f64;
        let i = pos as usize;
        if i >= ZERO_CROSSINGS * TABLE_RESOLUTION {
            return 0.0;
        }
        let frac = pos - i as f64;
        self.table[i] + frac * (self.table[i + 1] - self.table[i])
    }
}

/// Resamples `input` from `from_rate` to `to_rate` Hz.
///
/// Equal rates return the input unchanged. The output holds
/// `floor(len * to_rate / from_rate)` samples.
pub fn resample(input: &[f64], from_rate: u32, to_rate: u32) -> Vec<f64> {
    if from_rate == to_rate || input.is_empty() {
        return input.to_vec();
    }
    let kernel = Kernel::new();
    let step = f64::from(from_rate) / f64::from(to_rate);
    // Kernel bandwidth in input-sample units; below 1 when downsampling.
    let bandwidth = ROLLOFF * (f64::from(to_rate) / f64::from(from_rate)).min(1.0);
    let half_width = ZERO_CROSSINGS as f64 / bandwidth;
    let out_len = (input.len() as u64 * u64::from(to_rate) / u64::from(from_rate)) as usize;

    (0..out_len)
        .map(|n| {
            let centre = n as f64 * step;
            let lo = (centre - half_width).ceil().max(0.0) as usize;
            let hi = ((centre + half_width).floor() as usize).min(input.len() - 1);
            (lo..=hi)
                .map(|k| input[k] * kernel.at((k as f64 - centre) * bandwidth))
                .sum::<f64>()
                * bandwidth
        })
        .collect()
}
