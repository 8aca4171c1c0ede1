use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psd {
    pub frequencies: Vec<f64>,
    /// Density in signal units squared per hertz.
    pub density: Vec<f64>,
    /// Bin width (Hz).
    pub resolution: f64,
}

/// Taper applied to each segment before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; len],
            // periodic Hann: overlapping halves sum to one
            Window::Hann => (0..len)
                .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / len as f64).cos())
                .collect(),
        }
    }
}

/// Welch estimate with 50% overlapping segments.
///
/// `segments` is the number of full segments that fit the signal at that
/// overlap. Each segment has its mean removed, so the result integrates to
/// the variance of the signal rather than its mean square.
pub fn psd(signal: &[f64], sample_rate: f64, window: Window, segments: usize) -> Result<Psd, AnalysisError> {
    if segments == 0 {
        return Err(AnalysisError::InvalidArgument("segments must be positive".into()));
    }
    if !(sample_rate > 0.0) {
        return Err(AnalysisError::InvalidArgument("sample rate must be positive".into()));
    }
    let seg_len = if segments == 1 {
        signal.len()
    } else {
        2 * signal.len() / (segments + 1)
    };
    if seg_len < 2 || signal.len() < 2 * segments.min(2) {
        return Err(AnalysisError::TooShort {
            needed: 2 * segments.max(1),
            got: signal.len(),
        });
    }
    let hop = (seg_len / 2).max(1);
    let taper = window.coefficients(seg_len);
    let power: f64 = taper.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(seg_len);

    let bins = seg_len / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::default(); seg_len];
    let mut used = 0;
    let mut start = 0;
    while start + seg_len <= signal.len() && used < segments {
        let seg = &signal[start..start + seg_len];
        let mean = seg.iter().sum::<f64>() / seg_len as f64;
        for ((b, x), w) in buf.iter_mut().zip(seg).zip(&taper) {
            *b = Complex64::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        used += 1;
        start += hop;
    }
    let scale = 1.0 / (sample_rate * power * used as f64);
    let density = acc
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let one_sided = if k == 0 || (seg_len % 2 == 0 && k == bins - 1) { 1.0 } else { 2.0 };
            p * scale * one_sided
        })
        .collect();
    let resolution = sample_rate / seg_len as f64;
    Ok(Psd {
        frequencies: (0..bins).map(|k| k as f64 * resolution).collect(),
        density,
        resolution,
    })
}

impl Psd {
    /// Index of the bin nearest to `f`.
    pub fn bin_of(&self, f: f64) -> usize {
        ((f / self.resolution).round() as usize).min(self.density.len() - 1)
    }

    /// Power in bin `k` (density times bin width).
    pub fn bin_power(&self, k: usize) -> f64 {
        self.density[k] * self.resolution
    }

    /// Total power, which equals the signal variance.
    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.resolution
    }
}

/// Frequencies to leave out of a band integral, each with a half-width in
/// bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub frequency: f64,
    pub half_width_bins: usize,
}

impl Exclusion {
    pub fn new(frequency: f64, half_width_bins: usize) -> Self {
        Exclusion {
            frequency,
            half_width_bins,
        }
    }
}

fn excluded(psd: &Psd, k: usize, exclusions: &[Exclusion]) -> bool {
    exclusions.iter().any(|e| {
        let c = psd.bin_of(e.frequency);
        k + e.half_width_bins >= c && k <= c + e.half_width_bins
    })
}

/// Power in the bins whose centres lie in `[f_lo, f_hi)`, minus exclusions.
pub fn band_energy(psd: &Psd, f_lo: f64, f_hi: f64, exclusions: &[Exclusion]) -> Result<f64, AnalysisError> {
    let nyquist = psd.frequencies.last().copied().unwrap_or(0.0);
    if !(f_lo >= 0.0 && f_lo < f_hi && f_hi <= nyquist + psd.resolution) {
        return Err(AnalysisError::InvalidArgument(format!(
            "band [{f_lo}, {f_hi}) outside [0, {nyquist}]"
        )));
    }
    Ok(psd
        .frequencies
        .iter()
        .enumerate()
        .filter(|&(k, &f)| f >= f_lo && f < f_hi && !excluded(psd, k, exclusions))
        .map(|(k, _)| psd.bin_power(k))
        .sum())
}

/// Power-weighted mean frequency outside the exclusions.
pub fn spectral_centroid(psd: &Psd, exclusions: &[Exclusion]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (k, (&f, &p)) in psd.frequencies.iter().zip(&psd.density).enumerate() {
        if !excluded(psd, k, exclusions) {
            num += f * p;
            den += p;
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Height of the bin at `f` over a local floor, in dB.
///
/// The floor is the median of the bins between `floor_min_hz` and
/// `floor_max_hz` away from `f` on either side, so a peak's own leakage does
/// not raise it.
pub fn peak_prominence_db(psd: &Psd, f: f64, floor_min_hz: f64, floor_max_hz: f64) -> f64 {
    let k = psd.bin_of(f);
    let lo = (floor_min_hz / psd.resolution).round().max(1.0) as usize;
    let hi = (floor_max_hz / psd.resolution).round().max(lo as f64) as usize;
    let mut floor: Vec<f64> = (lo..=hi)
        .flat_map(|d| [k.checked_sub(d), Some(k + d)])
        .flatten()
        .filter(|&j| j > 0 && j < psd.density.len())
        .map(|j| psd.density[j])
        .collect();
    if floor.is_empty() {
        return 0.0;
    }
    floor.sort_by(f64::total_cmp);
    let median = floor[floor.len() / 2];
    let peak = psd.density[k];
    10.0 * (peak.max(f64::MIN_POSITIVE) / median.max(f64::MIN_POSITIVE)).log10()
}
