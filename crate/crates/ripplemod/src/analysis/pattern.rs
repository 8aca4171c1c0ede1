use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

/// Strength of a periodic switching pattern at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternScore {
    /// Lag that was tested (s).
    pub lag: f64,
    /// `|r(lag)|` of the normalized autocorrelation.
    pub peak: f64,
    /// RMS of `r` over the lags between 0.3 and 0.7 of `lag`.
    pub noise: f64,
}

impl PatternScore {
    pub fn ratio(&self) -> f64 {
        if self.noise > 0.0 {
            self.peak / self.noise
        } else if self.peak > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Means over consecutive blocks of `block` samples; a trailing partial
/// block is dropped.
pub fn block_average(signal: &[f64], block: usize) -> Vec<f64> {
    signal
        .chunks_exact(block.max(1))
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

/// Normalized autocorrelation `r(0..=max_lag)` of a mean-removed signal.
pub fn autocorrelation(signal: &[f64], max_lag: usize) -> Vec<f64> {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n.max(1) as f64;
    let centred: Vec<f64> = signal.iter().map(|x| x - mean).collect();
    let r0: f64 = centred.iter().map(|x| x * x).sum();
    (0..=max_lag.min(n.saturating_sub(1)))
        .map(|lag| {
            if r0 == 0.0 {
                return 0.0;
            }
            centred[..n - lag]
                .iter()
                .zip(&centred[lag..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / r0
        })
        .collect()
}

/// Autocorrelation of a module current at a suspected pattern period.
///
/// The current is first averaged over blocks of `block_seconds`, normally
/// half a phase period, so the structural power pulsation averages out and
/// only slower load shifts remain.
pub fn pattern_score(current: &[f64], sample_rate: f64, block_seconds: f64, lag: f64) -> Result<PatternScore, AnalysisError> {
    let block = (block_seconds * sample_rate).round() as usize;
    let lag_blocks = (lag / block_seconds).round() as usize;
    if block == 0 || lag_blocks < 3 {
        return Err(AnalysisError::InvalidArgument(
            "lag must span at least three blocks of one sample or more".into(),
        ));
    }
    let blocks = block_average(current, block);
    if blocks.len() < 3 * lag_blocks {
        return Err(AnalysisError::TooShort {
            needed: 3 * lag_blocks * block,
            got: current.len(),
        });
    }
    let r = autocorrelation(&blocks, lag_blocks);
    let lo = (0.3 * lag_blocks as f64).round() as usize;
    let hi = (0.7 * lag_blocks as f64).round() as usize;
    let band = &r[lo..=hi];
    let noise = (band.iter().map(|x| x * x).sum::<f64>() / band.len() as f64).sqrt();
    Ok(PatternScore {
        lag: lag_blocks as f64 * block_seconds,
        peak: r[lag_blocks].abs(),
        noise,
    })
}
