use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use ripplemod_core::cellmodel::{spectral_loss, ImpedanceModel, ModuleBattery, SpectralLine};
use ripplemod_core::sim::Trace;

use crate::error::AnalysisError;

/// Mean-square content of a sampled current per DFT bin.
///
/// The lines sum to the mean square of the signal. Use a whole number of
/// phase periods to keep leakage out of the weighting.
pub fn spectral_lines(current: &[f64], sample_rate: f64) -> Vec<SpectralLine> {
    let n = current.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex64> = current.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64 * n as f64);
    (0..=n / 2)
        .map(|k| {
            let twice = k != 0 && !(n.is_multiple_of(2) && k == n / 2);
            SpectralLine {
                frequency: k as f64 * sample_rate / n as f64,
                mean_square: buf[k].norm_sqr() * norm * if twice { 2.0 } else { 1.0 },
            }
        })
        .collect()
}

/// Average power dissipated by `current` in `model` (W).
pub fn loss_frequency_domain<M: ImpedanceModel + ?Sized>(
    current: &[f64],
    sample_rate: f64,
    model: &M,
) -> Result<f64, AnalysisError> {
    if current.is_empty() {
        return Err(AnalysisError::TooShort { needed: 1, got: 0 });
    }
    let resolution = sample_rate / current.len() as f64;
    Ok(spectral_loss(model, resolution, spectral_lines(current, sample_rate))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleLoss {
    /// Average battery loss per module (W).
    pub per_module: Vec<f64>,
    pub total: f64,
}

impl ModuleLoss {
    pub fn mean(&self) -> f64 {
        self.total / self.per_module.len().max(1) as f64
    }

    /// Largest minus smallest module loss (W).
    pub fn spread(&self) -> f64 {
        let max = self.per_module.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.per_module.iter().copied().fold(f64::INFINITY, f64::min);
        if self.per_module.is_empty() {
            0.0
        } else {
            max - min
        }
    }
}

/// Impedance-weighted battery loss of every module in a trace.
///
/// `model` picks the impedance used for each module from its parameters,
/// e.g. `|b| b.randles`.
pub fn module_loss<M, F>(trace: &Trace, batteries: &[ModuleBattery], phase_freq: f64, model: F) -> Result<ModuleLoss, AnalysisError>
where
    M: ImpedanceModel,
    F: Fn(&ModuleBattery) -> M,
{
    if batteries.len() != trace.modules {
        return Err(AnalysisError::InvalidArgument(format!(
            "{} battery blocks for {} modules",
            batteries.len(),
            trace.modules
        )));
    }
    let needed = (10.0 * trace.tick_rate / phase_freq).ceil() as usize;
    if trace.len() < needed {
        return Err(AnalysisError::TooShort {
            needed,
            got: trace.len(),
        });
    }
    let per_module = batteries
        .iter()
        .enumerate()
        .map(|(k, b)| loss_frequency_domain(&trace.module_current(k), trace.tick_rate, &model(b)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModuleLoss {
        total: per_module.iter().sum(),
        per_module,
    })
}
