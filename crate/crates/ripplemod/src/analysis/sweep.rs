use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ripplemod_core::cellmodel::ReducedFilterParams;
use ripplemod_core::sim::{run_scenario, ScenarioConfig, SchedulerKind};

use super::loss::{module_loss, ModuleLoss};
use crate::error::AnalysisError;

/// Impedance used to weight the module current spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LossModel {
    #[default]
    Randles,
    Reduced,
}

/// Impedance-weighted module losses of a finished run.
pub fn run_loss(
    trace: &ripplemod_core::sim::Trace,
    batteries: &[ripplemod_core::cellmodel::ModuleBattery],
    phase_freq: f64,
    model: LossModel,
) -> Result<ModuleLoss, AnalysisError> {
    match model {
        LossModel::Randles => module_loss(trace, batteries, phase_freq, |b| b.randles),
        LossModel::Reduced => module_loss(trace, batteries, phase_freq, |b| {
            ReducedFilterParams::from_randles(&b.randles)
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub modulation_index: f64,
    pub scheduler: SchedulerKind,
    /// Mean loss per module (W).
    pub mean_loss: f64,
    /// Largest minus smallest module loss (W).
    pub spread: f64,
    pub total_loss: f64,
    pub per_module: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Relative loss reduction of `better` over `baseline`.
pub fn improvement(baseline: f64, better: f64) -> f64 {
    (baseline - better) / baseline
}

impl SweepTable {
    pub fn row(&self, m: f64, scheduler: SchedulerKind) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.modulation_index == m && r.scheduler == scheduler)
    }

    /// Relative improvement of the proposed scheduler at every swept index.
    pub fn improvements(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for r in self.rows.iter().filter(|r| r.scheduler == SchedulerKind::Reference) {
            if let Some(p) = self.row(r.modulation_index, SchedulerKind::Proposed) {
                out.push((r.modulation_index, improvement(r.total_loss, p.total_loss)));
            }
        }
        out
    }
}

/// Runs both schedulers at every modulation index with the template's seed.
///
/// Scenarios run in parallel; the rows come back ordered by index, then
/// reference before proposed.
pub fn sweep_modulation_index(template: &ScenarioConfig, indices: &[f64], model: LossModel) -> Result<SweepTable, AnalysisError> {
    if let Some(&m) = indices.iter().find(|&&m| !(m > 0.0 && m <= 1.0)) {
        return Err(AnalysisError::InvalidArgument(format!("modulation index {m} outside (0, 1]")));
    }
    let jobs: Vec<(f64, SchedulerKind)> = indices
        .iter()
        .flat_map(|&m| [(m, SchedulerKind::Reference), (m, SchedulerKind::Proposed)])
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(m, scheduler)| {
            let cfg = ScenarioConfig {
                modulation_index: m,
                scheduler,
                ..template.clone()
            };
            let context = |e: AnalysisError| AnalysisError::Scenario {
                modulation_index: m,
                scheduler: scheduler.as_str(),
                source: Box::new(e),
            };
            let (trace, summary) = run_scenario(&cfg).map_err(|e| context(e.into()))?;
            let loss = run_loss(&trace, &summary.initial_batteries, cfg.phase_freq, model).map_err(context)?;
            Ok(SweepRow {
                modulation_index: m,
                scheduler,
                mean_loss: loss.mean(),
                spread: loss.spread(),
                total_loss: loss.total,
                per_module: loss.per_module,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(SweepTable { rows })
}

/// `start:stop:step` with an inclusive end, e.g. `0.3:0.95:0.05`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, AnalysisError> {
    let bad = || AnalysisError::InvalidArgument(format!("expected start:stop:step, got `{spec}`"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [single] => Ok(vec![*single]),
        [start, stop, step] if *step > 0.0 && stop >= start => {
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            // round to the step's decimal grid so 0.3 + 13 * 0.05 prints as 0.95
            Ok((0..=count)
                .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r = parse_range("0.3:0.95:0.05").unwrap();
        assert_eq!(r.len(), 14);
        assert_eq!(r[0], 0.3);
        assert_eq!(*r.last().unwrap(), 0.95);
        assert_eq!(parse_range("0.8").unwrap(), vec![0.8]);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("a:b").is_err());
    }

    #[test]
    fn swapping_schedulers_flips_the_sign() {
        assert!(improvement(3.0, 2.0) > 0.0);
        assert!(improvement(2.0, 3.0) < 0.0);
        assert_eq!(improvement(2.0, 2.0), 0.0);
    }

    #[test]
    fn one_row_per_pair() {
        let template = ScenarioConfig {
            modules: 2,
            duration: 0.2,
            ..Default::default()
        };
        let t = sweep_modulation_index(&template, &[0.5, 0.9], LossModel::Randles).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.row(0.9, SchedulerKind::Proposed).is_some());
        assert_eq!(t.improvements().len(), 2);
        assert!(sweep_modulation_index(&template, &[0.0], LossModel::Randles).is_err());
    }
}
