use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use ripplemod_core::cellmodel::ModuleBattery;
use ripplemod_core::sim::{ScenarioConfig, SchedulerKind, Trace};

use super::pattern::{pattern_score, PatternScore};
use super::spectrum::{band_energy, peak_prominence_db, psd, spectral_centroid, Exclusion, Psd, Window};
use super::sweep::{run_loss, LossModel};
use crate::error::AnalysisError;

/// Prominence a comb tooth or pattern needs to count as present.
pub const COMB_THRESHOLD_DB: f64 = 10.0;
pub const PATTERN_THRESHOLD: f64 = 3.0;
/// Welch segments for band energies and centroids.
pub const ANALYSIS_SEGMENTS: usize = 8;

/// Everything needed to analyse one finished run.
#[derive(Debug, Clone, Copy)]
pub struct RunData<'a> {
    pub config: &'a ScenarioConfig,
    pub trace: &'a Trace,
    /// Module parameters the run used.
    pub batteries: &'a [ModuleBattery],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombTooth {
    pub frequency: f64,
    pub prominence_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombReport {
    /// Spacing of the teeth (Hz): half the measurement update rate.
    pub spacing: f64,
    /// Teeth of each module's own full-length spectrum.
    pub modules: Vec<Vec<CombTooth>>,
    /// Modules whose fundamental and at least two further teeth stand out.
    pub modules_with_comb: usize,
    pub present: bool,
}

impl CombReport {
    /// Mean prominence of the tooth at index `k` over modules (dB).
    pub fn mean_tooth(&self, k: usize) -> f64 {
        let vals: Vec<f64> = self.modules.iter().filter_map(|m| m.get(k)).map(|t| t.prominence_db).collect();
        vals.iter().sum::<f64>() / vals.len().max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub scheduler: SchedulerKind,
    /// Energy below 100 Hz, DC and the power pulsation excluded, summed
    /// over modules (A²).
    pub sub100_energy: f64,
    pub per_module_sub100: Vec<f64>,
    /// Mean over modules of the spectral centroid with DC and the power
    /// pulsation excluded (Hz).
    pub centroid: f64,
    /// Prominence of the power pulsation in the module-averaged spectrum.
    pub pulsation_db: f64,
    pub comb: CombReport,
    pub pattern: Vec<PatternScore>,
    pub pattern_present: bool,
    pub loss_per_module: Vec<f64>,
    pub loss_total: f64,
    /// Module-averaged Welch spectrum.
    pub spectrum: Psd,
}

impl RunMetrics {
    pub fn mean_pattern_ratio(&self) -> f64 {
        self.pattern.iter().map(PatternScore::ratio).sum::<f64>() / self.pattern.len().max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub sub100_energy: f64,
    pub centroid: f64,
    pub loss_total: f64,
    pub pattern_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: RunMetrics,
    pub b: RunMetrics,
    /// `b - a` for each headline metric.
    pub deltas: Deltas,
}

fn exclusions(phase_freq: f64) -> [Exclusion; 2] {
    [Exclusion::new(0.0, 0), Exclusion::new(2.0 * phase_freq, 2)]
}

fn averaged(spectra: &[Psd]) -> Psd {
    let mut out = spectra[0].clone();
    for s in &spectra[1..] {
        for (o, d) in out.density.iter_mut().zip(&s.density) {
            *o += d;
        }
    }
    let n = spectra.len() as f64;
    out.density.iter_mut().for_each(|d| *d /= n);
    out
}

/// Prominence of every multiple of `spacing` below `upper` in one module's
/// full-length spectrum. The floor for each tooth sits between the teeth.
pub fn comb_teeth(current: &[f64], sample_rate: f64, spacing: f64, upper: f64) -> Result<Vec<CombTooth>, AnalysisError> {
    let p = psd(current, sample_rate, Window::Hann, 1)?;
    Ok((1..)
        .map(|k| k as f64 * spacing)
        .take_while(|&f| f < upper)
        .map(|f| CombTooth {
            frequency: f,
            prominence_db: peak_prominence_db(&p, f, 0.4 * spacing, 0.6 * spacing),
        })
        .collect())
}

fn has_comb(teeth: &[CombTooth]) -> bool {
    let strong = teeth.iter().filter(|t| t.prominence_db >= COMB_THRESHOLD_DB).count();
    teeth.first().is_some_and(|t| t.prominence_db >= COMB_THRESHOLD_DB) && strong >= 3
}

/// Comb analysis of every module current in a trace.
pub fn comb_report(trace: &Trace, spacing: f64, upper: f64) -> Result<CombReport, AnalysisError> {
    let modules = (0..trace.modules)
        .map(|k| comb_teeth(&trace.module_current(k), trace.tick_rate, spacing, upper))
        .collect::<Result<Vec<_>, _>>()?;
    let modules_with_comb = modules.iter().filter(|t| has_comb(t)).count();
    Ok(CombReport {
        spacing,
        modules,
        modules_with_comb,
        present: modules_with_comb > 0,
    })
}

/// Spectral, pattern and loss metrics of one run.
pub fn run_metrics(run: RunData<'_>, comb_spacing: f64) -> Result<RunMetrics, AnalysisError> {
    let trace = run.trace;
    let f = run.config.phase_freq;
    let ex = exclusions(f);
    let mut spectra = Vec::with_capacity(trace.modules);
    let mut per_module_sub100 = Vec::with_capacity(trace.modules);
    let mut centroid = 0.0;
    let mut pattern = Vec::with_capacity(trace.modules);
    for k in 0..trace.modules {
        let current = trace.module_current(k);
        let p = psd(&current, trace.tick_rate, Window::Hann, ANALYSIS_SEGMENTS)?;
        per_module_sub100.push(band_energy(&p, 0.0, 2.0 * f, &ex)?);
        centroid += spectral_centroid(&p, &ex) / trace.modules as f64;
        spectra.push(p);
        pattern.push(pattern_score(&current, trace.tick_rate, 0.5 / f, run.config.meas_period)?);
    }
    let spectrum = averaged(&spectra);
    let comb = comb_report(trace, comb_spacing, 2.0 * f)?;
    let full = psd(&trace.module_current(0), trace.tick_rate, Window::Hann, 1)?;
    let pulsation_db = peak_prominence_db(&full, 2.0 * f, 2.0, 3.0);
    let loss = run_loss(trace, run.batteries, f, LossModel::Randles)?;
    let mut metrics = RunMetrics {
        scheduler: run.config.scheduler,
        sub100_energy: per_module_sub100.iter().sum(),
        per_module_sub100,
        centroid,
        pulsation_db,
        comb,
        pattern,
        pattern_present: false,
        loss_per_module: loss.per_module,
        loss_total: loss.total,
        spectrum,
    };
    metrics.pattern_present = metrics.mean_pattern_ratio() > PATTERN_THRESHOLD;
    Ok(metrics)
}

/// Top-level config keys that differ once the scheduler is ignored.
pub fn config_mismatch(a: &ScenarioConfig, b: &ScenarioConfig) -> Option<String> {
    let norm = |c: &ScenarioConfig| serde_json::to_value(c.with_scheduler(SchedulerKind::Proposed)).ok();
    match (norm(a), norm(b)) {
        (Some(serde_json::Value::Object(x)), Some(serde_json::Value::Object(y))) => {
            let keys: Vec<&str> = x
                .iter()
                .filter(|(k, v)| y.get(*k) != Some(v))
                .map(|(k, _)| k.as_str())
                .collect();
            (!keys.is_empty()).then(|| keys.join(", "))
        }
        _ => (a.with_scheduler(SchedulerKind::Proposed) != b.with_scheduler(SchedulerKind::Proposed))
            .then(|| "config".to_string()),
    }
}

/// Side-by-side metrics of two runs that differ at most in the scheduler.
pub fn compare_runs(a: RunData<'_>, b: RunData<'_>) -> Result<ComparisonReport, AnalysisError> {
    if let Some(keys) = config_mismatch(a.config, b.config) {
        return Err(AnalysisError::ConfigMismatch(keys));
    }
    let spacing = 0.5 / a.config.meas_period;
    let ma = run_metrics(a, spacing)?;
    let mb = run_metrics(b, spacing)?;
    let deltas = Deltas {
        sub100_energy: mb.sub100_energy - ma.sub100_energy,
        centroid: mb.centroid - ma.centroid,
        loss_total: mb.loss_total - ma.loss_total,
        pattern_ratio: mb.mean_pattern_ratio() - ma.mean_pattern_ratio(),
    };
    Ok(ComparisonReport { a: ma, b: mb, deltas })
}

impl ComparisonReport {
    /// Plain-text summary table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, name: &str, a: String, b: String| {
            let _ = writeln!(out, "{name:<28}{a:>16}{b:>16}");
        };
        row(&mut out, "metric", format!("A {}", self.a.scheduler.as_str()), format!("B {}", self.b.scheduler.as_str()));
        row(&mut out, "sub-100 Hz energy [A^2]", format!("{:.4e}", self.a.sub100_energy), format!("{:.4e}", self.b.sub100_energy));
        row(&mut out, "spectral centroid [Hz]", format!("{:.1}", self.a.centroid), format!("{:.1}", self.b.centroid));
        row(&mut out, "power pulsation [dB]", format!("{:.1}", self.a.pulsation_db), format!("{:.1}", self.b.pulsation_db));
        row(&mut out, "comb present", self.a.comb.present.to_string(), self.b.comb.present.to_string());
        row(&mut out, "pattern ratio", format!("{:.2}", self.a.mean_pattern_ratio()), format!("{:.2}", self.b.mean_pattern_ratio()));
        row(&mut out, "pattern present", self.a.pattern_present.to_string(), self.b.pattern_present.to_string());
        row(&mut out, "battery loss [W]", format!("{:.4}", self.a.loss_total), format!("{:.4}", self.b.loss_total));
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "comb teeth at {} Hz spacing, mean over modules [dB]; modules with comb: {} vs {}",
            self.a.comb.spacing, self.a.comb.modules_with_comb, self.b.comb.modules_with_comb
        );
        let teeth = self.a.comb.modules.first().map_or(0, Vec::len);
        for k in 0..teeth {
            let f = self.a.comb.modules[0][k].frequency;
            let _ = writeln!(out, "  {:>6.1} Hz {:>10.1} {:>10.1}", f, self.a.comb.mean_tooth(k), self.b.comb.mean_tooth(k));
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "B - A: sub-100 {:+.4e}, centroid {:+.1}, loss {:+.4}, pattern {:+.2}",
            self.deltas.sub100_energy, self.deltas.centroid, self.deltas.loss_total, self.deltas.pattern_ratio
        );
        out
    }
}
