//! Spectra, impedance-weighted losses and scheduler comparisons.

mod compare;
mod loss;
mod pattern;
mod protocol;
mod spectrum;
mod sweep;

pub use compare::{
    comb_report, comb_teeth, compare_runs, config_mismatch, run_metrics, CombReport, CombTooth, ComparisonReport, Deltas,
    RunData, RunMetrics, ANALYSIS_SEGMENTS, COMB_THRESHOLD_DB, PATTERN_THRESHOLD,
};
pub use loss::{loss_frequency_domain, module_loss, spectral_lines, ModuleLoss};
pub use pattern::{autocorrelation, block_average, pattern_score, PatternScore};
pub use protocol::{emulate_loss_protocol, ProtocolEstimate};
pub use spectrum::{band_energy, peak_prominence_db, psd, spectral_centroid, Exclusion, Psd, Window};
pub use sweep::{improvement, parse_range, run_loss, sweep_modulation_index, LossModel, SweepRow, SweepTable};
