use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cellmodel::ModuleBattery;
use crate::topology::MAX_MODULES;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SchedulerKind {
    #[default]
    Proposed,
    Reference,
}

impl SchedulerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::Proposed => "proposed",
            SchedulerKind::Reference => "reference",
        }
    }
}

/// What the string drives.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)
)]
pub enum LoadModel {
    /// Ideal sinusoidal current in phase with the demanded voltage (A peak).
    Current { amplitude: f64 },
    /// Ohmic load across the string output (ohm).
    Resistive { resistance: f64 },
}

impl Default for LoadModel {
    fn default() -> Self {
        LoadModel::Current { amplitude: 10.0 }
    }
}

/// Everything that defines one simulation run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub schema_version: u32,
    /// Number of modules in the string.
    pub modules: usize,
    /// Control tick rate (Hz).
    pub tick_rate: f64,
    /// Output phase frequency (Hz).
    pub phase_freq: f64,
    pub modulation_index: f64,
    pub load: LoadModel,
    pub scheduler: SchedulerKind,
    /// Reference scheduler update period (s).
    pub meas_period: f64,
    /// Delay between the end of a measurement window and its delivery (s).
    pub meas_latency: f64,
    /// Extra ticks before a cost table computed by the proposed scheduler
    /// becomes visible.
    pub exec_delay: u64,
    pub max_toggles: u32,
    /// Anti-windup bound of the share-error integrator (share-seconds).
    pub clamp: f64,
    /// Simulated time (s).
    pub duration: f64,
    pub seed: u64,
    /// Relative spread applied to each module's resistances and voltage
    /// curve; 0 disables it.
    pub jitter: f64,
    /// Phase current at which shares are tabulated; defaults to the load
    /// amplitude.
    pub observer_current: Option<f64>,
    /// Parameters used for every module without an explicit entry.
    pub battery: ModuleBattery,
    /// Optional per-module parameters; either empty or one per module.
    pub module: Vec<ModuleBattery>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            modules: 5,
            tick_rate: 20_000.0,
            phase_freq: 50.0,
            modulation_index: 0.8,
            load: LoadModel::default(),
            scheduler: SchedulerKind::Proposed,
            meas_period: 0.1,
            meas_latency: 0.01,
            exec_delay: 0,
            max_toggles: 2,
            clamp: 0.005,
            duration: 1.0,
            seed: 0,
            jitter: 0.0,
            observer_current: None,
            battery: ModuleBattery::default(),
            module: Vec::new(),
        }
    }
}

fn field(name: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: name.into(),
        reason: reason.into(),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("{v} must be positive and finite")))
    }
}

impl ScenarioConfig {
    /// Checks every field; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.modules == 0 || self.modules > MAX_MODULES {
            return Err(field("modules", format!("{} outside 1..={MAX_MODULES}", self.modules)));
        }
        positive("phase_freq", self.phase_freq)?;
        positive("tick_rate", self.tick_rate)?;
        if self.tick_rate < 20.0 * self.phase_freq {
            return Err(field("tick_rate", "must be at least 20 times phase_freq"));
        }
        if !(0.0..=1.0).contains(&self.modulation_index) {
            return Err(field("modulation_index", "outside [0, 1]"));
        }
        match self.load {
            LoadModel::Current { amplitude } => {
                if !(amplitude >= 0.0 && amplitude.is_finite()) {
                    return Err(field("load.amplitude", "must be finite and non-negative"));
                }
            }
            LoadModel::Resistive { resistance } => positive("load.resistance", resistance)?,
        }
        if self.meas_period * self.tick_rate < 1.0 || !self.meas_period.is_finite() {
            return Err(field("meas_period", "must span at least one tick"));
        }
        if !(self.meas_latency >= 0.0 && self.meas_latency.is_finite()) {
            return Err(field("meas_latency", "must be finite and non-negative"));
        }
        if self.max_toggles == 0 {
            return Err(field("max_toggles", "must be at least 1"));
        }
        positive("clamp", self.clamp)?;
        positive("duration", self.duration)?;
        if self.duration * self.phase_freq < 5.0 - 1e-9 {
            return Err(field("duration", "must cover at least 5 phase periods"));
        }
        if !(0.0..=0.1).contains(&self.jitter) {
            return Err(field("jitter", "outside [0, 0.1]"));
        }
        if let Some(i) = self.observer_current {
            positive("observer_current", i)?;
        }
        check_battery("battery", &self.battery)?;
        if !self.module.is_empty() && self.module.len() != self.modules {
            return Err(field(
                "module",
                format!("{} entries for {} modules", self.module.len(), self.modules),
            ));
        }
        for (i, b) in self.module.iter().enumerate() {
            check_battery(&format!("module[{i}]"), b)?;
        }
        Ok(())
    }

    pub fn tick_count(&self) -> u64 {
        libm::round(self.duration * self.tick_rate) as u64
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.tick_rate
    }

    /// Parameter block of every module before jitter.
    pub fn batteries(&self) -> Vec<ModuleBattery> {
        if self.module.is_empty() {
            alloc::vec![self.battery; self.modules]
        } else {
            self.module.clone()
        }
    }

    /// Copy with only the scheduler swapped.
    pub fn with_scheduler(&self, scheduler: SchedulerKind) -> Self {
        ScenarioConfig {
            scheduler,
            ..self.clone()
        }
    }
}

fn check_battery(prefix: &str, b: &ModuleBattery) -> Result<()> {
    b.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => field(format!("{prefix}.{name}"), reason),
        other => field(prefix, other.to_string()),
    })
}
