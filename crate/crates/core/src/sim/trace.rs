use alloc::vec::Vec;

/// One tick as seen by a [`TraceSink`]. Slices are per module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord<'a> {
    pub tick: u64,
    pub time: f64,
    pub v_star: f64,
    pub level: i32,
    pub state: u32,
    pub phase_current: f64,
    pub output_voltage: f64,
    /// Battery currents, discharge positive (A).
    pub currents: &'a [f64],
    /// Battery and link dissipation attributed to each module (W).
    pub dissipation: &'a [f64],
    /// Open-circuit voltages the tick was solved with (V).
    pub voltages: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum LogEventKind {
    /// The reference scheduler rebuilt its cost table from a window closed
    /// at `taken_at`.
    TableUpdate { taken_at: u64 },
    /// The observer re-solved its share table after voltage drift.
    ObserverRebuild,
    /// The share-error integrator hit its bound `count` times this tick.
    Clamp { count: u64 },
    /// Selection needed the doubled toggle limit.
    Relaxation { from: u32, to: u32 },
    /// Demand exceeded the outermost level.
    Saturation,
    /// A module's charge reached 0 or 1.
    SocClamp { module: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogEvent {
    pub tick: u64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: LogEventKind,
}

/// Receives the simulation output as it is produced.
pub trait TraceSink {
    fn record(&mut self, tick: &TickRecord<'_>);

    fn event(&mut self, _event: &LogEvent) {}
}

/// Full in-memory trace, column-major per quantity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub modules: usize,
    pub tick_rate: f64,
    pub time: Vec<f64>,
    pub v_star: Vec<f64>,
    pub level: Vec<i32>,
    pub state: Vec<u32>,
    pub phase_current: Vec<f64>,
    pub output_voltage: Vec<f64>,
    /// `ticks x modules`, row-major.
    pub currents: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub voltages: Vec<f64>,
    pub events: Vec<LogEvent>,
}

impl Trace {
    pub fn new(modules: usize, tick_rate: f64) -> Self {
        Trace {
            modules,
            tick_rate,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn currents_at(&self, tick: usize) -> &[f64] {
        &self.currents[tick * self.modules..(tick + 1) * self.modules]
    }

    pub fn dissipation_at(&self, tick: usize) -> &[f64] {
        &self.dissipation[tick * self.modules..(tick + 1) * self.modules]
    }

    pub fn voltages_at(&self, tick: usize) -> &[f64] {
        &self.voltages[tick * self.modules..(tick + 1) * self.modules]
    }

    /// Battery current of one module over time.
    pub fn module_current(&self, module: usize) -> Vec<f64> {
        self.currents
            .iter()
            .skip(module)
            .step_by(self.modules.max(1))
            .copied()
            .collect()
    }

    pub fn module_dissipation(&self, module: usize) -> Vec<f64> {
        self.dissipation
            .iter()
            .skip(module)
            .step_by(self.modules.max(1))
            .copied()
            .collect()
    }
}

impl TraceSink for Trace {
    fn record(&mut self, r: &TickRecord<'_>) {
        self.time.push(r.time);
        self.v_star.push(r.v_star);
        self.level.push(r.level);
        self.state.push(r.state);
        self.phase_current.push(r.phase_current);
        self.output_voltage.push(r.output_voltage);
        self.currents.extend_from_slice(r.currents);
        self.dissipation.extend_from_slice(r.dissipation);
        self.voltages.extend_from_slice(r.voltages);
    }

    fn event(&mut self, event: &LogEvent) {
        self.events.push(*event);
    }
}

impl<S: TraceSink + ?Sized> TraceSink for &mut S {
    fn record(&mut self, tick: &TickRecord<'_>) {
        (**self).record(tick)
    }

    fn event(&mut self, event: &LogEvent) {
        (**self).event(event)
    }
}
