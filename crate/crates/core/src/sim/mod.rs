//! Deterministic discrete-event simulation of one phase string.
//!
//! A scenario advances in control ticks. Each tick computes the demanded
//! phase voltage, modulates it to a level, lets the configured scheduler pick
//! a string state, solves the exact battery currents with live voltages and
//! records the result. Delayed measurements for the reference scheduler are
//! events on a queue ordered by `(tick, kind, sequence)`.

mod config;
mod event;
mod kernel;
mod trace;

pub use config::{LoadModel, ScenarioConfig, SchedulerKind, SCHEMA_VERSION};
pub use event::{inject_latency, EventQueue, SimEvent};
pub use kernel::{module_parameters, run_scenario, run_scenario_with, RunSummary};
pub use trace::{LogEvent, LogEventKind, TickRecord, Trace, TraceSink};
