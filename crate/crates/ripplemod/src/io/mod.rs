//! File formats: scenario config, traces, event logs, tables and plots.
//!
//! Traces come in two forms that carry the same per-tick data:
//!
//! * CSV with a header row, one row per tick. Floats use the shortest
//!   representation that parses back to the same value.
//! * A little-endian binary file starting with the magic `RMTR`, see
//!   [`write_trace_binary`].
//!
//! Log events are JSON lines; reports are JSON.

mod config;
mod events;
mod svg;
mod tables;
mod trace_bin;
mod trace_csv;

pub use config::{load_config, parse_config, to_toml, ConfigError};
pub use events::{read_events, write_events};
pub use svg::{LinePlot, Series};
pub use tables::{write_impedance_csv, write_psd_csv, write_states_csv, write_sweep_csv};
pub use trace_bin::{read_trace_binary, write_trace_binary, TRACE_MAGIC, TRACE_VERSION};
pub use trace_csv::{read_trace_csv, write_trace_csv};

use std::fs;
use std::io;
use std::path::Path;

/// Reads a trace in either format, telling them apart by the magic bytes.
pub fn read_trace(path: &Path) -> io::Result<ripplemod_core::sim::Trace> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(TRACE_MAGIC) {
        read_trace_binary(&mut bytes.as_slice())
    } else {
        read_trace_csv(bytes.as_slice())
    }
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never see a half-written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}
