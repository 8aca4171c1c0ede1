use std::io::{self, BufRead, Write};

use ripplemod_core::sim::LogEvent;

/// One JSON object per line.
pub fn write_events<W: Write>(mut out: W, events: &[LogEvent]) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_events<R: BufRead>(input: R) -> io::Result<Vec<LogEvent>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}
