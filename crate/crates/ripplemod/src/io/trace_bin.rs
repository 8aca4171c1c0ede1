use std::io::{self, Read, Write};

use ripplemod_core::sim::Trace;

pub const TRACE_MAGIC: &[u8; 4] = b"RMTR";
pub const TRACE_VERSION: u32 = 1;

/// Binary trace layout, all little-endian:
///
/// ```text
/// "RMTR" | version u32 | modules u32 | tick_rate f64 | ticks u64
/// per tick: time f64 | v_star f64 | level i32 | state u32 |
///           phase_current f64 | output_voltage f64 |
///           currents [f64; modules] | dissipation [f64; modules] |
///           voltages [f64; modules]
/// ```
pub fn write_trace_binary<W: Write>(mut out: W, trace: &Trace) -> io::Result<()> {
    out.write_all(TRACE_MAGIC)?;
    out.write_all(&TRACE_VERSION.to_le_bytes())?;
    out.write_all(&(trace.modules as u32).to_le_bytes())?;
    out.write_all(&trace.tick_rate.to_le_bytes())?;
    out.write_all(&(trace.len() as u64).to_le_bytes())?;
    for k in 0..trace.len() {
        out.write_all(&trace.time[k].to_le_bytes())?;
        out.write_all(&trace.v_star[k].to_le_bytes())?;
        out.write_all(&trace.level[k].to_le_bytes())?;
        out.write_all(&trace.state[k].to_le_bytes())?;
        out.write_all(&trace.phase_current[k].to_le_bytes())?;
        out.write_all(&trace.output_voltage[k].to_le_bytes())?;
        for v in trace
            .currents_at(k)
            .iter()
            .chain(trace.dissipation_at(k))
            .chain(trace.voltages_at(k))
        {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()
}

fn bytes<const N: usize, R: Read>(input: &mut R) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    input.read_exact(&mut b)?;
    Ok(b)
}

fn f64_from<R: Read>(input: &mut R) -> io::Result<f64> {
    Ok(f64::from_le_bytes(bytes(input)?))
}

/// Reads a trace written by [`write_trace_binary`]. Log events are not part
/// of this format.
pub fn read_trace_binary<R: Read>(input: &mut R) -> io::Result<Trace> {
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    if &bytes::<4, _>(input)? != TRACE_MAGIC {
        return Err(invalid("not a binary trace (bad magic)".into()));
    }
    let version = u32::from_le_bytes(bytes(input)?);
    if version != TRACE_VERSION {
        return Err(invalid(format!("unsupported trace version {version}")));
    }
    let modules = u32::from_le_bytes(bytes(input)?) as usize;
    let tick_rate = f64_from(input)?;
    let ticks = u64::from_le_bytes(bytes(input)?) as usize;
    let mut t = Trace::new(modules, tick_rate);
    for _ in 0..ticks {
        t.time.push(f64_from(input)?);
        t.v_star.push(f64_from(input)?);
        t.level.push(i32::from_le_bytes(bytes(input)?));
        t.state.push(u32::from_le_bytes(bytes(input)?));
        t.phase_current.push(f64_from(input)?);
        t.output_voltage.push(f64_from(input)?);
        for _ in 0..modules {
            t.currents.push(f64_from(input)?);
        }
        for _ in 0..modules {
            t.dissipation.push(f64_from(input)?);
        }
        for _ in 0..modules {
            t.voltages.push(f64_from(input)?);
        }
    }
    Ok(t)
}
