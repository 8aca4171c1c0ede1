use std::io::{self, Read, Write};

use ripplemod_core::sim::Trace;

fn header(modules: usize) -> Vec<String> {
    let mut h: Vec<String> = ["tick", "time", "v_star", "level", "state", "phase_current", "output_voltage"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for prefix in ["i_b", "p_diss", "v_oc"] {
        h.extend((0..modules).map(|k| format!("{prefix}{k}")));
    }
    h
}

pub fn write_trace_csv<W: Write>(out: W, trace: &Trace) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(trace.modules))?;
    let mut row: Vec<String> = Vec::with_capacity(7 + 3 * trace.modules);
    for k in 0..trace.len() {
        row.clear();
        row.push(k.to_string());
        row.push(trace.time[k].to_string());
        row.push(trace.v_star[k].to_string());
        row.push(trace.level[k].to_string());
        row.push(trace.state[k].to_string());
        row.push(trace.phase_current[k].to_string());
        row.push(trace.output_voltage[k].to_string());
        for v in trace
            .currents_at(k)
            .iter()
            .chain(trace.dissipation_at(k))
            .chain(trace.voltages_at(k))
        {
            row.push(v.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()
}

/// Reads a CSV trace. The tick rate is recovered from the first time step.
pub fn read_trace_csv<R: Read>(input: R) -> io::Result<Trace> {
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut r = csv::Reader::from_reader(input);
    let columns = r.headers()?.len();
    if columns < 7 || (columns - 7) % 3 != 0 {
        return Err(invalid(format!("unexpected column count {columns}")));
    }
    let modules = (columns - 7) / 3;
    let mut t = Trace::new(modules, 0.0);
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let num = |i: usize| -> io::Result<f64> {
            record[i]
                .parse()
                .map_err(|_| invalid(format!("row {}: bad number `{}`", line + 1, &record[i])))
        };
        t.time.push(num(1)?);
        t.v_star.push(num(2)?);
        t.level.push(num(3)? as i32);
        t.state.push(num(4)? as u32);
        t.phase_current.push(num(5)?);
        t.output_voltage.push(num(6)?);
        for i in 0..modules {
            t.currents.push(num(7 + i)?);
        }
        for i in 0..modules {
            t.dissipation.push(num(7 + modules + i)?);
        }
        for i in 0..modules {
            t.voltages.push(num(7 + 2 * modules + i)?);
        }
    }
    if t.time.len() >= 2 {
        t.tick_rate = 1.0 / (t.time[1] - t.time[0]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{read_trace_binary, write_trace_binary};
    use ripplemod_core::sim::{run_scenario, ScenarioConfig};

    fn sample() -> Trace {
        let cfg = ScenarioConfig {
            modules: 3,
            duration: 0.1,
            ..Default::default()
        };
        run_scenario(&cfg).unwrap().0
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let mut t = sample();
        t.events.clear();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &t).unwrap();
        let back = read_trace_csv(buf.as_slice()).unwrap();
        assert_eq!(back.currents, t.currents);
        assert_eq!(back.time, t.time);
        assert_eq!(back.state, t.state);
        assert!((back.tick_rate - t.tick_rate).abs() < 1e-6);
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let mut t = sample();
        t.events.clear();
        let mut buf = Vec::new();
        write_trace_binary(&mut buf, &t).unwrap();
        assert_eq!(&buf[..4], b"RMTR");
        let back = read_trace_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert!(read_trace_binary(&mut &b"XXXX"[..]).is_err());
    }
}
