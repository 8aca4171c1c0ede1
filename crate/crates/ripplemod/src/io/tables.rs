use std::io::{self, Write};

use ripplemod_core::cellmodel::ImpedanceModel;
use ripplemod_core::topology::{ShareTable, StateSpace};

use crate::analysis::{Psd, SweepTable};

/// One row per state: index, serialization, level, gate word and, when a
/// share table is given, the current share of every module.
pub fn write_states_csv<W: Write>(out: W, space: &StateSpace, shares: Option<&ShareTable>) -> io::Result<()> {
    let n = space.module_count();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string(), "state".into(), "level".into(), "gate_word".into()];
    if shares.is_some() {
        header.extend((0..n).map(|k| format!("share{k}")));
    }
    w.write_record(&header)?;
    for (i, state) in space.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            state.to_string(),
            state.level().to_string(),
            format!("{:0width$b}", state.gate_word(), width = 4 * n),
        ];
        if let Some(table) = shares {
            row.extend(table.shares(i).iter().map(f64::to_string));
        }
        w.write_record(&row)?;
    }
    w.flush()
}

/// Impedance profile: frequency, real and imaginary part, magnitude.
pub fn write_impedance_csv<W: Write, M: ImpedanceModel + ?Sized>(
    out: W,
    model: &M,
    frequencies: &[f64],
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["frequency", "re", "im", "magnitude"])?;
    for &f in frequencies {
        let z = model
            .impedance(f)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
        w.write_record([f.to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()])?;
    }
    w.flush()
}

pub fn write_psd_csv<W: Write>(out: W, psd: &Psd) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["frequency", "density"])?;
    for (f, d) in psd.frequencies.iter().zip(&psd.density) {
        w.write_record([f.to_string(), d.to_string()])?;
    }
    w.flush()
}

/// Loss per scheduler and modulation index, with the relative improvement
/// of the proposed scheduler on every proposed row.
pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable) -> io::Result<()> {
    let modules = table.rows.first().map_or(0, |r| r.per_module.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "modulation_index".to_string(),
        "scheduler".into(),
        "mean_loss".into(),
        "spread".into(),
        "total_loss".into(),
        "improvement".into(),
    ];
    header.extend((0..modules).map(|k| format!("loss{k}")));
    w.write_record(&header)?;
    let improvements = table.improvements();
    for row in &table.rows {
        let improvement = improvements
            .iter()
            .find(|(m, _)| *m == row.modulation_index)
            .filter(|_| row.scheduler == ripplemod_core::sim::SchedulerKind::Proposed)
            .map_or(String::new(), |(_, x)| x.to_string());
        let mut rec = vec![
            row.modulation_index.to_string(),
            row.scheduler.as_str().to_string(),
            row.mean_loss.to_string(),
            row.spread.to_string(),
            row.total_loss.to_string(),
            improvement,
        ];
        rec.extend(row.per_module.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()
}
