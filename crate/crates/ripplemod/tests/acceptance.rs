//! End-to-end acceptance checks. Every criterion prints one PASS or FAIL
//! line with the measured numbers; the test fails if any criterion does.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ripplemod::analysis::{
    band_energy, comb_teeth, emulate_loss_protocol, improvement, loss_frequency_domain, peak_prominence_db, psd,
    sweep_modulation_index, Exclusion, LossModel, Window, ANALYSIS_SEGMENTS, COMB_THRESHOLD_DB,
};
use ripplemod::io::write_trace_binary;
use ripplemod_core::cellmodel::{randles_impedance, rc_ladder_oracle, RandlesParams};
use ripplemod_core::sim::{run_scenario, LoadModel, ScenarioConfig, SchedulerKind, Trace};
use ripplemod_core::topology::nodal::nodal_oracle;
use ripplemod_core::topology::{
    enumerate_string_states, solve_current_distribution, InterconnectResistances, ModuleElectrical, ModuleLabel,
    StringState,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn solver_matches_nodal_analysis() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let size = rng.random_range(1..=5);
        let base = rng.random_range(20.0..25.0);
        let modules: Vec<ModuleElectrical> = (0..size)
            .map(|_| ModuleElectrical {
                voltage: base * (1.0 + rng.random_range(-0.005..=0.005)),
                resistances: InterconnectResistances {
                    r_b: rng.random_range(0.001..=0.1),
                    r_ls: rng.random_range(0.001..=0.1),
                    r_hs: rng.random_range(0.001..=0.1),
                },
            })
            .collect();
        let opener = if rng.random_bool(0.5) {
            ModuleLabel::SeriesPlus
        } else {
            ModuleLabel::SeriesMinus
        };
        let mut labels = vec![opener];
        labels.resize(size, ModuleLabel::Parallel);
        let state = StringState::new(labels).map_err(|e| e.to_string())?;
        let current = rng.random_range(-40.0..40.0);
        let fast = solve_current_distribution(&state, &modules, current).map_err(|e| e.to_string())?;
        let oracle = nodal_oracle(&state, &modules, current).map_err(|e| e.to_string())?;
        let scale = oracle.currents.iter().fold(f64::abs(current), |m, v| m.max(v.abs()));
        for (a, b) in fast.currents.iter().zip(&oracle.currents) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-9 && elapsed < 10.0,
        format!("1000 groups, worst relative gap {worst:.2e}, {elapsed:.2} s"),
    )
}

fn matched_scenarios() -> Vec<ScenarioConfig> {
    let base = ScenarioConfig {
        duration: 0.3,
        ..Default::default()
    };
    vec![
        base.clone(),
        base.with_scheduler(SchedulerKind::Reference),
        ScenarioConfig {
            load: LoadModel::Resistive { resistance: 6.0 },
            jitter: 0.03,
            seed: 9,
            ..base.clone()
        },
        ScenarioConfig {
            modules: 4,
            modulation_index: 0.3,
            ..base.with_scheduler(SchedulerKind::Reference)
        },
    ]
}

fn group_conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ticks = 0;
    for cfg in matched_scenarios() {
        let (trace, _) = run_scenario(&cfg).map_err(|e| e.to_string())?;
        let space = enumerate_string_states(cfg.modules, None).map_err(|e| e.to_string())?;
        for k in 0..trace.len() {
            let state = space.get(trace.state[k] as usize);
            let phase = trace.phase_current[k];
            for g in state.groups() {
                let sum: f64 = trace.currents_at(k)[g.members()].iter().sum();
                worst = worst.max((sum - f64::from(g.polarity) * phase).abs() / phase.abs().max(1.0));
            }
        }
        ticks += trace.len();
    }
    check(worst <= 1e-12, format!("{ticks} ticks, worst group imbalance {worst:.2e}"))
}

fn sigma_delta_tracking() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut m = 0.2;
    while m <= 0.951 {
        let cfg = ScenarioConfig {
            modulation_index: m,
            duration: 0.2,
            ..Default::default()
        };
        let (trace, summary) = run_scenario(&cfg).map_err(|e| e.to_string())?;
        let per_period = (cfg.tick_rate / cfg.phase_freq).round() as usize;
        let errors: Vec<f64> = (0..trace.len())
            .map(|k| f64::from(trace.level[k]) * summary.level_voltage - trace.v_star[k])
            .collect();
        for period in errors.chunks(per_period) {
            let mean = period.iter().sum::<f64>() / period.len() as f64;
            worst = worst.max(mean.abs() / summary.level_voltage);
        }
        m += 0.05;
    }
    check(
        worst < 1.0,
        format!("m 0.20..0.95, worst per-period mean error {worst:.2e} level voltages"),
    )
}

fn reference_signature() -> Outcome {
    let start = Instant::now();
    let cfg = ScenarioConfig::default().with_scheduler(SchedulerKind::Reference);
    let (trace, _) = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let current = trace.module_current(0);
    let full = psd(&current, trace.tick_rate, Window::Hann, 1).map_err(|e| e.to_string())?;
    let pulsation = peak_prominence_db(&full, 2.0 * cfg.phase_freq, 2.0, 3.0);
    let spacing = 0.5 / cfg.meas_period;
    let teeth = comb_teeth(&current, trace.tick_rate, spacing, 2.0 * cfg.phase_freq).map_err(|e| e.to_string())?;
    let wanted = [spacing, 3.0 * spacing, 5.0 * spacing];
    let comb: Vec<(f64, f64)> = teeth
        .iter()
        .filter(|t| wanted.iter().any(|w| (w - t.frequency).abs() < 1e-9))
        .map(|t| (t.frequency, t.prominence_db))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = pulsation >= COMB_THRESHOLD_DB
        && comb.len() == 3
        && comb.iter().all(|&(_, db)| db >= COMB_THRESHOLD_DB)
        && elapsed < 30.0;
    let teeth_text: Vec<String> = comb.iter().map(|(f, db)| format!("{f} Hz {db:.1} dB")).collect();
    check(
        ok,
        format!(
            "module 0: 100 Hz {pulsation:.1} dB; comb {}; {elapsed:.2} s",
            teeth_text.join(", ")
        ),
    )
}

fn sub100_energy(trace: &Trace, phase_freq: f64) -> Result<f64, String> {
    let ex = [Exclusion::new(0.0, 0), Exclusion::new(2.0 * phase_freq, 2)];
    let mut total = 0.0;
    for k in 0..trace.modules {
        let p = psd(&trace.module_current(k), trace.tick_rate, Window::Hann, ANALYSIS_SEGMENTS)
            .map_err(|e| e.to_string())?;
        total += band_energy(&p, 0.0, 2.0 * phase_freq, &ex).map_err(|e| e.to_string())?;
    }
    Ok(total)
}

fn ripple_suppression() -> Outcome {
    let proposed = ScenarioConfig::default();
    let reference = proposed.with_scheduler(SchedulerKind::Reference);
    let (tp, _) = run_scenario(&proposed).map_err(|e| e.to_string())?;
    let (tr, _) = run_scenario(&reference).map_err(|e| e.to_string())?;
    let ep = sub100_energy(&tp, proposed.phase_freq)?;
    let er = sub100_energy(&tr, reference.phase_freq)?;
    let ratio = ep / er;
    check(
        ratio <= 0.1,
        format!("sub-100 Hz energy proposed {ep:.3e} / reference {er:.3e} = {ratio:.3}"),
    )
}

fn loss_trend() -> Outcome {
    let indices: Vec<f64> = (0..14).map(|k| ((0.3 + 0.05 * k as f64) * 100.0).round() / 100.0).collect();
    let table = sweep_modulation_index(&ScenarioConfig::default(), &indices, LossModel::Randles)
        .map_err(|e| e.to_string())?;
    let mut all_lower = true;
    let mut parts = Vec::new();
    for &m in &indices {
        let r = table.row(m, SchedulerKind::Reference).ok_or("missing row")?;
        let p = table.row(m, SchedulerKind::Proposed).ok_or("missing row")?;
        all_lower &= p.total_loss < r.total_loss;
        parts.push(format!("{m}:{:+.0}%", 100.0 * improvement(r.total_loss, p.total_loss)));
    }
    let at = |m: f64| {
        let r = table.row(m, SchedulerKind::Reference).map(|r| r.total_loss);
        let p = table.row(m, SchedulerKind::Proposed).map(|r| r.total_loss);
        r.zip(p).map(|(r, p)| improvement(r, p))
    };
    let (hi, mid) = (at(0.95).ok_or("missing 0.95")?, at(0.6).ok_or("missing 0.6")?);
    check(
        all_lower && hi < mid,
        format!("improvement {} (0.95: {hi:.3} < 0.6: {mid:.3})", parts.join(" ")),
    )
}

fn impedance_shape() -> Outcome {
    let p = RandlesParams::default();
    let grid = |lo: f64, hi: f64, per_decade: usize| -> Vec<f64> {
        let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
        (0..=n).map(|k| lo * 10f64.powf(k as f64 / per_decade as f64)).collect()
    };
    let z = |f: f64| randles_impedance(&p, f).map_err(|e| e.to_string());
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for f in grid(1e-3, 1e6, 40) {
        let m = z(f)?.norm();
        monotone &= m <= prev;
        prev = m;
    }
    let plateau = (z(1e6)?.norm() - p.r_el).abs() / p.r_el;
    let corner = p.double_layer_corner();
    let pts: Vec<(f64, f64)> = grid(corner, 10.0 * corner, 20)
        .into_iter()
        .map(|f| z(f).map(|v| (f.ln(), (v - p.r_el).norm().ln())))
        .collect::<Result<_, _>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    check(
        monotone && plateau < 0.01 && (-1.0..=-0.5).contains(&slope),
        format!(
            "monotone {monotone}, plateau off by {:.3}%, slope {slope:.3} over {corner:.1}..{:.1} Hz",
            100.0 * plateau,
            10.0 * corner
        ),
    )
}

fn ladder_agreement() -> Outcome {
    let p = RandlesParams::default();
    let fs = 200_000.0;
    let mut worst: f64 = 0.0;
    let mut worst_f = 0.0;
    for f in [10.0f64, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0] {
        let per_period = (fs / f).round() as usize;
        let periods = ((0.02 * f) as usize).max(1);
        let current: Vec<f64> = (0..per_period * periods)
            .map(|k| 5.0 * (2.0 * PI * f * k as f64 / fs).cos())
            .collect();
        let spectral = loss_frequency_domain(&current, fs, &p).map_err(|e| e.to_string())?;
        let ladder = rc_ladder_oracle(&current, &p, fs, 64).map_err(|e| e.to_string())?;
        let err = (spectral - ladder).abs() / ladder;
        if err > worst {
            worst = err;
            worst_f = f;
        }
    }
    check(
        worst < 0.05,
        format!("9 tones 10 Hz..5 kHz, worst gap {:.2}% at {worst_f} Hz", 100.0 * worst),
    )
}

fn protocol_emulation() -> Outcome {
    let cfg = ScenarioConfig::default();
    let first = emulate_loss_protocol(&cfg, 30.0, 15.0).map_err(|e| e.to_string())?;
    let second = emulate_loss_protocol(&cfg, 30.0, 15.0).map_err(|e| e.to_string())?;
    let err = first.relative_error();
    check(
        err.abs() < 0.1 && first == second,
        format!(
            "estimate {:.4} W vs dissipated {:.4} W ({:+.2}%), repeat identical: {}",
            first.estimate,
            first.ground_truth,
            100.0 * err,
            first == second
        ),
    )
}

fn determinism() -> Outcome {
    let mut files = 0;
    for cfg in matched_scenarios() {
        let bytes = || -> Result<Vec<u8>, String> {
            let (trace, _) = run_scenario(&cfg).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            write_trace_binary(&mut buf, &trace).map_err(|e| e.to_string())?;
            Ok(buf)
        };
        if bytes()? != bytes()? {
            return Err(format!("{} run differs", cfg.scheduler.as_str()));
        }
        files += 1;
    }
    check(true, format!("{files} scenario pairs byte-identical"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("solver vs nodal oracle", solver_matches_nodal_analysis),
        ("group current conservation", group_conservation),
        ("sigma-delta tracking", sigma_delta_tracking),
        ("reference spectrum signature", reference_signature),
        ("ripple suppression", ripple_suppression),
        ("loss trend over modulation index", loss_trend),
        ("impedance model shape", impedance_shape),
        ("spectral loss vs RC ladder", ladder_agreement),
        ("loss protocol emulation", protocol_emulation),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", k + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1} s]", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
