use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{LoadModel, ScenarioConfig, SchedulerKind};
use super::event::{inject_latency, EventQueue, SimEvent};
use super::trace::{LogEvent, LogEventKind, TickRecord, Trace, TraceSink};
use crate::cellmodel::{update_soc, ModuleBattery};
use crate::control::{
    sigma_delta_step, uniform_levels, DemandTable, ProposedScheduler, ReferenceScheduler,
    SigmaDeltaState,
};
use crate::topology::{
    enumerate_string_states, operating_point, solve_current_distribution, ModuleElectrical,
    StateSpace,
};
use crate::Result;

/// Counters and end state of one run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSummary {
    pub ticks: u64,
    /// Nominal voltage step between adjacent output levels (V).
    pub level_voltage: f64,
    /// Module parameters after jitter, with the initial charge.
    pub initial_batteries: Vec<ModuleBattery>,
    pub final_batteries: Vec<ModuleBattery>,
    pub clamp_events: u64,
    pub relaxations: u64,
    pub saturations: u64,
    pub table_updates: u64,
    pub observer_rebuilds: u64,
    pub soc_clamps: u64,
}

enum Active {
    Proposed(ProposedScheduler),
    Reference(ReferenceScheduler),
}

/// Module parameters with the configured seeded spread applied, as used by
/// [`run_scenario`].
pub fn module_parameters(config: &ScenarioConfig) -> Vec<ModuleBattery> {
    let mut batteries = config.batteries();
    if config.jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let j = config.jitter;
        for b in &mut batteries {
            let r = 1.0 + rng.random_range(-j..=j);
            let v = 1.0 + rng.random_range(-j..=j);
            b.randles.r_el *= r;
            b.randles.r_ct *= r;
            b.resistances.r_b *= r;
            for anchor in &mut b.ocv.anchors {
                anchor.1 *= v;
            }
        }
    }
    batteries
}

fn electrical(batteries: &[ModuleBattery], out: &mut Vec<ModuleElectrical>) -> Result<()> {
    out.clear();
    for b in batteries {
        out.push(b.electrical()?);
    }
    Ok(())
}

/// Runs a scenario and keeps the whole trace in memory.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(Trace, RunSummary)> {
    let mut trace = Trace::new(config.modules, config.tick_rate);
    let summary = run_scenario_with(config, &mut trace)?;
    Ok((trace, summary))
}

/// Runs a scenario, streaming every tick and log event into `sink`.
pub fn run_scenario_with<S: TraceSink>(config: &ScenarioConfig, mut sink: S) -> Result<RunSummary> {
    config.validate()?;
    let n = config.modules;
    let dt = config.dt();
    let space: StateSpace = enumerate_string_states(n, None)?;
    let initial = module_parameters(config);
    let mut batteries = initial.clone();
    let mut live = Vec::with_capacity(n);
    electrical(&batteries, &mut live)?;

    let level_voltage = live.iter().map(|m| m.voltage).sum::<f64>() / n as f64;
    let levels = uniform_levels(n, level_voltage);
    let amplitude = config.modulation_index * n as f64 * level_voltage;
    let reference_current = config.observer_current.unwrap_or(match config.load {
        LoadModel::Current { amplitude } if amplitude > 0.0 => amplitude,
        LoadModel::Resistive { resistance } if amplitude > 0.0 => amplitude / resistance,
        _ => 1.0,
    });

    let demands = DemandTable::equal(n);
    let mut active = match config.scheduler {
        SchedulerKind::Proposed => Active::Proposed(ProposedScheduler::new(
            &space,
            &live,
            reference_current,
            config.clamp,
            config.exec_delay,
            demands.clone(),
        )?),
        SchedulerKind::Reference => Active::Reference(ReferenceScheduler::new(
            &space,
            &live,
            reference_current,
            config.clamp,
            demands.clone(),
        )?),
    };

    let period_ticks = libm::round(config.meas_period * config.tick_rate).max(1.0) as u64;
    let ticks = config.tick_count();
    let mut queue = EventQueue::new();
    let mut window = vec![0.0; n];
    if matches!(active, Active::Reference(_)) {
        queue.schedule(period_ticks, SimEvent::MeasurementTaken);
    }

    let mut summary = RunSummary {
        ticks,
        level_voltage,
        initial_batteries: initial,
        final_batteries: Vec::new(),
        clamp_events: 0,
        relaxations: 0,
        saturations: 0,
        table_updates: 0,
        observer_rebuilds: 0,
        soc_clamps: 0,
    };
    let mut sd = SigmaDeltaState {
        integrator: 0.0,
        last_index: n,
    };
    let mut prev = space.bypass_index();
    let mut voltages = vec![0.0; n];

    for tick in 0..ticks {
        while let Some((_, event)) = queue.pop_due(tick) {
            match event {
                SimEvent::MeasurementTaken => {
                    let arrival = SimEvent::MeasurementArrival {
                        taken_at: tick,
                        increments: core::mem::replace(&mut window, vec![0.0; n]),
                        voltages: live.iter().map(|m| m.voltage).collect(),
                    };
                    queue.schedule(inject_latency(tick, config.meas_latency, config.tick_rate), arrival);
                    queue.schedule(tick + period_ticks, SimEvent::MeasurementTaken);
                }
                SimEvent::MeasurementArrival {
                    taken_at,
                    increments,
                    voltages: seen,
                } => {
                    if let Active::Reference(r) = &mut active {
                        let snapshot: Vec<ModuleElectrical> = live
                            .iter()
                            .zip(&seen)
                            .map(|(m, &v)| ModuleElectrical { voltage: v, ..*m })
                            .collect();
                        let before = r.modulator().clamp_events;
                        r.step(&space, &increments, &snapshot, dt, tick)?;
                        let clamps = r.modulator().clamp_events - before;
                        if clamps > 0 {
                            summary.clamp_events += clamps;
                            sink.event(&LogEvent { tick, kind: LogEventKind::Clamp { count: clamps } });
                        }
                        summary.table_updates += 1;
                        sink.event(&LogEvent { tick, kind: LogEventKind::TableUpdate { taken_at } });
                    }
                }
            }
        }

        let time = tick as f64 * dt;
        let v_star = amplitude * libm::sin(2.0 * PI * config.phase_freq * time);
        let step = sigma_delta_step(&mut sd, v_star, &levels, dt)?;
        let level = step.index as i32 - n as i32;
        if step.saturated {
            summary.saturations += 1;
            sink.event(&LogEvent { tick, kind: LogEventKind::Saturation });
        }

        let selection = match &mut active {
            Active::Proposed(p) => {
                p.advance(tick);
                p.select(&space, level, prev, config.max_toggles)?
            }
            Active::Reference(r) => r.select(&space, level, prev, config.max_toggles)?,
        };
        if selection.relaxed {
            summary.relaxations += 1;
            sink.event(&LogEvent {
                tick,
                kind: LogEventKind::Relaxation {
                    from: prev as u32,
                    to: selection.index as u32,
                },
            });
        }
        let state = space.get(selection.index);

        let phase_current = match config.load {
            LoadModel::Current { amplitude } => {
                amplitude * libm::sin(2.0 * PI * config.phase_freq * time)
            }
            LoadModel::Resistive { resistance } => {
                let open = operating_point(state, &live, 0.0)?.output_voltage;
                let loaded = operating_point(state, &live, 1.0)?.output_voltage;
                open / (resistance + (open - loaded))
            }
        };
        let op = operating_point(state, &live, phase_current)?;
        for (v, m) in voltages.iter_mut().zip(&live) {
            *v = m.voltage;
        }

        if let Active::Reference(_) = active {
            let measured = solve_current_distribution(state, &live, reference_current)?;
            for ((w, js), i) in window.iter_mut().zip(demands.get(level)).zip(&measured.currents) {
                *w += (js - i / reference_current) * dt;
            }
        }
        if let Active::Proposed(p) = &mut active {
            let before = p.modulator().clamp_events;
            if p.observe(&space, selection.index, &live, dt, tick)? {
                summary.observer_rebuilds += 1;
                sink.event(&LogEvent { tick, kind: LogEventKind::ObserverRebuild });
            }
            let clamps = p.modulator().clamp_events - before;
            if clamps > 0 {
                summary.clamp_events += clamps;
                sink.event(&LogEvent { tick, kind: LogEventKind::Clamp { count: clamps } });
            }
        }

        sink.record(&TickRecord {
            tick,
            time,
            v_star,
            level,
            state: selection.index as u32,
            phase_current,
            output_voltage: op.output_voltage,
            currents: &op.currents,
            dissipation: &op.dissipation,
            voltages: &voltages,
        });

        for (module, (b, &i)) in batteries.iter_mut().zip(&op.currents).enumerate() {
            let (next, clamped) = update_soc(b, i, dt)?;
            *b = next;
            if clamped {
                summary.soc_clamps += 1;
                sink.event(&LogEvent { tick, kind: LogEventKind::SocClamp { module } });
            }
        }
        electrical(&batteries, &mut live)?;
        prev = selection.index;
    }

    summary.final_batteries = batteries;
    Ok(summary)
}
