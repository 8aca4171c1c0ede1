use alloc::vec::Vec;

use crate::{invalid, Result};

/// Integrator of the volt-second error between demand and realized level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SigmaDeltaState {
    pub integrator: f64,
    /// Index into the level table chosen last tick.
    pub last_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaDeltaStep {
    pub index: usize,
    /// Demand was outside the level range and got clipped.
    pub saturated: bool,
}

/// Voltages `k * step` for `k = -n..=n`; index `i` is level `i - n`.
pub fn uniform_levels(n: usize, step: f64) -> Vec<f64> {
    (-(n as i32)..=n as i32).map(|k| f64::from(k) * step).collect()
}

/// One modulator tick: pick the level that brings the integrator closest to
/// zero, then integrate the realized error.
///
/// Ties go to the candidate closest to the previous level, then the lower
/// one. Demand beyond the outermost levels is clipped before integration so
/// the integrator can't wind up.
pub fn sigma_delta_step(
    state: &mut SigmaDeltaState,
    v_star: f64,
    levels: &[f64],
    dt: f64,
) -> Result<SigmaDeltaStep> {
    if levels.is_empty() {
        return Err(invalid("levels", "empty level table"));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    let lo = levels[0];
    let hi = levels[levels.len() - 1];
    let saturated = v_star < lo || v_star > hi;
    let demand = v_star.clamp(lo, hi);

    let mut best = 0usize;
    let mut best_err = f64::INFINITY;
    for (i, &v) in levels.iter().enumerate() {
        let err = (state.integrator + (demand - v) * dt).abs();
        let closer = i.abs_diff(state.last_index) < best.abs_diff(state.last_index);
        if err < best_err || (err == best_err && closer) {
            best = i;
            best_err = err;
        }
    }
    state.integrator += (demand - levels[best]) * dt;
    state.last_index = best;
    Ok(SigmaDeltaStep {
        index: best,
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    const DT: f64 = 50e-6;

    #[test]
    fn zero_demand_stays_at_zero() {
        let levels = uniform_levels(5, 22.5);
        let mut s = SigmaDeltaState { integrator: 0.0, last_index: 5 };
        for _ in 0..1000 {
            let out = sigma_delta_step(&mut s, 0.0, &levels, DT).unwrap();
            assert_eq!(out.index, 5);
            assert_eq!(s.integrator, 0.0);
        }
    }

    #[test]
    fn midway_demand_alternates() {
        let levels = uniform_levels(5, 22.5);
        let mut s = SigmaDeltaState { integrator: 0.0, last_index: 5 };
        let mut highs = 0;
        for _ in 0..1000 {
            let out = sigma_delta_step(&mut s, 11.25, &levels, DT).unwrap();
            assert!(out.index == 5 || out.index == 6);
            highs += usize::from(out.index == 6);
            assert!(s.integrator.abs() <= 22.5 * DT / 2.0 + 1e-15);
        }
        assert_eq!(highs, 500);
    }

    #[test]
    fn saturation_is_flagged_without_windup() {
        let levels = uniform_levels(2, 10.0);
        let mut s = SigmaDeltaState { integrator: 0.0, last_index: 2 };
        for _ in 0..100 {
            let out = sigma_delta_step(&mut s, 35.0, &levels, DT).unwrap();
            assert!(out.saturated);
            assert_eq!(out.index, 4);
        }
        assert_eq!(s.integrator, 0.0);
        assert!(sigma_delta_step(&mut s, 0.0, &[], DT).is_err());
    }

    #[test]
    fn tracks_a_sine_within_one_level() {
        let n = 5;
        let step = 22.5;
        let levels = uniform_levels(n, step);
        let mut s = SigmaDeltaState { integrator: 0.0, last_index: n };
        let ticks_per_period = 400;
        let mut worst = 0.0_f64;
        for period in 0..10 {
            let mut abs_err = 0.0;
            for k in 0..ticks_per_period {
                let t = (period * ticks_per_period + k) as f64 * DT;
                let v = 0.8 * n as f64 * step * (2.0 * PI * 50.0 * t).sin();
                let out = sigma_delta_step(&mut s, v, &levels, DT).unwrap();
                abs_err += (v - levels[out.index]).abs();
            }
            worst = worst.max(abs_err / ticks_per_period as f64);
        }
        assert!(worst < step, "mean |error| {worst}");
    }
}
