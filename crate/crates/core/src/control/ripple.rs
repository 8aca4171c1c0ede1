use alloc::vec;
use alloc::vec::Vec;

use crate::{invalid, Result};

/// Per-module cumulated share error `e_i` (share-seconds) with a symmetric
/// anti-windup bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RippleModulatorState {
    pub accumulated: Vec<f64>,
    pub clamp: f64,
    pub clamp_events: u64,
}

impl RippleModulatorState {
    pub fn new(n: usize, clamp: f64) -> Result<Self> {
        if !(clamp > 0.0 && clamp.is_finite()) {
            return Err(invalid("clamp", "must be positive"));
        }
        Ok(RippleModulatorState {
            accumulated: vec![0.0; n],
            clamp,
            clamp_events: 0,
        })
    }

    /// `e_i += (demand_i - realized_i) * dt`, clamped to `[-clamp, clamp]`.
    pub fn integrate(&mut self, demand: &[f64], realized: &[f64], dt: f64) {
        for ((e, d), r) in self.accumulated.iter_mut().zip(demand).zip(realized) {
            *e += (d - r) * dt;
        }
        self.apply_clamp();
    }

    /// Adds pre-integrated increments (share-seconds), e.g. from a
    /// measurement window.
    pub fn accumulate(&mut self, increments: &[f64]) {
        for (e, inc) in self.accumulated.iter_mut().zip(increments) {
            *e += inc;
        }
        self.apply_clamp();
    }

    fn apply_clamp(&mut self) {
        for e in &mut self.accumulated {
            if e.abs() > self.clamp {
                *e = e.clamp(-self.clamp, self.clamp);
                self.clamp_events += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matched_distribution_leaves_state() {
        let mut s = RippleModulatorState::new(3, 0.005).unwrap();
        s.integrate(&[0.6; 3], &[0.6; 3], 50e-6);
        assert_eq!(s.accumulated, vec![0.0; 3]);
    }

    #[test]
    fn constant_deficit_accumulates() {
        let mut s = RippleModulatorState::new(1, 0.005).unwrap();
        for _ in 0..10 {
            s.integrate(&[0.6], &[0.5], 50e-6);
        }
        assert!((s.accumulated[0] - 5e-5).abs() < 1e-18);
        assert_eq!(s.clamp_events, 0);
    }

    #[test]
    fn clamps_and_counts() {
        let mut s = RippleModulatorState::new(2, 0.005).unwrap();
        for _ in 0..2000 {
            s.integrate(&[1.0, 0.0], &[0.0, 1.0], 50e-6);
        }
        assert_eq!(s.accumulated, vec![0.005, -0.005]);
        assert!(s.clamp_events > 0);
        assert!(RippleModulatorState::new(1, 0.0).is_err());
    }
}
