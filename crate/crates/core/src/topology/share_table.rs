use alloc::vec::Vec;

use super::distribution::{solve_current_distribution, ModuleElectrical};
use super::state::StateSpace;
use crate::{invalid, Result};

/// Module voltage drift (V) since the last build that forces a rebuild.
pub const VOLTAGE_REBUILD_THRESHOLD: f64 = 0.05;

/// Pre-solved current shares of every state in a [`StateSpace`].
///
/// Resistances are treated as constant and voltages as frozen at build time.
/// Shares are evaluated at `reference_current`, so the circulating part driven
/// by voltage differences is scaled against that magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareTable {
    n: usize,
    reference_current: f64,
    voltages: Vec<f64>,
    currents: Vec<f64>,
    shares: Vec<f64>,
    builds: u64,
}

impl ShareTable {
    pub fn build(space: &StateSpace, modules: &[ModuleElectrical], reference_current: f64) -> Result<Self> {
        if !(reference_current.is_finite() && reference_current != 0.0) {
            return Err(invalid("reference_current", "must be finite and non-zero"));
        }
        let mut table = ShareTable {
            n: space.module_count(),
            reference_current,
            voltages: Vec::new(),
            currents: Vec::with_capacity(space.len() * space.module_count()),
            shares: Vec::with_capacity(space.len() * space.module_count()),
            builds: 0,
        };
        table.rebuild(space, modules)?;
        Ok(table)
    }

    /// Re-solves every state with the given module parameters.
    pub fn rebuild(&mut self, space: &StateSpace, modules: &[ModuleElectrical]) -> Result<()> {
        self.shares.clear();
        self.currents.clear();
        for state in space.iter() {
            let d = solve_current_distribution(state, modules, self.reference_current)?;
            self.shares.extend(d.currents.iter().map(|i| i / self.reference_current));
            self.currents.extend_from_slice(&d.currents);
        }
        self.voltages = modules.iter().map(|m| m.voltage).collect();
        self.builds += 1;
        Ok(())
    }

    /// True if any module voltage moved more than the rebuild threshold.
    pub fn is_stale(&self, modules: &[ModuleElectrical]) -> bool {
        self.voltages
            .iter()
            .zip(modules)
            .any(|(v, m)| (v - m.voltage).abs() > VOLTAGE_REBUILD_THRESHOLD)
    }

    /// Rebuilds only when stale; returns whether a rebuild happened.
    pub fn refresh(&mut self, space: &StateSpace, modules: &[ModuleElectrical]) -> Result<bool> {
        if self.is_stale(modules) {
            self.rebuild(space, modules)?;
            return Ok(true);
        }
        Ok(false)
    }

    pub fn shares(&self, index: usize) -> &[f64] {
        &self.shares[index * self.n..(index + 1) * self.n]
    }

    /// Battery currents of state `index` at the reference current.
    pub fn currents(&self, index: usize) -> &[f64] {
        &self.currents[index * self.n..(index + 1) * self.n]
    }

    /// Flat `states x modules` share matrix.
    pub fn as_flat(&self) -> &[f64] {
        &self.shares
    }

    pub fn state_count(&self) -> usize {
        self.shares.len() / self.n.max(1)
    }

    pub fn module_count(&self) -> usize {
        self.n
    }

    pub fn reference_current(&self) -> f64 {
        self.reference_current
    }

    pub fn build_voltages(&self) -> &[f64] {
        &self.voltages
    }

    /// Number of builds so far, including the initial one.
    pub fn builds(&self) -> u64 {
        self.builds
    }
}
