use alloc::vec::Vec;

use super::demand::DemandTable;
use super::ripple::RippleModulatorState;
use crate::topology::{ShareTable, StateSpace};
use crate::{Error, Result};

/// Least-squares cost of every feasible state, stamped with the tick at which
/// it was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCostTable {
    pub costs: Vec<f64>,
    pub generation: u64,
}

impl StateCostTable {
    /// A table where every state costs zero, so selection falls back to the
    /// tie-break alone.
    pub fn uniform(states: usize) -> Self {
        StateCostTable {
            costs: alloc::vec![0.0; states],
            generation: 0,
        }
    }

    /// Recomputes all costs in place.
    ///
    /// `SC(s) = Σ_i (e_i - J_i(s)·dt + J*_i·dt)²`, with `J*` taken at the
    /// level of `s` and `J(s)` from the share table.
    pub fn evaluate(
        &mut self,
        space: &StateSpace,
        modulator: &RippleModulatorState,
        shares: &ShareTable,
        demands: &DemandTable,
        dt: f64,
        generation: u64,
    ) -> Result<()> {
        CostEvaluator::default().evaluate(self, space, modulator, shares, demands, dt, generation)
    }
}

/// Evaluates cost tables, caching the per-state increments `(J* - J)·dt`
/// until the share table is rebuilt or `dt` changes.
#[derive(Debug, Clone, Default)]
pub struct CostEvaluator {
    key: Option<(u64, u64)>,
    increments: Vec<f64>,
}

impl CostEvaluator {
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        &mut self,
        table: &mut StateCostTable,
        space: &StateSpace,
        modulator: &RippleModulatorState,
        shares: &ShareTable,
        demands: &DemandTable,
        dt: f64,
        generation: u64,
    ) -> Result<()> {
        let n = space.module_count();
        if shares.state_count() != space.len() || shares.module_count() != n {
            return Err(Error::LengthMismatch {
                left: space.len(),
                right: shares.state_count(),
            });
        }
        let key = (shares.builds(), dt.to_bits());
        if self.key != Some(key) || self.increments.len() != space.len() * n {
            self.increments.clear();
            for (&level, j) in space.levels().iter().zip(shares.as_flat().chunks_exact(n)) {
                self.increments
                    .extend(demands.get(level).iter().zip(j).map(|(js, j)| (js - j) * dt));
            }
            self.key = Some(key);
        }
        let e = &modulator.accumulated[..n];
        table.costs.clear();
        table.costs.extend(self.increments.chunks_exact(n).map(|d| {
            let mut cost = 0.0;
            for (e, d) in e.iter().zip(d) {
                let r = e + d;
                cost += r * r;
            }
            cost
        }));
        table.generation = generation;
        Ok(())
    }
}

pub fn evaluate_state_costs(
    space: &StateSpace,
    modulator: &RippleModulatorState,
    shares: &ShareTable,
    demands: &DemandTable,
    dt: f64,
    generation: u64,
) -> Result<StateCostTable> {
    let mut table = StateCostTable {
        costs: Vec::with_capacity(space.len()),
        generation,
    };
    table.evaluate(space, modulator, shares, demands, dt, generation)?;
    Ok(table)
}
