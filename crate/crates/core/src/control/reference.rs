use super::cost::{CostEvaluator, StateCostTable};
use super::demand::DemandTable;
use super::ripple::RippleModulatorState;
use super::select::{fast_select, Selection};
use crate::topology::{ModuleElectrical, ShareTable, StateSpace};
use crate::Result;

/// Slow-feedback scheduler: the cost table is rebuilt only when a delayed
/// measurement arrives and is held constant in between.
#[derive(Debug, Clone)]
pub struct ReferenceScheduler {
    modulator: RippleModulatorState,
    shares: ShareTable,
    demands: DemandTable,
    table: StateCostTable,
    evaluator: CostEvaluator,
    updates: u64,
}

impl ReferenceScheduler {
    pub fn new(
        space: &StateSpace,
        modules: &[ModuleElectrical],
        reference_current: f64,
        clamp: f64,
        demands: DemandTable,
    ) -> Result<Self> {
        let modulator = RippleModulatorState::new(space.module_count(), clamp)?;
        let shares = ShareTable::build(space, modules, reference_current)?;
        let mut table = StateCostTable::uniform(space.len());
        table.evaluate(space, &modulator, &shares, &demands, 0.0, 0)?;
        Ok(ReferenceScheduler {
            modulator,
            shares,
            demands,
            table,
            evaluator: CostEvaluator::default(),
            updates: 0,
        })
    }

    pub fn modulator(&self) -> &RippleModulatorState {
        &self.modulator
    }

    pub fn table(&self) -> &StateCostTable {
        &self.table
    }

    /// Number of table rebuilds driven by measurements.
    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn select(
        &self,
        space: &StateSpace,
        level: i32,
        prev: usize,
        max_toggles: u32,
    ) -> Result<Selection> {
        fast_select(space, &self.table, level, prev, max_toggles)
    }

    /// Consumes one delivered measurement window and rebuilds the held table.
    ///
    /// `increments` is the measured `Σ (J* - J) dt` per module over the
    /// window; `modules` carries the module voltages as they were when the
    /// window closed.
    pub fn step(
        &mut self,
        space: &StateSpace,
        increments: &[f64],
        modules: &[ModuleElectrical],
        dt: f64,
        generation: u64,
    ) -> Result<&StateCostTable> {
        self.modulator.accumulate(increments);
        self.shares.refresh(space, modules)?;
        self.evaluator.evaluate(
            &mut self.table,
            space,
            &self.modulator,
            &self.shares,
            &self.demands,
            dt,
            generation,
        )?;
        self.updates += 1;
        Ok(&self.table)
    }
}
