use alloc::collections::VecDeque;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::cost::{CostEvaluator, StateCostTable};
use super::demand::DemandTable;
use super::ripple::RippleModulatorState;
use super::select::{fast_select, Selection};
use crate::topology::{CurrentDistribution, ModuleElectrical, ShareTable, StateSpace, StringState};
use crate::{Error, Result};

/// Expected battery currents of `state` from the observer table.
///
/// This is a pure look-up: the currents were solved when the table was built.
pub fn observer_estimate(
    space: &StateSpace,
    table: &ShareTable,
    state: &StringState,
) -> Result<CurrentDistribution> {
    let index = space
        .index_of(state)
        .filter(|&i| i < table.state_count())
        .ok_or_else(|| Error::TableMiss(state.to_string()))?;
    Ok(CurrentDistribution {
        currents: table.currents(index).to_vec(),
        phase_current: table.reference_current(),
    })
}

/// Ripple modulator, observer and optimizer running every tick.
///
/// After each tick the applied state's observed shares are integrated and a
/// fresh cost table is computed. A table finished at tick `k` becomes
/// visible to selection at tick `k + 1 + exec_delay`.
#[derive(Debug, Clone)]
pub struct ProposedScheduler {
    modulator: RippleModulatorState,
    observer: ShareTable,
    demands: DemandTable,
    exec_delay: u64,
    published: StateCostTable,
    pending: VecDeque<(u64, StateCostTable)>,
    spare: Vec<StateCostTable>,
    evaluator: CostEvaluator,
}

impl ProposedScheduler {
    pub fn new(
        space: &StateSpace,
        modules: &[ModuleElectrical],
        reference_current: f64,
        clamp: f64,
        exec_delay: u64,
        demands: DemandTable,
    ) -> Result<Self> {
        let modulator = RippleModulatorState::new(space.module_count(), clamp)?;
        let observer = ShareTable::build(space, modules, reference_current)?;
        let mut published = StateCostTable::uniform(space.len());
        published.evaluate(space, &modulator, &observer, &demands, 0.0, 0)?;
        Ok(ProposedScheduler {
            modulator,
            observer,
            demands,
            exec_delay,
            published,
            pending: VecDeque::new(),
            spare: Vec::new(),
            evaluator: CostEvaluator::default(),
        })
    }

    pub fn modulator(&self) -> &RippleModulatorState {
        &self.modulator
    }

    pub fn observer(&self) -> &ShareTable {
        &self.observer
    }

    pub fn table(&self) -> &StateCostTable {
        &self.published
    }

    /// Makes every table due at or before `tick` visible.
    pub fn advance(&mut self, tick: u64) {
        while self.pending.front().is_some_and(|(due, _)| *due <= tick) {
            let (_, table) = self.pending.pop_front().unwrap();
            let old = core::mem::replace(&mut self.published, table);
            self.spare.push(old);
        }
    }

    pub fn select(
        &self,
        space: &StateSpace,
        level: i32,
        prev: usize,
        max_toggles: u32,
    ) -> Result<Selection> {
        fast_select(space, &self.published, level, prev, max_toggles)
    }

    /// Integrates the observed ripple of the state applied at `tick` and
    /// queues the resulting cost table. Returns whether the observer table
    /// was rebuilt because module voltages drifted.
    pub fn observe(
        &mut self,
        space: &StateSpace,
        applied: usize,
        modules: &[ModuleElectrical],
        dt: f64,
        tick: u64,
    ) -> Result<bool> {
        let rebuilt = self.observer.refresh(space, modules)?;
        let level = space.get(applied).level();
        self.modulator
            .integrate(self.demands.get(level), self.observer.shares(applied), dt);
        let mut table = self
            .spare
            .pop()
            .unwrap_or_else(|| StateCostTable::uniform(space.len()));
        self.evaluator.evaluate(
            &mut table,
            space,
            &self.modulator,
            &self.observer,
            &self.demands,
            dt,
            tick,
        )?;
        self.pending.push_back((tick + 1 + self.exec_delay, table));
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::ModuleBattery;
    use crate::topology::{enumerate_string_states, solve_current_distribution};
    use alloc::vec;

    fn modules(voltages: &[f64]) -> Vec<ModuleElectrical> {
        voltages
            .iter()
            .map(|&v| ModuleElectrical {
                voltage: v,
                ..ModuleBattery::default().electrical().unwrap()
            })
            .collect()
    }

    #[test]
    fn estimate_matches_solver_exactly() {
        let space = enumerate_string_states(3, None).unwrap();
        let m = modules(&[22.4, 22.5, 22.6]);
        let table = ShareTable::build(&space, &m, 10.0).unwrap();
        for state in space.iter() {
            let est = observer_estimate(&space, &table, state).unwrap();
            let exact = solve_current_distribution(state, &m, 10.0).unwrap();
            assert_eq!(est, exact);
        }
        let bypass = space.get(space.bypass_index());
        assert_eq!(observer_estimate(&space, &table, bypass).unwrap().currents, vec![0.0; 3]);
    }

    #[test]
    fn missing_state_is_a_table_miss() {
        let space = enumerate_string_states(3, None).unwrap();
        let table = ShareTable::build(&space, &modules(&[22.5; 3]), 10.0).unwrap();
        let foreign: StringState = "S+ P".parse().unwrap();
        assert!(matches!(
            observer_estimate(&space, &table, &foreign),
            Err(Error::TableMiss(_))
        ));
    }

    #[test]
    fn rebuild_tracks_voltage_change() {
        let space = enumerate_string_states(2, None).unwrap();
        let before = modules(&[22.5, 22.5]);
        let mut table = ShareTable::build(&space, &before, 10.0).unwrap();
        let pair: StringState = "S+ P".parse().unwrap();
        let old = observer_estimate(&space, &table, &pair).unwrap();

        let after = modules(&[22.5, 22.6]);
        assert!(table.refresh(&space, &after).unwrap());
        let new = observer_estimate(&space, &table, &pair).unwrap();
        assert_eq!(new, solve_current_distribution(&pair, &after, 10.0).unwrap());
        assert!(new.currents[1] > old.currents[1]);
        assert!(!table.refresh(&space, &modules(&[22.5, 22.61])).unwrap());
    }

    #[test]
    fn execution_delay_holds_tables_back() {
        let space = enumerate_string_states(2, None).unwrap();
        let m = modules(&[22.5; 2]);
        let mut sched = ProposedScheduler::new(&space, &m, 10.0, 0.005, 3, DemandTable::equal(2)).unwrap();
        let applied = space.index_of(&"S+ B+".parse().unwrap()).unwrap();
        for tick in 0..10u64 {
            sched.advance(tick);
            let g = sched.table().generation;
            if tick < 4 {
                assert_eq!(g, 0);
            } else {
                assert_eq!(g, tick - 4);
            }
            sched.observe(&space, applied, &m, 50e-6, tick).unwrap();
        }
    }

    #[test]
    fn alternates_between_modules_at_partial_level() {
        let space = enumerate_string_states(2, None).unwrap();
        let m = modules(&[22.5; 2]);
        let mut sched = ProposedScheduler::new(&space, &m, 10.0, 0.005, 0, DemandTable::equal(2)).unwrap();
        let mut prev = space.bypass_index();
        let mut counts = [0usize; 2];
        for tick in 0..1000u64 {
            sched.advance(tick);
            let sel = sched.select(&space, 1, prev, 4).unwrap();
            let state = space.get(sel.index);
            let charged = state.groups().iter().find(|g| g.polarity != 0).unwrap();
            if charged.len == 1 {
                counts[charged.start] += 1;
            }
            sched.observe(&space, sel.index, &m, 50e-6, tick).unwrap();
            prev = sel.index;
        }
        let e = &sched.modulator().accumulated;
        assert!(e.iter().all(|x| x.abs() < 1e-4), "{e:?}");
        assert!(counts[0] + counts[1] == 0 || counts[0].abs_diff(counts[1]) <= 1000 / 4);
    }
}
