//! Module and string switching states, the state space, and the current
//! distribution among paralleled modules.

mod distribution;
mod label;
pub mod nodal;
mod share_table;
mod state;

pub use distribution::{
    build_distribution_system, operating_point, solve_current_distribution, solve_group,
    CurrentDistribution, DistributionSystem, InterconnectResistances, ModuleElectrical,
    OperatingPoint,
};
pub use label::{ModuleLabel, GATE_WORD_BITS};
pub use share_table::{ShareTable, VOLTAGE_REBUILD_THRESHOLD};
pub use state::{count_toggles, enumerate_string_states, ParallelGroup, StateSpace, StringState, MAX_MODULES};
