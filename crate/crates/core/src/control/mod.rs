//! Level modulation and state scheduling.
//!
//! Both schedulers share the same fast path: the sigma-delta modulator picks
//! an output level each tick and [`fast_select`] picks the cheapest state at
//! that level from a [`StateCostTable`]. They differ in how that table is kept
//! up to date:
//!
//! * [`ProposedScheduler`] integrates the deviation between demanded and
//!   observed current shares every tick, using the observer look-up table
//!   instead of measurements, and refreshes the cost table every tick.
//! * [`ReferenceScheduler`] integrates delayed measurements delivered at a
//!   slow period and holds its cost table between deliveries.

mod cost;
mod demand;
mod proposed;
mod reference;
mod ripple;
mod select;
mod sigma_delta;

pub use cost::{evaluate_state_costs, CostEvaluator, StateCostTable};
pub use demand::{demand_distribution, DemandDistribution, DemandTable};
pub use proposed::{observer_estimate, ProposedScheduler};
pub use reference::ReferenceScheduler;
pub use ripple::RippleModulatorState;
pub use select::{fast_select, Selection};
pub use sigma_delta::{sigma_delta_step, uniform_levels, SigmaDeltaState, SigmaDeltaStep};
