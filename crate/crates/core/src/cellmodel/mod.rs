//! Per-module battery model: open-circuit voltage, coulomb counting, small
//! signal impedance and impedance-weighted loss.
//!
//! The Randles defaults are placeholders picked to put the faradaic to
//! dielectric transition at a plausible place, not measured cell data.

mod battery;
mod impedance;
mod ladder;
mod loss;
mod ocv;

pub use battery::{update_soc, ModuleBattery, CELL_CAPACITY_COULOMB};
pub use impedance::{
    randles_impedance, reduced_filter_impedance, ImpedanceModel, RandlesParams, ReducedFilterParams,
};
pub use ladder::{rc_ladder_oracle, WarburgLadder, LADDER_FIT_BAND};
pub use loss::{spectral_loss, SpectralLine};
pub use ocv::OcvCurve;
