//! Scheduling and electrical models for a single-phase reconfigurable battery
//! string built from series/parallel-capable cascaded bridge modules.
//!
//! The crate is `no_std` (with `alloc`) so the same control code can run on an
//! embedded target and inside the desk simulator. It contains:
//!
//! * [`topology`]: module labels, string states, and the exact current
//!   distribution among paralleled modules.
//! * [`cellmodel`]: open-circuit voltage, coulomb counting, Randles impedance
//!   and spectral loss weighting.
//! * [`control`]: the sigma-delta level modulator, the high-bandwidth
//!   ripple-modulator/observer/optimizer pipeline and the slow-feedback
//!   reference scheduler.
//! * [`sim`]: the deterministic discrete-event kernel that ties it together.
//!
//! IO, spectra and the command line live in the `ripplemod` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cellmodel;
pub mod control;
mod error;
pub mod linalg;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};
pub(crate) use error::invalid;
