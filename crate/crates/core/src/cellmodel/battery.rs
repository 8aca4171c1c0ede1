use super::impedance::RandlesParams;
use super::ocv::OcvCurve;
use crate::topology::{InterconnectResistances, ModuleElectrical};
use crate::{invalid, Result};

/// 6.2 Ah in coulomb.
pub const CELL_CAPACITY_COULOMB: f64 = 6.2 * 3600.0;

/// Electrical state of one module's battery.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ModuleBattery {
    /// Charge capacity in coulomb.
    pub capacity: f64,
    pub soc: f64,
    pub ocv: OcvCurve,
    pub randles: RandlesParams,
    /// Lumped resistances for the topology solve; `r_b` defaults to the
    /// low-frequency value `r_el + r_ct` of the Randles model.
    pub resistances: InterconnectResistances,
}

impl Default for ModuleBattery {
    fn default() -> Self {
        let randles = RandlesParams::default();
        ModuleBattery {
            capacity: CELL_CAPACITY_COULOMB,
            soc: 0.5,
            ocv: OcvCurve::default(),
            randles,
            resistances: InterconnectResistances {
                r_b: randles.r_el + randles.r_ct,
                r_ls: 0.002,
                r_hs: 0.002,
            },
        }
    }
}

impl ModuleBattery {
    pub fn validate(&self) -> Result<()> {
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return Err(invalid("capacity", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.soc) {
            return Err(invalid("soc", "outside [0, 1]"));
        }
        self.ocv.validate()?;
        self.randles.validate()?;
        self.resistances.validate()
    }

    pub fn open_circuit_voltage(&self) -> Result<f64> {
        self.ocv.voltage(self.soc)
    }

    /// Voltage read after a rest. The model has no relaxation dynamics, so
    /// this is the open-circuit voltage at the current charge.
    pub fn relaxed_voltage(&self) -> Result<f64> {
        self.open_circuit_voltage()
    }

    pub fn electrical(&self) -> Result<ModuleElectrical> {
        Ok(ModuleElectrical {
            voltage: self.open_circuit_voltage()?,
            resistances: self.resistances,
        })
    }
}

/// Coulomb counting with discharge positive. Returns the updated battery and
/// whether the charge had to be clamped to `[0, 1]`.
pub fn update_soc(battery: &ModuleBattery, current: f64, dt: f64) -> Result<(ModuleBattery, bool)> {
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    let raw = battery.soc - current * dt / battery.capacity;
    let soc = raw.clamp(0.0, 1.0);
    Ok((ModuleBattery { soc, ..*battery }, soc != raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn idle_keeps_charge() {
        let b = ModuleBattery::default();
        let (next, clamped) = update_soc(&b, 0.0, 1.0).unwrap();
        assert_eq!(next.soc, b.soc);
        assert!(!clamped);
    }

    #[test]
    fn one_hour_at_rated_current_empties() {
        let b = ModuleBattery { soc: 1.0, ..Default::default() };
        let (next, clamped) = update_soc(&b, 6.2, 3600.0).unwrap();
        assert_relative_eq!(next.soc, 0.0, epsilon = 1e-12);
        assert!(!clamped);
    }

    #[test]
    fn charging_half_hour() {
        let b = ModuleBattery { soc: 0.25, ..Default::default() };
        let (next, _) = update_soc(&b, -6.2, 1800.0).unwrap();
        assert_relative_eq!(next.soc, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn clamps_and_reports() {
        let b = ModuleBattery { soc: 0.01, ..Default::default() };
        let (next, clamped) = update_soc(&b, 100.0, 3600.0).unwrap();
        assert_eq!(next.soc, 0.0);
        assert!(clamped);
        assert!(update_soc(&b, 1.0, 0.0).is_err());
    }

    #[test]
    fn lumped_resistance_is_low_frequency_randles() {
        let b = ModuleBattery::default();
        assert_relative_eq!(b.resistances.r_b, 0.022);
        b.validate().unwrap();
    }
}
