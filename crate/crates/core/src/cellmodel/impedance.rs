use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{invalid, Result};

/// Anything that maps a frequency to a complex impedance.
pub trait ImpedanceModel {
    fn impedance(&self, frequency: f64) -> Result<Complex64>;
}

/// Randles cell: electrolyte resistance in series with the double-layer
/// capacitance, which parallels charge transfer plus Warburg diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RandlesParams {
    /// Electrolyte/separator resistance (ohm).
    pub r_el: f64,
    /// Charge-transfer resistance (ohm).
    pub r_ct: f64,
    /// Double-layer capacitance (F).
    pub c_dl: f64,
    /// Warburg coefficient (ohm s^-1/2).
    pub sigma_w: f64,
}

impl Default for RandlesParams {
    /// Placeholder values, not cell data.
    fn default() -> Self {
        RandlesParams {
            r_el: 0.012,
            r_ct: 0.010,
            c_dl: 1.5,
            sigma_w: 0.005,
        }
    }
}

impl RandlesParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_el", self.r_el),
            ("r_ct", self.r_ct),
            ("c_dl", self.c_dl),
            ("sigma_w", self.sigma_w),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be strictly positive"));
            }
        }
        Ok(())
    }

    /// Corner where the double layer starts to shunt charge transfer.
    pub fn double_layer_corner(&self) -> f64 {
        1.0 / (2.0 * PI * self.r_ct * self.c_dl)
    }

    pub fn warburg(&self, frequency: f64) -> Complex64 {
        Complex64::new(1.0, -1.0) * (self.sigma_w / libm::sqrt(2.0 * PI * frequency))
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(invalid("frequency", alloc::format!("{f} is not positive")));
    }
    Ok(())
}

pub fn randles_impedance(params: &RandlesParams, frequency: f64) -> Result<Complex64> {
    check_frequency(frequency)?;
    let faradaic = params.warburg(frequency) + params.r_ct;
    let capacitive = Complex64::new(0.0, -1.0 / (2.0 * PI * frequency * params.c_dl));
    Ok(faradaic * capacitive / (faradaic + capacitive) + params.r_el)
}

impl ImpedanceModel for RandlesParams {
    fn impedance(&self, frequency: f64) -> Result<Complex64> {
        randles_impedance(self, frequency)
    }
}

/// First-order high-pass blend between a low- and a high-frequency plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ReducedFilterParams {
    pub r_lf: f64,
    pub r_hf: f64,
    /// Cut-off frequency (Hz).
    pub f_c: f64,
}

impl ReducedFilterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_hf > 0.0 && self.r_lf > self.r_hf && self.r_lf.is_finite()) {
            return Err(invalid("r_lf/r_hf", "need r_lf > r_hf > 0"));
        }
        if !(self.f_c > 0.0 && self.f_c.is_finite()) {
            return Err(invalid("f_c", "must be positive"));
        }
        Ok(())
    }

    /// Plateaus `r_el + r_ct` and `r_el`, corner at the double-layer corner.
    pub fn from_randles(p: &RandlesParams) -> Self {
        ReducedFilterParams {
            r_lf: p.r_el + p.r_ct,
            r_hf: p.r_el,
            f_c: p.double_layer_corner(),
        }
    }
}

pub fn reduced_filter_impedance(params: &ReducedFilterParams, frequency: f64) -> Result<Complex64> {
    check_frequency(frequency)?;
    let pole = Complex64::new(1.0, frequency / params.f_c);
    Ok(Complex64::new(params.r_lf - params.r_hf, 0.0) / pole + params.r_hf)
}

impl ImpedanceModel for ReducedFilterParams {
    fn impedance(&self, frequency: f64) -> Result<Complex64> {
        reduced_filter_impedance(self, frequency)
    }
}
