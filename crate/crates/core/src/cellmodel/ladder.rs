//! Time-domain cross-check of the spectral loss: the Randles cell with its
//! Warburg element replaced by a chain of parallel RC cells, integrated
//! explicitly at the trace rate.

use core::f64::consts::{PI, SQRT_2};

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::impedance::RandlesParams;
use crate::{invalid, Error, Result};

/// Band (Hz) over which the ladder reproduces the Warburg element.
pub const LADDER_FIT_BAND: (f64, f64) = (0.1, 1.0e4);

/// Series chain of parallel RC cells approximating `sigma (1 - j) / sqrt(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarburgLadder {
    /// Relaxation times below the grid, lumped into a plain resistor.
    pub series_resistance: f64,
    pub resistances: Vec<f64>,
    pub time_constants: Vec<f64>,
}

impl WarburgLadder {
    /// Places `n_branches` time constants log-uniformly from `1/(2 pi f_hi)`
    /// to a thousand times `1/(2 pi f_lo)` and weights them by a log-grid quadrature
    /// of the Warburg relaxation-time density `sigma sqrt(2) / pi * tau^-1/2`.
    /// The density below the grid integrates to a series resistor.
    pub fn fit(sigma_w: f64, n_branches: usize) -> Result<Self> {
        if n_branches < 3 {
            return Err(invalid("n_branches", "need at least 3"));
        }
        let (f_lo, f_hi) = LADDER_FIT_BAND;
        let tau_min = 1.0 / (2.0 * PI * f_hi);
        let tau_max = 1000.0 / (2.0 * PI * f_lo);
        let step = libm::log(tau_max / tau_min) / (n_branches - 1) as f64;
        let density = sigma_w * SQRT_2 / PI;
        let mut resistances = Vec::with_capacity(n_branches);
        let mut time_constants = Vec::with_capacity(n_branches);
        for k in 0..n_branches {
            let tau = tau_min * libm::exp(step * k as f64);
            // End points carry half a cell of the grid.
            let weight = if k == 0 || k == n_branches - 1 { 0.5 } else { 1.0 };
            resistances.push(density * libm::sqrt(tau) * step * weight);
            time_constants.push(tau);
        }
        Ok(WarburgLadder {
            series_resistance: 2.0 * density * libm::sqrt(tau_min),
            resistances,
            time_constants,
        })
    }

    pub fn impedance(&self, frequency: f64) -> Complex64 {
        let w = 2.0 * PI * frequency;
        self.resistances
            .iter()
            .zip(&self.time_constants)
            .map(|(&r, &tau)| Complex64::new(r, 0.0) / Complex64::new(1.0, w * tau))
            .sum::<Complex64>()
            + self.series_resistance
    }

    pub fn dc_resistance(&self) -> f64 {
        self.series_resistance + self.resistances.iter().sum::<f64>()
    }
}

struct LadderCircuit<'a> {
    p: &'a RandlesParams,
    ladder: &'a WarburgLadder,
    caps: Vec<f64>,
    /// Charge transfer plus the lumped fast part of the ladder.
    r_series: f64,
}

impl LadderCircuit<'_> {
    /// State: `[v_dl, v_1 .. v_n]`.
    fn derivative(&self, x: &[f64], current: f64, dx: &mut [f64]) {
        let v_dl = x[0];
        let cells: f64 = x[1..].iter().sum();
        let faradaic = (v_dl - cells) / self.r_series;
        dx[0] = (current - faradaic) / self.p.c_dl;
        for k in 0..self.caps.len() {
            dx[k + 1] = (faradaic - x[k + 1] / self.ladder.resistances[k]) / self.caps[k];
        }
    }

    fn power(&self, x: &[f64], current: f64) -> f64 {
        let cells: f64 = x[1..].iter().sum();
        let faradaic = (x[0] - cells) / self.r_series;
        let ladder: f64 = x[1..]
            .iter()
            .zip(&self.ladder.resistances)
            .map(|(v, r)| v * v / r)
            .sum();
        self.p.r_el * current * current + self.r_series * faradaic * faradaic + ladder
    }

    /// Gershgorin bound on the fastest decay rate of the state equations.
    fn fastest_rate(&self) -> f64 {
        let n = self.caps.len() as f64;
        let mut rate = (1.0 + n) / (self.r_series * self.p.c_dl);
        for (c, r) in self.caps.iter().zip(&self.ladder.resistances) {
            rate = rate.max((1.0 / r + (n + 1.0) / self.r_series) / c);
        }
        rate
    }
}

/// Mean power dissipated in `R_el`, `R_ct` and the ladder resistors when the
/// sampled current flows through the cell.
///
/// The circuit starts at the DC operating point of the trace mean, runs the
/// trace once to settle, and averages over a second pass. RK4 with the input
/// linearly interpolated between samples.
pub fn rc_ladder_oracle(
    current: &[f64],
    params: &RandlesParams,
    sample_rate: f64,
    n_branches: usize,
) -> Result<f64> {
    if current.is_empty() {
        return Err(Error::Empty("current trace"));
    }
    if !(sample_rate > 0.0) {
        return Err(invalid("sample_rate", "must be positive"));
    }
    params.validate()?;
    let ladder = WarburgLadder::fit(params.sigma_w, n_branches)?;
    let caps: Vec<f64> = ladder
        .resistances
        .iter()
        .zip(&ladder.time_constants)
        .map(|(r, tau)| tau / r)
        .collect();
    let circuit = LadderCircuit {
        p: params,
        ladder: &ladder,
        caps,
        r_series: params.r_ct + ladder.series_resistance,
    };
    let dt = 1.0 / sample_rate;
    let rate = circuit.fastest_rate();
    if dt * rate > 2.5 {
        return Err(Error::UnstableStep { dt, tau: 1.0 / rate });
    }

    let mean = current.iter().sum::<f64>() / current.len() as f64;
    let dim = n_branches + 1;
    let mut x = vec![0.0; dim];
    x[0] = mean * (params.r_ct + ladder.dc_resistance());
    for k in 0..n_branches {
        x[k + 1] = mean * ladder.resistances[k];
    }

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    let len = current.len();
    let mut energy = 0.0;
    for pass in 0..2 {
        for s in 0..len {
            let i0 = current[s];
            // Periodic continuation between the last and first sample.
            let i1 = current[(s + 1) % len];
            let im = 0.5 * (i0 + i1);
            if pass == 1 {
                energy += circuit.power(&x, i0);
            }
            circuit.derivative(&x, i0, &mut k1);
            for d in 0..dim {
                tmp[d] = x[d] + 0.5 * dt * k1[d];
            }
            circuit.derivative(&tmp, im, &mut k2);
            for d in 0..dim {
                tmp[d] = x[d] + 0.5 * dt * k2[d];
            }
            circuit.derivative(&tmp, im, &mut k3);
            for d in 0..dim {
                tmp[d] = x[d] + dt * k3[d];
            }
            circuit.derivative(&tmp, i1, &mut k4);
            for d in 0..dim {
                x[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
            }
        }
    }
    Ok(energy / len as f64)
}
