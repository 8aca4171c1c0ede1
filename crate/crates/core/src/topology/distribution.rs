use alloc::vec;
use alloc::vec::Vec;

use super::state::StringState;
use crate::linalg;
use crate::{invalid, Error, Result};

/// Lumped resistances of one module as seen by the current-distribution solve.
///
/// `r_ls` and `r_hs` are the low- and high-side paths from this module to its
/// successor; the last module of a parallel group does not use them.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct InterconnectResistances {
    pub r_b: f64,
    pub r_ls: f64,
    pub r_hs: f64,
}

impl Default for InterconnectResistances {
    fn default() -> Self {
        InterconnectResistances {
            r_b: 0.022,
            r_ls: 0.002,
            r_hs: 0.002,
        }
    }
}

impl InterconnectResistances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r_b", self.r_b), ("r_ls", self.r_ls), ("r_hs", self.r_hs)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, alloc::format!("{v} is not strictly positive")));
            }
        }
        Ok(())
    }
}

/// Source voltage and resistances of one module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleElectrical {
    pub voltage: f64,
    pub resistances: InterconnectResistances,
}

/// Linear system `a * i_b = b` for one parallel group, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSystem {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl DistributionSystem {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.a[row * self.n + col]
    }
}

/// Assembles the loop equations of a parallel group carrying `group_current`.
///
/// Row `j` (for the pair `j`, `j+1`) is the loop through both batteries and
/// the two interconnects between them:
///
/// ```text
/// R_L[j] * (i_1 + .. + i_{j-1}) + R_D[j] * i_j + R_U[j+1] * i_{j+1} = B[j]
/// R_D[j] = -(R_B[j] + R_LS[j] + R_HS[j])
/// R_L[j] = -(R_HS[j] + R_LS[j])
/// R_U[j] = R_B[j]
/// B[j]   = V_B[j+1] - V_B[j] - R_LS[j] * I
/// ```
///
/// and the last row sums the battery currents to the group current. The
/// lower-triangle coefficient uses link `j` because the cumulated current of
/// modules `1..j` flows through exactly that link; with uniform links this is
/// identical to writing `R_L[j-1]`.
pub fn build_distribution_system(
    members: &[ModuleElectrical],
    group_current: f64,
) -> DistributionSystem {
    let n = members.len();
    assert!(n >= 1, "empty parallel group");
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for j in 0..n - 1 {
        let r = members[j].resistances;
        let lower = -(r.r_hs + r.r_ls);
        for k in 0..j {
            a[j * n + k] = lower;
        }
        a[j * n + j] = -(r.r_b + r.r_ls + r.r_hs);
        a[j * n + j + 1] = members[j + 1].resistances.r_b;
        b[j] = members[j + 1].voltage - members[j].voltage - r.r_ls * group_current;
    }
    for k in 0..n {
        a[(n - 1) * n + k] = 1.0;
    }
    b[n - 1] = group_current;
    DistributionSystem { n, a, b }
}

/// Battery currents (discharge positive) of one group carrying `group_current`.
pub fn solve_group(members: &[ModuleElectrical], group_current: f64) -> Result<Vec<f64>> {
    if members.len() == 1 {
        return Ok(vec![group_current]);
    }
    let DistributionSystem { n, mut a, mut b } = build_distribution_system(members, group_current);
    linalg::solve_in_place(n, &mut a, &mut b)?;
    Ok(b)
}

/// Battery currents of every module for one phase current.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDistribution {
    pub currents: Vec<f64>,
    pub phase_current: f64,
}

impl CurrentDistribution {
    /// Share `i_b / I_L` of module `i`; not meaningful for zero phase current.
    pub fn share(&self, i: usize) -> f64 {
        self.currents[i] / self.phase_current
    }

    pub fn shares(&self) -> Vec<f64> {
        (0..self.currents.len()).map(|i| self.share(i)).collect()
    }
}

fn check_modules(state: &StringState, modules: &[ModuleElectrical]) -> Result<()> {
    if state.module_count() != modules.len() {
        return Err(Error::LengthMismatch {
            left: state.module_count(),
            right: modules.len(),
        });
    }
    Ok(())
}

/// Exact battery currents for `state` under phase current `phase_current`.
///
/// Bypassed modules carry nothing; a negative group is solved with the
/// phase current negated.
pub fn solve_current_distribution(
    state: &StringState,
    modules: &[ModuleElectrical],
    phase_current: f64,
) -> Result<CurrentDistribution> {
    check_modules(state, modules)?;
    let mut currents = vec![0.0; modules.len()];
    for g in state.groups().iter().filter(|g| g.polarity != 0) {
        let group_current = f64::from(g.polarity) * phase_current;
        let solved = solve_group(&modules[g.members()], group_current)?;
        currents[g.members()].copy_from_slice(&solved);
    }
    Ok(CurrentDistribution {
        currents,
        phase_current,
    })
}

/// Currents, per-module dissipation and string output voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub currents: Vec<f64>,
    /// Battery resistance loss of module `j` plus the loss in the links from
    /// `j` to its successor.
    pub dissipation: Vec<f64>,
    pub output_voltage: f64,
}

/// Full electrical operating point, used for ground truth and bookkeeping.
pub fn operating_point(
    state: &StringState,
    modules: &[ModuleElectrical],
    phase_current: f64,
) -> Result<OperatingPoint> {
    let dist = solve_current_distribution(state, modules, phase_current)?;
    let mut dissipation = vec![0.0; modules.len()];
    let mut output_voltage = 0.0;
    for g in state.groups().iter().filter(|g| g.polarity != 0) {
        let group_current = f64::from(g.polarity) * phase_current;
        let range = g.members();
        let last = range.end - 1;
        let mut cumulated = 0.0;
        let mut low_side_drop = 0.0;
        for j in range {
            let i = dist.currents[j];
            let r = modules[j].resistances;
            cumulated += i;
            dissipation[j] = r.r_b * i * i;
            if j != last {
                let low = group_current - cumulated;
                dissipation[j] += r.r_hs * cumulated * cumulated + r.r_ls * low * low;
                low_side_drop += r.r_ls * low;
            }
        }
        let forward = modules[last].voltage
            - modules[last].resistances.r_b * dist.currents[last]
            - low_side_drop;
        output_voltage += f64::from(g.polarity) * forward;
    }
    Ok(OperatingPoint {
        currents: dist.currents,
        dissipation,
        output_voltage,
    })
}
