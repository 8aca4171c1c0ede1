//! First-principles nodal analysis of the whole string, used to verify the
//! loop-equation solver.
//!
//! Every battery is a voltage source behind its internal resistance between a
//! low node `L_j` and a high node `H_j`. Inside a parallel group, `L_j`-`L_{j+1}`
//! and `H_j`-`H_{j+1}` are joined by the module's low- and high-side paths.
//! Groups are chained in series: a positive group is entered at `L_1` and left
//! at `H_n`, a negative group the other way round, a bypassed group is a
//! short. The load is a current source returning the phase current from the
//! string output to its input, which is the reference node.

use alloc::vec;
use alloc::vec::Vec;

use super::distribution::{CurrentDistribution, ModuleElectrical};
use super::state::StringState;
use crate::{Error, Result};

/// Battery currents computed by dense nodal analysis of the full network.
pub fn nodal_oracle(
    state: &StringState,
    modules: &[ModuleElectrical],
    phase_current: f64,
) -> Result<CurrentDistribution> {
    if state.module_count() != modules.len() {
        return Err(Error::LengthMismatch {
            left: state.module_count(),
            right: modules.len(),
        });
    }
    let n_mod = modules.len();
    // Node numbering: 0 is the reference (string input).
    let mut next_node = 1_usize;
    let mut high = vec![usize::MAX; n_mod];
    let mut low = vec![usize::MAX; n_mod];
    let mut cursor = 0_usize;
    for g in state.groups().iter().filter(|g| g.polarity != 0) {
        let first = g.start;
        let last = g.start + g.len - 1;
        let mut fresh = || {
            next_node += 1;
            next_node - 1
        };
        for j in g.members() {
            high[j] = if g.polarity < 0 && j == last { cursor } else { fresh() };
            low[j] = if g.polarity > 0 && j == first { cursor } else { fresh() };
        }
        cursor = if g.polarity > 0 { high[last] } else { low[first] };
    }

    let mut currents = vec![0.0; n_mod];
    if state.is_all_bypass() {
        return Ok(CurrentDistribution {
            currents,
            phase_current,
        });
    }

    let dim = next_node;
    let mut g = vec![0.0; dim * dim];
    let mut s = vec![0.0; dim];
    let stamp = |g: &mut [f64], a: usize, b: usize, cond: f64| {
        g[a * dim + a] += cond;
        g[b * dim + b] += cond;
        g[a * dim + b] -= cond;
        g[b * dim + a] -= cond;
    };
    for grp in state.groups().iter().filter(|g| g.polarity != 0) {
        let last = grp.start + grp.len - 1;
        for j in grp.members() {
            let r = modules[j].resistances;
            // Norton form of source + internal resistance.
            stamp(&mut g, high[j], low[j], 1.0 / r.r_b);
            let norton = modules[j].voltage / r.r_b;
            s[high[j]] += norton;
            s[low[j]] -= norton;
            if j != last {
                stamp(&mut g, high[j], high[j + 1], 1.0 / r.r_hs);
                stamp(&mut g, low[j], low[j + 1], 1.0 / r.r_ls);
            }
        }
    }
    // Load current leaves the string output and re-enters at the reference.
    s[cursor] -= phase_current;
    s[0] += phase_current;

    // Ground node 0 and solve the reduced system.
    let m = dim - 1;
    let mut a = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for r in 0..m {
        for c in 0..m {
            a[r * m + c] = g[(r + 1) * dim + c + 1];
        }
        rhs[r] = s[r + 1];
    }
    let v_reduced = gauss_jordan_full_pivot(m, a, rhs)?;
    let mut v = vec![0.0; dim];
    v[1..].copy_from_slice(&v_reduced);

    for grp in state.groups().iter().filter(|g| g.polarity != 0) {
        for j in grp.members() {
            let r_b = modules[j].resistances.r_b;
            currents[j] = (modules[j].voltage - (v[high[j]] - v[low[j]])) / r_b;
        }
    }
    Ok(CurrentDistribution {
        currents,
        phase_current,
    })
}

/// Gauss-Jordan elimination with complete pivoting.
fn gauss_jordan_full_pivot(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let mut col_perm: Vec<usize> = (0..n).collect();
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for k in 0..n {
        let mut best = (k, k, 0.0_f64);
        for r in k..n {
            for c in k..n {
                let v = a[r * n + c].abs();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= scale * 1e-14 {
            return Err(Error::Singular(n));
        }
        let (pr, pc, _) = best;
        if pr != k {
            for c in 0..n {
                a.swap(k * n + c, pr * n + c);
            }
            b.swap(k, pr);
        }
        if pc != k {
            for r in 0..n {
                a.swap(r * n + k, r * n + pc);
            }
            col_perm.swap(k, pc);
        }
        let piv = a[k * n + k];
        for c in 0..n {
            a[k * n + c] /= piv;
        }
        b[k] /= piv;
        for r in 0..n {
            if r == k {
                continue;
            }
            let f = a[r * n + k];
            if f != 0.0 {
                for c in 0..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
                b[r] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for (k, &orig) in col_perm.iter().enumerate() {
        x[orig] = b[k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::InterconnectResistances;
    use approx::assert_relative_eq;

    fn uniform(n: usize, v: f64) -> Vec<ModuleElectrical> {
        vec![
            ModuleElectrical {
                voltage: v,
                resistances: InterconnectResistances {
                    r_b: 0.02,
                    r_ls: 0.002,
                    r_hs: 0.002,
                },
            };
            n
        ]
    }

    #[test]
    fn symmetric_group_splits_in_thirds() {
        let state: StringState = "S+ P P".parse().unwrap();
        let d = nodal_oracle(&state, &uniform(3, 22.5), 9.0).unwrap();
        // Interconnects make the split uneven unless they are negligible.
        let sum: f64 = d.currents.iter().sum();
        assert_relative_eq!(sum, 9.0, max_relative = 1e-12);
        let mut tiny = uniform(3, 22.5);
        for m in &mut tiny {
            m.resistances.r_ls = 1e-8;
            m.resistances.r_hs = 1e-8;
        }
        let d = nodal_oracle(&state, &tiny, 9.0).unwrap();
        for i in d.currents {
            assert_relative_eq!(i, 3.0, max_relative = 1e-5);
        }
    }

    #[test]
    fn zero_current_equal_voltage_is_quiet() {
        let state: StringState = "S+ P S- P P".parse().unwrap();
        let d = nodal_oracle(&state, &uniform(5, 22.5), 0.0).unwrap();
        for i in d.currents {
            assert!(i.abs() < 1e-9, "{i}");
        }
    }

    #[test]
    fn all_bypass() {
        let state: StringState = "B+ B-".parse().unwrap();
        let d = nodal_oracle(&state, &uniform(2, 22.5), 3.0).unwrap();
        assert_eq!(d.currents, vec![0.0, 0.0]);
    }
}
