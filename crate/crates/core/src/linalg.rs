//! Small dense linear algebra for the per-group current solves.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Solves `a * x = b` for a row-major `n x n` matrix by LU decomposition with
/// partial pivoting. `a` and `b` are consumed as scratch space.
pub fn solve_in_place(n: usize, a: &mut [f64], b: &mut [f64]) -> Result<()> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Singular(n));
    }
    let tiny = scale * f64::EPSILON * n as f64;

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= tiny {
            return Err(Error::Singular(n));
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            b.swap(col, pivot_row);
        }
        let diag = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            a[r * n + col] = 0.0;
            for c in col + 1..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }

    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r * n + c] * b[c];
        }
        b[r] = acc / a[r * n + r];
    }
    Ok(())
}

/// Convenience wrapper returning the solution vector.
pub fn solve(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    solve_in_place(n, &mut a, &mut x)?;
    Ok(x)
}
