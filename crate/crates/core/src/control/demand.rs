use alloc::vec;
use alloc::vec::Vec;

use crate::{invalid, Error, Result};

/// Demanded current share per module for one output level.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandDistribution {
    pub shares: Vec<f64>,
    /// Optional per-module discharge-rate reference (A) it was derived from.
    pub rate_reference: Option<Vec<f64>>,
}

/// Equal split of `level` over `n` modules.
pub fn demand_distribution(level: i32, n: usize) -> Result<DemandDistribution> {
    if level.unsigned_abs() as usize > n {
        return Err(Error::LevelOutOfRange { level, n });
    }
    Ok(DemandDistribution {
        shares: vec![f64::from(level) / n as f64; n],
        rate_reference: None,
    })
}

impl DemandDistribution {
    /// Split proportional to a per-module rate reference, renormalized so the
    /// shares sum to `level`. This is the hook for balancing policies.
    pub fn weighted(level: i32, rate_reference: &[f64]) -> Result<Self> {
        let n = rate_reference.len();
        if level.unsigned_abs() as usize > n {
            return Err(Error::LevelOutOfRange { level, n });
        }
        let total: f64 = rate_reference.iter().sum();
        if !(total > 0.0) || rate_reference.iter().any(|r| !(*r >= 0.0)) {
            return Err(invalid("rate_reference", "needs non-negative entries with a positive sum"));
        }
        Ok(DemandDistribution {
            shares: rate_reference
                .iter()
                .map(|r| f64::from(level) * r / total)
                .collect(),
            rate_reference: Some(rate_reference.to_vec()),
        })
    }
}

/// Demand for every level `-n..=n`, computed once per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandTable {
    n: usize,
    shares: Vec<f64>,
}

impl DemandTable {
    pub fn equal(n: usize) -> Self {
        let mut shares = Vec::with_capacity((2 * n + 1) * n);
        for level in -(n as i32)..=n as i32 {
            shares.extend(core::iter::repeat_n(f64::from(level) / n as f64, n));
        }
        DemandTable { n, shares }
    }

    pub fn weighted(rate_reference: &[f64]) -> Result<Self> {
        let n = rate_reference.len();
        let mut shares = Vec::with_capacity((2 * n + 1) * n);
        for level in -(n as i32)..=n as i32 {
            shares.extend(DemandDistribution::weighted(level, rate_reference)?.shares);
        }
        Ok(DemandTable { n, shares })
    }

    pub fn get(&self, level: i32) -> &[f64] {
        let row = (level + self.n as i32) as usize;
        &self.shares[row * self.n..(row + 1) * self.n]
    }
}
