use crate::{invalid, Result};

/// Piecewise-linear open-circuit voltage of a module over state of charge.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct OcvCurve {
    /// `(soc, volts)` anchors with strictly increasing soc from 0 to 1.
    pub anchors: [(f64, f64); 5],
}

impl Default for OcvCurve {
    /// Flat-middle six-cell LiFePO4 shape, 22.5 V at half charge.
    fn default() -> Self {
        OcvCurve {
            anchors: [(0.0, 19.5), (0.1, 21.9), (0.5, 22.5), (0.9, 23.1), (1.0, 24.6)],
        }
    }
}

impl OcvCurve {
    pub fn validate(&self) -> Result<()> {
        let a = &self.anchors;
        if a[0].0 != 0.0 || a[a.len() - 1].0 != 1.0 {
            return Err(invalid("ocv.anchors", "must start at soc 0 and end at soc 1"));
        }
        for w in a.windows(2) {
            if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
                return Err(invalid("ocv.anchors", "soc must increase and voltage must not decrease"));
            }
        }
        Ok(())
    }

    pub fn voltage(&self, soc: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&soc) {
            return Err(invalid("soc", alloc::format!("{soc} outside [0, 1]")));
        }
        let a = &self.anchors;
        let seg = a
            .windows(2)
            .find(|w| soc <= w[1].0)
            .unwrap_or(&a[a.len() - 2..]);
        let (s0, v0) = seg[0];
        let (s1, v1) = seg[1];
        Ok(v0 + (v1 - v0) * (soc - s0) / (s1 - s0))
    }

    pub fn min_voltage(&self) -> f64 {
        self.anchors[0].1
    }

    pub fn max_voltage(&self) -> f64 {
        self.anchors[self.anchors.len() - 1].1
    }
}
