use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::Error;

/// Number of gate signals per module in the switch-word table.
pub const GATE_WORD_BITS: u32 = 4;

/// Connection of one module relative to its predecessor in the string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModuleLabel {
    /// Paralleled with the preceding group.
    Parallel,
    SeriesPlus,
    BypassPlus,
    SeriesMinus,
    BypassMinus,
}

impl ModuleLabel {
    pub const ALL: [ModuleLabel; 5] = [
        ModuleLabel::Parallel,
        ModuleLabel::SeriesPlus,
        ModuleLabel::BypassPlus,
        ModuleLabel::SeriesMinus,
        ModuleLabel::BypassMinus,
    ];

    /// Gate-signal word `(g1 g2 g3 g4)`, `g1` in the most significant bit.
    ///
    /// | label | word   |
    /// |-------|--------|
    /// | S+    | `1001` |
    /// | B+    | `1010` |
    /// | S-    | `0110` |
    /// | B-    | `0101` |
    /// | P     | `1100` |
    ///
    /// S+ to B+ commutes one half-bridge (two gate toggles); P sits two
    /// toggles away from every other label. This is the only table used for
    /// toggle counting.
    pub const fn gate_word(self) -> u8 {
        match self {
            ModuleLabel::SeriesPlus => 0b1001,
            ModuleLabel::BypassPlus => 0b1010,
            ModuleLabel::SeriesMinus => 0b0110,
            ModuleLabel::BypassMinus => 0b0101,
            ModuleLabel::Parallel => 0b1100,
        }
    }

    /// Polarity of a group this label opens; `None` for `P`.
    pub const fn polarity(self) -> Option<i8> {
        match self {
            ModuleLabel::SeriesPlus => Some(1),
            ModuleLabel::SeriesMinus => Some(-1),
            ModuleLabel::BypassPlus | ModuleLabel::BypassMinus => Some(0),
            ModuleLabel::Parallel => None,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            ModuleLabel::Parallel => "P",
            ModuleLabel::SeriesPlus => "S+",
            ModuleLabel::BypassPlus => "B+",
            ModuleLabel::SeriesMinus => "S-",
            ModuleLabel::BypassMinus => "B-",
        }
    }
}

impl fmt::Display for ModuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModuleLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // Accept the typographic minus as well.
        match s.trim() {
            "P" => Ok(ModuleLabel::Parallel),
            "S+" => Ok(ModuleLabel::SeriesPlus),
            "B+" => Ok(ModuleLabel::BypassPlus),
            "S-" | "S\u{2212}" => Ok(ModuleLabel::SeriesMinus),
            "B-" | "B\u{2212}" => Ok(ModuleLabel::BypassMinus),
            other => Err(Error::InvalidLabel(other.to_string())),
        }
    }
}
