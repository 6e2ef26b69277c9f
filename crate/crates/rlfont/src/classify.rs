//! Line classification from the top/bottom density percentage.

use std::fmt;
use std::str::FromStr;

/// Class of a text line, deciding which height model sizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineClass {
    AscenderAndDescenderRich,
    AscenderRich,
    UpperCase,
}

impl fmt::Display for LineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineClass::AscenderAndDescenderRich => "ascender_and_descender_rich",
            LineClass::AscenderRich => "ascender_rich",
            LineClass::UpperCase => "upper_case",
        })
    }
}

impl FromStr for LineClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascender_and_descender_rich" => Ok(LineClass::AscenderAndDescenderRich),
            "ascender_rich" => Ok(LineClass::AscenderRich),
            "upper_case" => Ok(LineClass::UpperCase),
            other => Err(format!("unknown line class {other:?}")),
        }
    }
}

/// Band edges in percent. Boundary values belong to the upper band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhdThresholds {
    pub low: f64,
    pub high: f64,
}

impl Default for MhdThresholds {
    fn default() -> Self {
        Self {
            low: 7.0,
            high: 25.0,
        }
    }
}

/// Map a density percentage to its class:
/// below `low` both ascenders and descenders are present, from `low` up to
/// but excluding `high` the line is ascender rich, and from `high` upward
/// it is upper case.
pub fn classify_line(mhd: f64, thresholds: MhdThresholds) -> LineClass {
    if mhd < thresholds.low {
        LineClass::AscenderAndDescenderRich
    } else if mhd < thresholds.high {
        LineClass::AscenderRich
    } else {
        LineClass::UpperCase
    }
}
