//! Severity classes and the weighted average method (WAM) baseline.
//!
//! Each lung side gets a 1..=4 score from its infected fraction, the right
//! side weighted 3 and the left 2; slice scores are averaged over the scan
//! and rounded to a class.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::infection::SliceResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeverityClass {
    Mild = 1,
    Moderate = 2,
    Severe = 3,
    Critical = 4,
}

impl SeverityClass {
    pub const ALL: [SeverityClass; 4] = [Self::Mild, Self::Moderate, Self::Severe, Self::Critical];

    /// 1-based class value.
    pub fn value(self) -> u8 {
        self as u8
    }

    /// 0-based position, handy for indexing score arrays.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_value(v: u8) -> Result<Self> {
        match v {
            1..=4 => Ok(Self::ALL[v as usize - 1]),
            _ => Err(Error::OutOfRange(format!("severity class {v} not in 1..=4"))),
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::OutOfRange(format!("class index {i} not in 0..4")))
    }

    /// Involvement band `[lo, hi)` of the class; the Critical band is closed at 1.
    pub fn band(self) -> (f64, f64) {
        match self {
            Self::Mild => (0.0, 0.25),
            Self::Moderate => (0.25, 0.50),
            Self::Severe => (0.50, 0.75),
            Self::Critical => (0.75, 1.0),
        }
    }

    /// Class whose band contains `fraction`.
    pub fn from_involvement(fraction: f64) -> Result<Self> {
        Self::from_value(bin_score(fraction)?)
    }

    pub fn contains(self, fraction: f64) -> bool {
        let (lo, hi) = self.band();
        if self == Self::Critical {
            (lo..=hi).contains(&fraction)
        } else {
            (lo..hi).contains(&fraction)
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Self::Mild => "Mi",
            Self::Moderate => "Mo",
            Self::Severe => "Se",
            Self::Critical => "Cr",
        }
    }
}

impl fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Mild => "Mild",
            Self::Moderate => "Moderate",
            Self::Severe => "Severe",
            Self::Critical => "Critical",
        };
        f.pad(name)
    }
}

impl FromStr for SeverityClass {
    type Err = Error;

    /// Accepts the class value (`1`..`4`) or its name, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(v) = t.parse::<u8>() {
            return Self::from_value(v);
        }
        Self::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(t) || c.short_name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::parse("severity class", format!("unrecognized value {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WamWeights {
    pub right: f64,
    pub left: f64,
}

impl Default for WamWeights {
    fn default() -> Self {
        Self { right: 3.0, left: 2.0 }
    }
}

impl WamWeights {
    pub fn validate(&self) -> Result<()> {
        if self.right > 0.0 && self.left > 0.0 && self.right.is_finite() && self.left.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("WAM weights must be positive, got {self:?}")))
        }
    }
}

/// 1 below 0.25, 2 below 0.5, 3 below 0.75, otherwise 4.
pub fn bin_score(rate: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::OutOfRange(format!("rate {rate} not in [0, 1]")));
    }
    Ok(if rate < 0.25 {
        1
    } else if rate < 0.5 {
        2
    } else if rate < 0.75 {
        3
    } else {
        4
    })
}

pub fn slice_wam(left_rate: f64, right_rate: f64, w: &WamWeights) -> Result<f64> {
    let (l, r) = (bin_score(left_rate)? as f64, bin_score(right_rate)? as f64);
    Ok((w.right * r + w.left * l) / (w.right + w.left))
}

/// Round half-up and clamp to a class.
pub fn score_to_class(mean_score: f64) -> SeverityClass {
    let v = (mean_score + 0.5).floor().clamp(1.0, 4.0);
    SeverityClass::ALL[v as usize - 1]
}

/// Mean slice score over `(left, right)` rate pairs, and its class.
pub fn wam_from_rates(rates: &[(f64, f64)], w: &WamWeights) -> Result<(f64, SeverityClass)> {
    if rates.is_empty() {
        return Err(Error::EmptyScan);
    }
    let mut sum = 0.0;
    for &(l, r) in rates {
        sum += slice_wam(l, r, w)?;
    }
    let mean = sum / rates.len() as f64;
    Ok((mean, score_to_class(mean)))
}

/// WAM over the retained slices of a scan.
pub fn scan_wam(results: &[SliceResult], w: &WamWeights) -> Result<(f64, SeverityClass)> {
    let rates: Vec<(f64, f64)> = results
        .iter()
        .filter(|r| r.retained)
        .map(|r| (r.left_rate, r.right_rate))
        .collect();
    wam_from_rates(&rates, w)
}
