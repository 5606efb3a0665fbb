//! Check records shared by the verification routines and the CLI.

use serde::{Deserialize, Serialize};

/// Which side of the tolerance a passing deviation lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass iff `deviation < tolerance`.
    Upper,
    /// Pass iff `deviation > tolerance`.
    Lower,
}

/// Outcome of one numerical identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// How the deviation was measured, e.g. `max_interior` or `l2_state`.
    pub norm_type: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl CheckRecord {
    pub fn upper(name: impl Into<String>, norm_type: &str, deviation: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            norm_type: norm_type.to_string(),
            deviation,
            tolerance,
            bound: Bound::Upper,
            // NaN deviations fail.
            pass: deviation < tolerance,
        }
    }

    pub fn lower(name: impl Into<String>, norm_type: &str, deviation: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            norm_type: norm_type.to_string(),
            deviation,
            tolerance,
            bound: Bound::Lower,
            pass: deviation > tolerance,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, norm_type: &str, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            norm_type: norm_type.to_string(),
            deviation: f64::NAN,
            tolerance,
            bound: Bound::Upper,
            pass: false,
        }
    }
}

pub fn all_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.pass)
}

/// Largest deviation among records whose name starts with `prefix`.
pub fn worst(records: &[CheckRecord], prefix: &str) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.name.starts_with(prefix))
        .map(|r| r.deviation)
        .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!CheckRecord::upper("x", "max_interior", f64::NAN, 1.0).pass);
        assert!(!CheckRecord::lower("x", "max_abs", f64::NAN, 1.0).pass);
    }

    #[test]
    fn serializes_snake_case() {
        let r = CheckRecord::upper("comm", "max_interior", 1e-12, 1e-6);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["norm_type"], "max_interior");
        assert_eq!(v["bound"], "upper");
        assert_eq!(v["pass"], true);
    }
}
