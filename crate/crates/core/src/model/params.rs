use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::default_keep;

/// Smallest per-mode cutoff with a usable interior block.
pub const MIN_CUTOFF: usize = 8;

/// Couplings of the shifted oscillator and the per-mode Fock cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Imaginary coordinate shift.
    #[serde(rename = "A")]
    pub a: f64,
    /// Imaginary momentum shift.
    #[serde(rename = "B")]
    pub b: f64,
    pub cutoff: usize,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, cutoff: usize) -> Result<Self> {
        let params = ModelParams { a, b, cutoff };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidParameter("A and B must be finite".into()));
        }
        if self.cutoff < MIN_CUTOFF {
            return Err(Error::InvalidTruncation(format!(
                "cutoff must be at least {MIN_CUTOFF}, got {}",
                self.cutoff
            )));
        }
        Ok(())
    }

    /// The constant `A² + B²` separating `H` from `H₁ + H₂`.
    pub fn energy_offset(&self) -> f64 {
        self.a * self.a + self.b * self.b
    }

    /// Default interior size per mode.
    pub fn keep(&self) -> usize {
        default_keep(self.cutoff)
    }

    /// Largest count accepted by the numeric spectrum routines.
    pub fn max_levels(&self) -> usize {
        self.cutoff * self.cutoff / 4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::new(0.3, 0.3, 30).is_ok());
        assert!(matches!(
            ModelParams::new(0.3, 0.3, 7),
            Err(Error::InvalidTruncation(_))
        ));
        assert!(matches!(
            ModelParams::new(f64::NAN, 0.0, 30),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn serde_uses_capital_couplings() {
        let p = ModelParams::new(0.5, -0.25, 12).unwrap();
        let v = serde_json::to_value(p).unwrap();
        assert_eq!(v["A"], 0.5);
        assert_eq!(v["B"], -0.25);
        assert_eq!(v["cutoff"], 12);
    }
}
