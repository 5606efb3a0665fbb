use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Largest accepted `|θ|` and `|θ̃|`.
pub const THETA_LIMIT: f64 = 0.2;

/// Noncommutative parameters on top of the commutative couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NCParams {
    pub base: ModelParams,
    pub theta: f64,
    pub theta_tilde: f64,
}

impl NCParams {
    pub fn new(base: ModelParams, theta: f64, theta_tilde: f64) -> Result<Self> {
        let p = NCParams {
            base,
            theta,
            theta_tilde,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        check_theta("theta", self.theta)?;
        check_theta("theta_tilde", self.theta_tilde)
    }

    /// `(𝒜₁, 𝒜₂) = (A + Bθ/2, A − Bθ/2)`.
    pub fn cal_a(&self) -> [f64; 2] {
        let (a, b) = (self.base.a, self.base.b);
        [a + 0.5 * b * self.theta, a - 0.5 * b * self.theta]
    }

    /// `(ℬ₁, ℬ₂) = (B − Aθ̃/2, B + Aθ̃/2)`.
    pub fn cal_b(&self) -> [f64; 2] {
        let (a, b) = (self.base.a, self.base.b);
        [b - 0.5 * a * self.theta_tilde, b + 0.5 * a * self.theta_tilde]
    }

    /// `½(θ + θ̃)`, the coefficient of the mode coupling.
    pub fn coupling(&self) -> f64 {
        0.5 * (self.theta + self.theta_tilde)
    }

    /// Constant part of the second-order difference between the partially
    /// diagonalized form and the Bopp-shifted Hamiltonian:
    /// `½(θ+θ̃)(A²θ̃ + B²θ) − (B²θ² + A²θ̃²)/4`.
    pub fn order2_constant(&self) -> f64 {
        let (a2, b2) = (self.base.a * self.base.a, self.base.b * self.base.b);
        let (t, tt) = (self.theta, self.theta_tilde);
        0.5 * (t + tt) * (a2 * tt + b2 * t) - 0.25 * (b2 * t * t + a2 * tt * tt)
    }

    pub fn with_thetas(&self, theta: f64, theta_tilde: f64) -> Result<Self> {
        NCParams::new(self.base, theta, theta_tilde)
    }
}

pub(crate) fn check_theta(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v.abs() > THETA_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "{name} = {v} outside the first-order regime |{name}| <= {THETA_LIMIT}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_shifts() {
        let base = ModelParams::new(0.3, 0.5, 20).unwrap();
        let p = NCParams::new(base, 0.1, 0.2).unwrap();
        let [a1, a2] = p.cal_a();
        let [b1, b2] = p.cal_b();
        assert!((a1 - 0.325).abs() < 1e-15 && (a2 - 0.275).abs() < 1e-15);
        assert!((b1 - 0.47).abs() < 1e-15 && (b2 - 0.53).abs() < 1e-15);
        let q = p.with_thetas(0.0, 0.0).unwrap();
        assert_eq!(q.cal_a(), [0.3, 0.3]);
    }

    #[test]
    fn theta_guard() {
        let base = ModelParams::new(0.0, 0.0, 20).unwrap();
        assert!(NCParams::new(base, 0.5, 0.0).is_err());
        assert!(NCParams::new(base, 0.0, -0.21).is_err());
        assert!(NCParams::new(base, 0.2, -0.2).is_ok());
    }
}
