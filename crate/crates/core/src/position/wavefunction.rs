use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Largest supported Hermite degree.
pub const MAX_DEGREE: usize = 60;

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeLimit {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    Ok(())
}

/// Physicists' Hermite polynomial `H_n(z)` by the three-term recurrence.
pub fn hermite(n: usize, z: Complex64) -> Result<Complex64> {
    check_degree(n)?;
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = z * 2.0;
    for k in 1..n {
        let next = z * cur * 2.0 - prev * (2 * k) as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Shifted oscillator eigenfunction
/// `φ_n(X) = π^{−1/4}(2ⁿn!)^{−1/2} e^{−X²/2 + BX} H_n(X)` with `X = x + iA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavefunction {
    pub n: usize,
    /// Imaginary shift of the coordinate.
    pub a: f64,
    /// Momentum shift entering through `e^{BX}`.
    pub b: f64,
}

impl Wavefunction {
    pub fn new(n: usize, params: &ModelParams) -> Result<Self> {
        Self::with_shifts(n, params.a, params.b)
    }

    pub fn with_shifts(n: usize, a: f64, b: f64) -> Result<Self> {
        check_degree(n)?;
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter("shifts must be finite".into()));
        }
        Ok(Wavefunction { n, a, b })
    }
}

/// `φ_0(X), …, φ_{n_max}(X)` at `X = x + iA`.
///
/// Uses the recurrence of the normalized Hermite functions, which keeps
/// every intermediate value of order one.
pub fn eval_all(n_max: usize, a: f64, b: f64, x: f64) -> Vec<Complex64> {
    let z = Complex64::new(x, a);
    let envelope = (-z * z * 0.5 + z * b).exp();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = Complex64::new(PI.powf(-0.25), 0.0);
    out.push(prev);
    if n_max >= 1 {
        let mut cur = z * prev * 2f64.sqrt();
        out.push(cur);
        for k in 1..n_max {
            let kf = k as f64;
            let next = z * cur * (2.0 / (kf + 1.0)).sqrt() - prev * (kf / (kf + 1.0)).sqrt();
            prev = cur;
            cur = next;
            out.push(cur);
        }
    }
    out.iter_mut().for_each(|v| *v *= envelope);
    out
}

/// `φ_n(x + iA)`.
pub fn eval_wavefunction(w: &Wavefunction, x: f64) -> Complex64 {
    eval_all(w.n, w.a, w.b, x)[w.n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn hermite_examples() {
        let z = Complex64::new(0.7, -1.3);
        assert_eq!(hermite(0, z).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(hermite(2, Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(2.0, 0.0));
        let i = Complex64::new(0.0, 1.0);
        assert!(close(hermite(3, i).unwrap(), Complex64::new(0.0, -20.0), 1e-14));
        assert!(matches!(hermite(61, z), Err(Error::DegreeLimit { degree: 61, max: 60 })));
        // H₃(z) = 8z³ − 12z
        let direct = z * z * z * 8.0 - z * 12.0;
        assert!(close(hermite(3, z).unwrap(), direct, 1e-14));
    }

    #[test]
    fn wavefunction_examples() {
        let p = |a, b| ModelParams::new(a, b, 30).unwrap();
        let q = PI.powf(-0.25);
        let w = Wavefunction::new(0, &p(0.0, 0.0)).unwrap();
        assert!(close(eval_wavefunction(&w, 0.0), Complex64::new(q, 0.0), 1e-15));

        let w = Wavefunction::new(0, &p(0.5, 0.0)).unwrap();
        let expected = q * (1.0f64 / 8.0).exp();
        assert!(close(eval_wavefunction(&w, 0.0), Complex64::new(expected, 0.0), 1e-15));

        let w = Wavefunction::new(1, &p(0.0, 0.0)).unwrap();
        let expected = q * 2.0 * (-0.5f64).exp() / 2f64.sqrt();
        assert!(close(eval_wavefunction(&w, 1.0), Complex64::new(expected, 0.0), 1e-15));
    }

    #[test]
    fn recurrence_matches_explicit_normalization() {
        let (a, b) = (0.5, -0.3);
        for n in [0, 1, 2, 5, 12, 30] {
            for x in [-2.0, 0.0, 0.4, 3.1] {
                let z = Complex64::new(x, a);
                let norm = PI.powf(-0.25) / ((2f64).powi(n as i32) * (1..=n).map(|k| k as f64).product::<f64>()).sqrt();
                let explicit = hermite(n, z).unwrap() * (-z * z * 0.5 + z * b).exp() * norm;
                let w = Wavefunction::with_shifts(n, a, b).unwrap();
                assert!(close(eval_wavefunction(&w, x), explicit, 1e-12), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn high_degree_is_finite() {
        let w = Wavefunction::with_shifts(60, 1.0, 1.0).unwrap();
        for x in [-30.0, -5.0, 0.0, 12.0, 40.0] {
            assert!(eval_wavefunction(&w, x).is_finite());
        }
    }
}
