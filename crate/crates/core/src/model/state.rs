use num_complex::Complex64;
use serde::Serialize;

use super::build::ModelOperators;
use crate::error::{Error, Result};
use crate::opalg::{eig_general, MetricBundle};

/// Residual `‖a_j ψ‖₂` above which the ground state is rejected.
pub const ANNIHILATION_LIMIT: f64 = 1e-4;

/// A two-mode state together with its `η₊`-norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockState {
    pub amplitudes: Vec<Complex64>,
    /// Real part of `⟨ψ|η₊|ψ⟩`.
    pub eta_norm: f64,
    /// Imaginary part of `⟨ψ|η₊|ψ⟩`, zero up to rounding.
    pub eta_norm_imag: f64,
}

impl FockState {
    pub fn new(amplitudes: Vec<Complex64>, metric: &MetricBundle) -> Self {
        let q = metric.inner(&amplitudes, &amplitudes);
        FockState {
            amplitudes,
            eta_norm: q.re,
            eta_norm_imag: q.im,
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub(crate) fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Lowest right eigenvector of `H`, normalized so that `⟨ψ|η₊|ψ⟩ = 1` and
/// its largest-magnitude amplitude is real positive.
///
/// `H` is a Kronecker sum, so the eigenvector is the tensor product of the
/// single-mode ground vectors.
pub fn ground_state(ops: &ModelOperators) -> Result<FockState> {
    let c = ops.cutoff();
    let mut factors = Vec::with_capacity(2);
    for mode in &ops.modes {
        let dec = eig_general(&mode.h)?;
        factors.push(dec.right_vector(0));
    }
    let mut amps: Vec<Complex64> = (0..c * c)
        .map(|k| factors[0][k / c] * factors[1][k % c])
        .collect();

    let q = ops.metric.inner(&amps, &amps);
    if !(q.re > 0.0) {
        return Err(Error::MetricNotPositive { min_eig: q.re });
    }
    let scale = 1.0 / q.re.sqrt();
    let (imax, _) = amps
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bi, bv) });
    let phase = amps[imax].conj() / amps[imax].norm();
    for z in &mut amps {
        *z *= phase * scale;
    }
    amps[imax].im = 0.0;

    for (j, a) in ops.a.iter().enumerate() {
        let residual = l2(&a.apply(&amps));
        if !(residual < ANNIHILATION_LIMIT) {
            return Err(Error::AnnihilationResidual {
                mode: j + 1,
                residual,
            });
        }
    }
    Ok(FockState::new(amps, &ops.metric))
}

/// `(a₁‡)^{n1}(a₂‡)^{n2}/√(n1!·n2!)` applied to the ground state.
pub fn n_particle_state(ops: &ModelOperators, n1: usize, n2: usize) -> Result<FockState> {
    let ground = ground_state(ops)?;
    n_particle_from(ops, &ground, n1, n2)
}

fn check_safety(ops: &ModelOperators, n1: usize, n2: usize) -> Result<()> {
    let limit = ops.cutoff() / 2;
    if n1 + n2 > limit {
        return Err(Error::TruncationSafety {
            requested: n1 + n2,
            limit,
        });
    }
    Ok(())
}

/// As [`n_particle_state`] but reusing an already computed ground state.
pub fn n_particle_from(
    ops: &ModelOperators,
    ground: &FockState,
    n1: usize,
    n2: usize,
) -> Result<FockState> {
    check_safety(ops, n1, n2)?;
    Ok(apply_creations(ops, ground, n1, n2, false))
}

/// Unguarded construction. With `mode_one_first` the mode-1 creation
/// operators act on the ground state before the mode-2 ones, which gives an
/// independent route to the same state.
pub(crate) fn apply_creations(
    ops: &ModelOperators,
    ground: &FockState,
    n1: usize,
    n2: usize,
    mode_one_first: bool,
) -> FockState {
    let order = if mode_one_first {
        [(0, n1), (1, n2)]
    } else {
        [(1, n2), (0, n1)]
    };
    let mut v = ground.amplitudes.clone();
    for (mode, count) in order {
        for _ in 0..count {
            v = ops.a_ddag[mode].apply(&v);
        }
    }
    let s = 1.0 / (factorial(n1) * factorial(n2)).sqrt();
    v.iter_mut().for_each(|z| *z *= s);
    FockState::new(v, &ops.metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelParams};

    #[test]
    fn hermitian_ground_state_is_vacuum() {
        let ops = build_model(ModelParams::new(0.0, 0.0, 10).unwrap()).unwrap();
        let g = ground_state(&ops).unwrap();
        assert!((g.amplitudes[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(g.amplitudes[1..].iter().all(|z| z.norm() < 1e-12));
        assert!((g.eta_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_particles_is_ground() {
        let ops = build_model(ModelParams::new(0.3, 0.3, 12).unwrap()).unwrap();
        let g = ground_state(&ops).unwrap();
        assert_eq!(n_particle_from(&ops, &g, 0, 0).unwrap(), g);
    }

    #[test]
    fn truncation_guard() {
        let ops = build_model(ModelParams::new(0.0, 0.0, 10).unwrap()).unwrap();
        assert!(matches!(
            n_particle_state(&ops, 4, 2),
            Err(Error::TruncationSafety { requested: 6, limit: 5 })
        ));
    }

    #[test]
    fn phase_convention() {
        let ops = build_model(ModelParams::new(0.3, -0.2, 12).unwrap()).unwrap();
        let g = ground_state(&ops).unwrap();
        let big = g
            .amplitudes
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        assert!(big.re > 0.0);
        assert!(big.im.abs() < 1e-15);
    }
}
