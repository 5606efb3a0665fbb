use std::collections::HashMap;

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use super::build::ModelOperators;
use super::state::FockState;
use crate::error::{Error, Result};
use crate::opalg::{eig_general, expm};

/// Distance of `λ − ½` from an integer below which a single-mode eigenpair
/// counts as converged.
pub const CONVERGED_TOL: f64 = 1e-6;

/// How `e^{−iHt}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    /// `e^{−i(A²+B²)t}·U₁(t)⊗U₂(t)` where `U_j` sums `e^{−iλt}` over the
    /// converged single-mode eigenpairs only.
    Spectral,
    /// Dense `expm(−iHΔt)` stepping. Truncation-edge eigenvalues with large
    /// imaginary parts make this grow without bound for long times.
    DenseExpm,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionReport {
    pub propagator: Propagator,
    pub times: Vec<f64>,
    /// `Re ⟨ψ(t)|η₊|ψ(t)⟩`.
    pub eta_norms: Vec<f64>,
    pub eta_norms_imag: Vec<f64>,
    /// `max_t |n(t) − n(0)| / |n(0)|`.
    pub max_relative_drift: f64,
    /// `max_t |Im n(t)| / |n(0)|`.
    pub max_relative_imag: f64,
    /// Relative 2-norm of the part of `ψ₀` outside the converged subspace
    /// (zero for the dense propagator).
    pub discarded_weight: f64,
}

/// Converged-mode propagator pieces for one mode.
struct ModeSpectrum {
    right: Mat<Complex64>,
    left: Mat<Complex64>,
    values: Vec<Complex64>,
}

impl ModeSpectrum {
    fn new(h: &crate::opalg::ComplexOperator) -> Result<Self> {
        let dec = eig_general(h)?;
        let keep: Vec<usize> = dec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                let s = **l - Complex64::new(0.5, 0.0);
                (s - Complex64::new(s.re.round(), 0.0)).norm() < CONVERGED_TOL
            })
            .map(|(k, _)| k)
            .collect();
        let d = h.dim();
        let right = Mat::from_fn(d, keep.len(), |i, j| dec.right_vectors[(i, keep[j])]);
        let left = Mat::from_fn(keep.len(), d, |i, j| dec.left_vectors[(keep[i], j)]);
        let values = keep.iter().map(|&k| dec.eigenvalues[k]).collect();
        Ok(ModeSpectrum {
            right,
            left,
            values,
        })
    }

    fn propagator(&self, t: f64) -> Mat<Complex64> {
        let mut scaled = self.right.clone();
        for (j, l) in self.values.iter().enumerate() {
            let phase = (l * Complex64::new(0.0, -t)).exp();
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= phase;
            }
        }
        &scaled * &self.left
    }
}

fn as_matrix(v: &[Complex64], c: usize) -> Mat<Complex64> {
    Mat::from_fn(c, c, |i, j| v[i * c + j])
}

fn frobenius(m: &Mat<Complex64>) -> f64 {
    m.norm_l2()
}

fn to_vec(m: &Mat<Complex64>) -> Vec<Complex64> {
    let c = m.nrows();
    (0..c * c).map(|k| m[(k / c, k % c)]).collect()
}

/// `η₊`-norm of `e^{−iHt}ψ₀` on each time, with the spectral propagator.
pub fn evolve_check(
    ops: &ModelOperators,
    psi0: &FockState,
    t_grid: &[f64],
) -> Result<EvolutionReport> {
    evolve_check_with(ops, psi0, t_grid, Propagator::Spectral)
}

pub fn evolve_check_with(
    ops: &ModelOperators,
    psi0: &FockState,
    t_grid: &[f64],
    propagator: Propagator,
) -> Result<EvolutionReport> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid must be finite".into()));
    }
    if psi0.amplitudes.len() != ops.basis().dim() {
        return Err(Error::InvalidParameter("state dimension mismatch".into()));
    }
    let (states, discarded_weight) = match propagator {
        Propagator::Spectral => spectral_states(ops, psi0, t_grid)?,
        Propagator::DenseExpm => (dense_states(ops, psi0, t_grid)?, 0.0),
    };
    let reference = psi0.eta_norm.abs().max(f64::MIN_POSITIVE);
    let mut eta_norms = Vec::with_capacity(t_grid.len());
    let mut eta_norms_imag = Vec::with_capacity(t_grid.len());
    let mut max_relative_drift = 0.0f64;
    let mut max_relative_imag = 0.0f64;
    for v in &states {
        let q = ops.metric.inner(v, v);
        if !q.is_finite() {
            return Err(Error::NonFinite("time evolution"));
        }
        max_relative_drift = max_relative_drift.max((q.re - psi0.eta_norm).abs() / reference);
        max_relative_imag = max_relative_imag.max(q.im.abs() / reference);
        eta_norms.push(q.re);
        eta_norms_imag.push(q.im);
    }
    Ok(EvolutionReport {
        propagator,
        times: t_grid.to_vec(),
        eta_norms,
        eta_norms_imag,
        max_relative_drift,
        max_relative_imag,
        discarded_weight,
    })
}

fn spectral_states(
    ops: &ModelOperators,
    psi0: &FockState,
    t_grid: &[f64],
) -> Result<(Vec<Vec<Complex64>>, f64)> {
    let c = ops.cutoff();
    let m1 = ModeSpectrum::new(&ops.modes[0].h)?;
    let m2 = ModeSpectrum::new(&ops.modes[1].h)?;
    let psi = as_matrix(&psi0.amplitudes, c);
    let projected = &(&m1.right * &m1.left) * &psi * (&m2.right * &m2.left).transpose();
    let discarded = frobenius(&(&psi - &projected)) / frobenius(&psi).max(f64::MIN_POSITIVE);
    let offset = ops.params.energy_offset();
    let states = t_grid
        .iter()
        .map(|&t| {
            let global = Complex64::new(0.0, -offset * t).exp();
            let evolved = &m1.propagator(t) * &psi * m2.propagator(t).transpose();
            let mut v = to_vec(&evolved);
            v.iter_mut().for_each(|z| *z *= global);
            v
        })
        .collect();
    Ok((states, discarded))
}

fn dense_states(
    ops: &ModelOperators,
    psi0: &FockState,
    t_grid: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&i, &j| t_grid[i].total_cmp(&t_grid[j]));
    let mut cache: HashMap<u64, crate::opalg::ComplexOperator> = HashMap::new();
    let mut out = vec![Vec::new(); t_grid.len()];
    let mut current = psi0.amplitudes.clone();
    let mut t_now = 0.0f64;
    for idx in order {
        let dt = t_grid[idx] - t_now;
        if dt != 0.0 {
            let step = match cache.get(&dt.to_bits()) {
                Some(u) => u,
                None => {
                    let u = expm(&ops.h.scale(Complex64::new(0.0, -dt)))?;
                    cache.entry(dt.to_bits()).or_insert(u)
                }
            };
            current = step.apply(&current);
            t_now = t_grid[idx];
        }
        out[idx] = current.clone();
    }
    Ok(out)
}
