use faer::Side;
use num_complex::Complex64;
use serde::Serialize;

use super::spectral::kronecker_sum_factors;
use super::operator::{
    default_keep, interior_block, interior_product, kron, BasisTag, ComplexOperator,
};
use crate::error::{Error, Result};

/// Single-mode pieces of a metric that factorizes across the two modes.
#[derive(Debug, Clone)]
struct ModeMetric {
    v: ComplexOperator,
    eta: ComplexOperator,
    eta_inverse: ComplexOperator,
}

/// The metric `η₊ = P·V`, its inverse and interior diagnostics.
#[derive(Debug, Clone)]
pub struct MetricBundle {
    pub parity: ComplexOperator,
    pub v_op: ComplexOperator,
    pub eta_plus: ComplexOperator,
    /// `V·P`, which inverts `P·V` whenever `P² = V² = I`.
    pub eta_inverse: ComplexOperator,
    /// `max |η₊ − η₊†|` over the interior block.
    pub herm_deviation: f64,
    /// Extreme eigenvalues of the Hermitized interior block of `η₊`.
    pub min_metric_eig: f64,
    pub max_metric_eig: f64,
    /// `max_metric_eig / min_metric_eig`.
    pub condition: f64,
    /// `max |η₊·η₊⁻¹ − I|` over the interior block.
    pub inverse_deviation: f64,
    pub keep: usize,
    /// Eigenvalues of `H₁ + H₂` that were not near an integer when `V` was
    /// built (truncation-edge states).
    pub nonconverged: usize,
    factors: Option<[ModeMetric; 2]>,
}

/// Summary of a bundle's diagnostics, for reports.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MetricSummary {
    pub keep: usize,
    pub herm_deviation: f64,
    pub min_metric_eig: f64,
    pub max_metric_eig: f64,
    pub condition: f64,
    pub inverse_deviation: f64,
    pub nonconverged: usize,
}

/// Extreme eigenvalues of `(B + B†)/2` for the interior block `B` of `m`.
pub fn hermitized_interior_extremes(m: &ComplexOperator, keep: usize) -> Result<(f64, f64)> {
    let block = interior_block(m, keep)?;
    let herm = (&block + &block.adjoint()).scale_real(0.5);
    let values = herm
        .as_mat()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenSolver)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, max))
}

impl MetricBundle {
    /// Assembles `η₊ = parity·v_op` and checks interior positivity.
    pub fn new(parity: ComplexOperator, v_op: ComplexOperator, keep: usize) -> Result<Self> {
        parity.check_same_basis(&v_op)?;
        let eta_plus = &parity * &v_op;
        let eta_inverse = &v_op * &parity;
        Self::finish(parity, v_op, eta_plus, eta_inverse, keep, None)
    }

    /// Builds a two-mode bundle from per-mode parity and `V` factors, so that
    /// pseudo-adjoints of single-mode operators can be taken mode by mode.
    pub fn from_mode_factors(
        parity: [&ComplexOperator; 2],
        v_op: [&ComplexOperator; 2],
        keep: usize,
    ) -> Result<Self> {
        let mode = |j: usize| ModeMetric {
            v: v_op[j].clone(),
            eta: parity[j] * v_op[j],
            eta_inverse: v_op[j] * parity[j],
        };
        let factors = [mode(0), mode(1)];
        let p = kron(parity[0], parity[1])?;
        let v = kron(v_op[0], v_op[1])?;
        let eta_plus = kron(&factors[0].eta, &factors[1].eta)?;
        let eta_inverse = kron(&factors[0].eta_inverse, &factors[1].eta_inverse)?;
        Self::finish(p, v, eta_plus, eta_inverse, keep, Some(factors))
    }

    fn finish(
        parity: ComplexOperator,
        v_op: ComplexOperator,
        eta_plus: ComplexOperator,
        eta_inverse: ComplexOperator,
        keep: usize,
        factors: Option<[ModeMetric; 2]>,
    ) -> Result<Self> {
        if !eta_plus.is_finite() || !eta_inverse.is_finite() {
            return Err(Error::NonFinite("metric assembly"));
        }
        let herm_deviation = interior_block(&eta_plus, keep)?.hermiticity_deviation();
        let (min_metric_eig, max_metric_eig) = hermitized_interior_extremes(&eta_plus, keep)?;
        if !(min_metric_eig > 0.0) {
            return Err(Error::MetricNotPositive {
                min_eig: min_metric_eig,
            });
        }
        // A factorized product is formed mode by mode: the dense two-mode
        // product loses digits to the large truncation-edge entries.
        let inv = match &factors {
            Some([f1, f2]) => interior_block(
                &kron(&(&f1.eta * &f1.eta_inverse), &(&f2.eta * &f2.eta_inverse))?,
                keep,
            )?,
            None => interior_product(&[&eta_plus, &eta_inverse], keep)?,
        };
        let inverse_deviation = inv.max_abs_diff(&ComplexOperator::identity(inv.basis()));
        Ok(MetricBundle {
            parity,
            v_op,
            eta_plus,
            eta_inverse,
            herm_deviation,
            min_metric_eig,
            max_metric_eig,
            condition: max_metric_eig / min_metric_eig,
            inverse_deviation,
            keep,
            nonconverged: 0,
            factors,
        })
    }

    pub(crate) fn with_nonconverged(mut self, count: usize) -> Self {
        self.nonconverged = count;
        self
    }

    /// Trivial metric: every pseudo-adjoint is the conjugate transpose.
    pub fn identity(basis: BasisTag) -> Self {
        let id = ComplexOperator::identity(basis);
        let keep = default_keep(basis.cutoff());
        MetricBundle {
            parity: id.clone(),
            v_op: id.clone(),
            eta_plus: id.clone(),
            eta_inverse: id,
            herm_deviation: 0.0,
            min_metric_eig: 1.0,
            max_metric_eig: 1.0,
            condition: 1.0,
            inverse_deviation: 0.0,
            keep,
            nonconverged: 0,
            factors: None,
        }
    }

    pub fn basis(&self) -> BasisTag {
        self.eta_plus.basis()
    }

    pub fn is_factorized(&self) -> bool {
        self.factors.is_some()
    }

    pub fn summary(&self) -> MetricSummary {
        MetricSummary {
            keep: self.keep,
            herm_deviation: self.herm_deviation,
            min_metric_eig: self.min_metric_eig,
            max_metric_eig: self.max_metric_eig,
            condition: self.condition,
            inverse_deviation: self.inverse_deviation,
            nonconverged: self.nonconverged,
        }
    }

    /// Interior `max |V² − I|`, formed mode by mode when factorized.
    pub fn involution_deviation(&self) -> Result<f64> {
        let v2 = match &self.factors {
            Some([f1, f2]) => interior_block(&kron(&(&f1.v * &f1.v), &(&f2.v * &f2.v))?, self.keep)?,
            None => interior_product(&[&self.v_op, &self.v_op], self.keep)?,
        };
        Ok(v2.max_abs_diff(&ComplexOperator::identity(v2.basis())))
    }

    /// `⟨ψ|η₊|φ⟩`.
    pub fn inner(&self, psi: &[Complex64], phi: &[Complex64]) -> Complex64 {
        let eta_phi = self.eta_plus.apply(phi);
        psi.iter().zip(&eta_phi).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Mode-by-mode pseudo-adjoint for operators of the form `h₁⊗I + I⊗h₂`
/// (including mode-local ones) under a factorized metric.
fn factorized_pseudo_adjoint(
    a: &ComplexOperator,
    eta: &MetricBundle,
) -> Result<Option<ComplexOperator>> {
    let Some(factors) = &eta.factors else {
        return Ok(None);
    };
    let single = |m: &ModeMetric, f: &ComplexOperator| &(&m.eta_inverse * &f.adjoint()) * &m.eta;
    for mode in 0..2 {
        if let Some(f) = a.mode_factor(mode) {
            let s = single(&factors[mode], &f);
            let id = ComplexOperator::identity(s.basis());
            let out = if mode == 0 { kron(&s, &id)? } else { kron(&id, &s)? };
            return Ok(Some(out));
        }
    }
    if let Some((h1, h2)) = kronecker_sum_factors(a) {
        let s1 = single(&factors[0], &h1);
        let s2 = single(&factors[1], &h2);
        let id = ComplexOperator::identity(s1.basis());
        return Ok(Some(&kron(&s1, &id)? + &kron(&id, &s2)?));
    }
    Ok(None)
}

/// `A‡ = η₊⁻¹·A†·η₊`.
///
/// Under a factorized metric, mode-local operators and Kronecker sums are
/// handled mode by mode, which avoids the rounding of the dense two-mode
/// product.
pub fn pseudo_adjoint(a: &ComplexOperator, eta: &MetricBundle) -> Result<ComplexOperator> {
    a.check_same_basis(&eta.eta_plus)?;
    if let Some(out) = factorized_pseudo_adjoint(a, eta)? {
        return Ok(out);
    }
    Ok(&(&eta.eta_inverse * &a.adjoint()) * &eta.eta_plus)
}

/// Interior block of `A‡`, computed from interior rows and columns only.
pub fn interior_pseudo_adjoint(
    a: &ComplexOperator,
    eta: &MetricBundle,
    keep: usize,
) -> Result<ComplexOperator> {
    a.check_same_basis(&eta.eta_plus)?;
    if let Some(out) = factorized_pseudo_adjoint(a, eta)? {
        return interior_block(&out, keep);
    }
    let adj = a.adjoint();
    interior_product(&[&eta.eta_inverse, &adj, &eta.eta_plus], keep)
}
