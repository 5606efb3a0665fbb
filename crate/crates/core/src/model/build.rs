use num_complex::Complex64;

use super::mode::ModeOperators;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::opalg::{
    embed, expm, interior_block, kron, matrix_power_of_minus_one_with, BasisTag, ComplexOperator,
    IntegerBranch, MetricBundle,
};

/// Every operator of the two-mode model in the tensor Fock basis.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub params: ModelParams,
    /// Interior size used for all interior-block diagnostics.
    pub keep: usize,
    /// Single-mode factors; mode `j` of every two-mode operator below is
    /// `embed(modes[j].…, j)`.
    pub modes: [ModeOperators; 2],
    pub x: [ComplexOperator; 2],
    pub p: [ComplexOperator; 2],
    pub big_x: [ComplexOperator; 2],
    pub p_mom: [ComplexOperator; 2],
    /// `H₁ + H₂ + (A² + B²)`.
    pub h: ComplexOperator,
    pub h1: ComplexOperator,
    pub h2: ComplexOperator,
    pub parity: ComplexOperator,
    pub metric: MetricBundle,
    pub a: [ComplexOperator; 2],
    pub a_ddag: [ComplexOperator; 2],
    pub n: [ComplexOperator; 2],
    /// `max |H_direct − H_shifted|` between the two constructions of `H`.
    pub construction_deviation: f64,
}

/// `H` written directly in the unshifted variables:
/// `½(p₁²+x₁²) + ½(p₂²+x₂²) + i[A(x₁+x₂) + B(p₁+p₂)]`.
pub fn hamiltonian_direct(params: &ModelParams) -> Result<ComplexOperator> {
    params.validate()?;
    let m = ModeOperators::new(params.cutoff, 0.0, 0.0)?;
    let h0 = (&(&m.p * &m.p) + &(&m.x * &m.x)).scale_real(0.5);
    let shift = &m.x.scale(Complex64::new(0.0, params.a)) + &m.p.scale(Complex64::new(0.0, params.b));
    let single = &h0 + &shift;
    Ok(&embed(&single, 0)? + &embed(&single, 1)?)
}

fn pair(op: impl Fn(&ModeOperators) -> &ComplexOperator, modes: &[ModeOperators; 2]) -> Result<[ComplexOperator; 2]> {
    Ok([embed(op(&modes[0]), 0)?, embed(op(&modes[1]), 1)?])
}

fn shifted_sum(h1: &ComplexOperator, h2: &ComplexOperator, params: &ModelParams) -> ComplexOperator {
    (h1 + h2).shifted(Complex64::new(params.energy_offset(), 0.0))
}

/// `H` written in the shifted variables, `H₁ + H₂ + (A² + B²)`; the same
/// matrix as [`ModelOperators::h`].
pub fn hamiltonian_shifted(params: &ModelParams) -> Result<ComplexOperator> {
    params.validate()?;
    let mode = ModeOperators::new(params.cutoff, params.a, params.b)?;
    Ok(shifted_sum(&embed(&mode.h, 0)?, &embed(&mode.h, 1)?, params))
}

/// Builds all operators and the metric with the default interior size.
pub fn build_model(params: ModelParams) -> Result<ModelOperators> {
    build_model_with_keep(params, params.keep())
}

pub fn build_model_with_keep(params: ModelParams, keep: usize) -> Result<ModelOperators> {
    params.validate()?;
    if keep == 0 || keep >= params.cutoff {
        return Err(Error::InvalidTruncation(format!(
            "interior size {keep} must be in 1..{}",
            params.cutoff
        )));
    }
    let mode = ModeOperators::new(params.cutoff, params.a, params.b)?;
    let modes = [mode.clone(), mode];

    let x = pair(|m| &m.x, &modes)?;
    let p = pair(|m| &m.p, &modes)?;
    let big_x = pair(|m| &m.big_x, &modes)?;
    let p_mom = pair(|m| &m.big_p, &modes)?;
    let a = pair(|m| &m.a, &modes)?;
    let a_ddag = pair(|m| &m.a_ddag, &modes)?;
    let n = pair(|m| &m.n, &modes)?;
    let [h1, h2] = pair(|m| &m.h, &modes)?;
    let h = shifted_sum(&h1, &h2, &params);

    let construction_deviation = hamiltonian_direct(&params)?.max_abs_diff(&h);
    let parity = kron(&modes[0].parity, &modes[1].parity)?;
    let metric = build_metric(&h1, &h2, &parity, keep)?;

    Ok(ModelOperators {
        params,
        keep,
        modes,
        x,
        p,
        big_x,
        p_mom,
        h,
        h1,
        h2,
        parity,
        metric,
        a,
        a_ddag,
        n,
        construction_deviation,
    })
}

/// `V = (−1)^{H₁+H₂−1}` and `η₊ = P·V`.
///
/// When `H₁`, `H₂` and `P` act on one mode each, `V` is evaluated as
/// `(−1)^{h₁−½} ⊗ (−1)^{h₂−½}`: the single-mode eigenvector bases are well
/// conditioned while the two-mode one is not. Otherwise the dense
/// two-mode spectral calculus is used. Both round truncation-edge
/// eigenvalues to the nearest integer.
pub fn build_metric(
    h1: &ComplexOperator,
    h2: &ComplexOperator,
    parity: &ComplexOperator,
    keep: usize,
) -> Result<MetricBundle> {
    h1.check_same_basis(h2)?;
    h1.check_same_basis(parity)?;
    let factors = (h1.mode_factor(0), h2.mode_factor(1));
    if let (Some(f1), Some(f2)) = factors {
        let cutoff = f1.dim();
        let p1 = ComplexOperator::from_fn(f1.basis(), |i, j| parity.get(i * cutoff, j * cutoff));
        let p2 = ComplexOperator::from_fn(f1.basis(), |i, j| parity.get(i, j));
        if kron(&p1, &p2)? == *parity {
            let v1 = matrix_power_of_minus_one_with(&f1, 0.5, IntegerBranch::Nearest)?;
            let v2 = matrix_power_of_minus_one_with(&f2, 0.5, IntegerBranch::Nearest)?;
            let edge = v1.nonconverged * cutoff + v2.nonconverged * cutoff
                - v1.nonconverged * v2.nonconverged;
            return Ok(
                MetricBundle::from_mode_factors([&p1, &p2], [&v1.op, &v2.op], keep)?
                    .with_nonconverged(edge),
            );
        }
    }
    let v = matrix_power_of_minus_one_with(&(h1 + h2), 1.0, IntegerBranch::Nearest)?;
    Ok(MetricBundle::new(parity.clone(), v.op, keep)?.with_nonconverged(v.nonconverged))
}

/// Interior agreement between `V` and the similarity construction
/// `Sim·(−1)^{N₁+N₂}·Sim⁻¹` with `Sim = e^{−A(p₁+p₂)}·e^{B(x₁+x₂)}`.
pub fn v_similarity_crosscheck(ops: &ModelOperators) -> Result<f64> {
    let m = &ops.modes[0];
    let (a, b) = (ops.params.a, ops.params.b);
    let sim = &expm(&m.p.scale_real(-a))? * &expm(&m.x.scale_real(b))?;
    let sim_inv = &expm(&m.x.scale_real(-b))? * &expm(&m.p.scale_real(a))?;
    let v_alt_single = &(&sim * &m.parity) * &sim_inv;
    let v_alt = kron(&v_alt_single, &v_alt_single)?;
    let keep = ops.keep;
    Ok(interior_block(&v_alt, keep)?.max_abs_diff(&interior_block(&ops.metric.v_op, keep)?))
}

/// Exact metric `exp(2Σⱼ(A pⱼ − B xⱼ))` evaluated in the truncated basis; it
/// converges to the interior of `η₊` as the cutoff grows.
pub fn closed_form_metric(params: &ModelParams) -> Result<ComplexOperator> {
    let m = ModeOperators::new(params.cutoff, 0.0, 0.0)?;
    let gen = &m.p.scale_real(2.0 * params.a) - &m.x.scale_real(2.0 * params.b);
    let single = expm(&gen)?;
    kron(&single, &single)
}

impl ModelOperators {
    pub fn basis(&self) -> BasisTag {
        self.h.basis()
    }

    pub fn cutoff(&self) -> usize {
        self.params.cutoff
    }
}
