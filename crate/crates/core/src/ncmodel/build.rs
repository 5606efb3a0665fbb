use num_complex::Complex64;

use super::params::NCParams;
use crate::error::Result;
use crate::model::{build_metric, hamiltonian_shifted, ModeOperators};
use crate::opalg::{embed, kron, BasisTag, ComplexOperator, MetricBundle};

/// Operators of the first-order noncommutative model, all in the
/// commutative two-mode Fock basis.
#[derive(Debug, Clone)]
pub struct NCOperators {
    pub params: NCParams,
    pub keep: usize,
    /// Mode `j` carries the shifts `(𝒜_j, ℬ_j)`.
    pub modes: [ModeOperators; 2],
    /// Bopp-shifted Hamiltonian written in commutative variables.
    pub h_nc: ComplexOperator,
    /// Partially diagonalized form `ℋ₁ + ℋ₂ + ½(θ+θ̃)(𝒳₂𝒫₁ − 𝒳₁𝒫₂) + A² + B²`.
    pub h_partial: ComplexOperator,
    pub cal_x: [ComplexOperator; 2],
    pub cal_p: [ComplexOperator; 2],
    pub cal_h1: ComplexOperator,
    pub cal_h2: ComplexOperator,
    /// `𝒳₂𝒫₁ − 𝒳₁𝒫₂`.
    pub coupling: ComplexOperator,
    pub parity: ComplexOperator,
    /// `P𝒱` with `𝒱 = (−1)^{ℋ₁+ℋ₂−1}`.
    pub metric: MetricBundle,
    pub bold_a: [ComplexOperator; 2],
    pub bold_a_ddag: [ComplexOperator; 2],
    pub cal_n: [ComplexOperator; 2],
    /// Non-constant second-order part `D` of `h_partial − h_nc`.
    pub order2_operator: ComplexOperator,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The coupled Hamiltonian
/// `H + ½(θ+θ̃)(x₂p₁ − x₁p₂) − i[½Bθ̃(x₁−x₂) − ½Aθ(p₁−p₂)]`.
pub fn build_nc_hamiltonian(params: &NCParams) -> Result<ComplexOperator> {
    params.validate()?;
    let base = params.base;
    let m = ModeOperators::new(base.cutoff, 0.0, 0.0)?;
    let h = hamiltonian_shifted(&base)?;
    let x2p1 = kron(&m.p, &m.x)?;
    let x1p2 = kron(&m.x, &m.p)?;
    let x1 = embed(&m.x, 0)?;
    let x2 = embed(&m.x, 1)?;
    let p1 = embed(&m.p, 0)?;
    let p2 = embed(&m.p, 1)?;
    let rotation = (&x2p1 - &x1p2).scale_real(params.coupling());
    let xs = (&x1 - &x2).scale_real(0.5 * base.b * params.theta_tilde);
    let ps = (&p1 - &p2).scale_real(0.5 * base.a * params.theta);
    let correction = (&xs - &ps).scale(c(0.0, -1.0));
    Ok(&(&h + &rotation) + &correction)
}

/// `x̂_j = x_j − (θ/2)ε_jk p_k`, `p̂_j = p_j + (θ̃/2)ε_jk x_k`.
pub fn bopp_shift(
    params: &NCParams,
    x: &[ComplexOperator; 2],
    p: &[ComplexOperator; 2],
) -> Result<([ComplexOperator; 2], [ComplexOperator; 2])> {
    for op in x.iter().chain(p) {
        op.check_same_basis(&x[0])?;
    }
    let (t, tt) = (0.5 * params.theta, 0.5 * params.theta_tilde);
    let xhat = [&x[0] - &p[1].scale_real(t), &x[1] + &p[0].scale_real(t)];
    let phat = [&p[0] + &x[1].scale_real(tt), &p[1] - &x[0].scale_real(tt)];
    Ok((xhat, phat))
}

fn bopp_hamiltonian(params: &NCParams, sign: f64) -> Result<ComplexOperator> {
    let base = params.base;
    let m = ModeOperators::new(base.cutoff, 0.0, 0.0)?;
    let x = [embed(&m.x, 0)?, embed(&m.x, 1)?];
    let p = [embed(&m.p, 0)?, embed(&m.p, 1)?];
    let scaled = NCParams {
        theta: sign * params.theta,
        theta_tilde: sign * params.theta_tilde,
        ..*params
    };
    let (xh, ph) = bopp_shift(&scaled, &x, &p)?;
    let mut h = ComplexOperator::zeros(x[0].basis());
    for j in 0..2 {
        h = &h + &(&(&ph[j] * &ph[j]) + &(&xh[j] * &xh[j])).scale_real(0.5);
        h = &h + &xh[j].scale(c(0.0, base.a));
        h = &h + &ph[j].scale(c(0.0, base.b));
    }
    Ok(h)
}

/// The same Hamiltonian obtained by substituting the Bopp shift into the
/// noncommutative oscillator and keeping first order in `(θ, θ̃)`.
///
/// The substituted operator is a quadratic polynomial `H₀ + εH₁ + ε²H₂` in
/// a common scale `ε` of both parameters, so its first-order truncation is
/// `H(0) + (H(+1) − H(−1))/2` exactly.
pub fn build_nc_hamiltonian_via_bopp(params: &NCParams) -> Result<ComplexOperator> {
    params.validate()?;
    let h0 = bopp_hamiltonian(params, 0.0)?;
    let hp = bopp_hamiltonian(params, 1.0)?;
    let hm = bopp_hamiltonian(params, -1.0)?;
    Ok(&h0 + &(&hp - &hm).scale_real(0.5))
}

/// Exchanges the two modes: `(S M S)[(i₁,i₂),(j₁,j₂)] = M[(i₂,i₁),(j₂,j₁)]`.
pub fn swap_modes(m: &ComplexOperator) -> ComplexOperator {
    let BasisTag::TwoMode(cut) = m.basis() else {
        return m.clone();
    };
    let flip = |k: usize| (k % cut) * cut + k / cut;
    ComplexOperator::from_fn(m.basis(), |i, j| m.get(flip(i), flip(j)))
}

/// Builds every operator with the default interior size.
pub fn build_nc_structure(params: &NCParams) -> Result<NCOperators> {
    params.validate()?;
    build_nc_structure_with_keep(params, params.base.keep())
}

pub fn build_nc_structure_with_keep(params: &NCParams, keep: usize) -> Result<NCOperators> {
    params.validate()?;
    let base = params.base;
    let [a1, a2] = params.cal_a();
    let [b1, b2] = params.cal_b();
    let modes = [
        ModeOperators::new(base.cutoff, a1, b1)?,
        ModeOperators::new(base.cutoff, a2, b2)?,
    ];
    let cal_x = [embed(&modes[0].big_x, 0)?, embed(&modes[1].big_x, 1)?];
    let cal_p = [embed(&modes[0].big_p, 0)?, embed(&modes[1].big_p, 1)?];
    let cal_h1 = embed(&modes[0].h, 0)?;
    let cal_h2 = embed(&modes[1].h, 1)?;
    // 𝒳₂𝒫₁ = 𝒫₁ ⊗ 𝒳₂ and 𝒳₁𝒫₂ = 𝒳₁ ⊗ 𝒫₂.
    let coupling = &kron(&modes[0].big_p, &modes[1].big_x)? - &kron(&modes[0].big_x, &modes[1].big_p)?;
    let h_partial = (&(&cal_h1 + &cal_h2) + &coupling.scale_real(params.coupling()))
        .shifted(c(base.energy_offset(), 0.0));
    let h_nc = build_nc_hamiltonian(params)?;

    let parity = kron(&modes[0].parity, &modes[1].parity)?;
    let metric = build_metric(&cal_h1, &cal_h2, &parity, keep)?;

    let i = c(0.0, 1.0);
    let half = c(0.5, 0.0);
    // a₁ = ½(𝒳₁ + i𝒳₂ + i𝒫₁ − 𝒫₂), a₂ = ½(−i𝒳₁ − 𝒳₂ + 𝒫₁ − i𝒫₂).
    let combo = |cx: [Complex64; 2], cp: [Complex64; 2]| -> ComplexOperator {
        let mut out = ComplexOperator::zeros(parity.basis());
        for k in 0..2 {
            out = &out + &cal_x[k].scale(cx[k] * half);
            out = &out + &cal_p[k].scale(cp[k] * half);
        }
        out
    };
    let one = c(1.0, 0.0);
    let bold_a = [
        combo([one, i], [i, -one]),
        combo([-i, -one], [one, -i]),
    ];
    // a‡_j = ½((η − iε)_jk 𝒳_k − (iη + ε)_jk 𝒫_k).
    let bold_a_ddag = [
        combo([one, -i], [-i, -one]),
        combo([i, -one], [one, i]),
    ];
    let cal_n = [
        &bold_a_ddag[0] * &bold_a[0],
        &bold_a_ddag[1] * &bold_a[1],
    ];

    let m0 = ModeOperators::new(base.cutoff, 0.0, 0.0)?;
    let lin = &(&embed(&m0.x, 0)? + &embed(&m0.x, 1)?).scale_real(base.a * params.theta_tilde)
        + &(&embed(&m0.p, 0)? + &embed(&m0.p, 1)?).scale_real(base.b * params.theta);
    let order2_operator = lin.scale(c(0.0, -0.5 * params.coupling()));

    Ok(NCOperators {
        params: *params,
        keep,
        modes,
        h_nc,
        h_partial,
        cal_x,
        cal_p,
        cal_h1,
        cal_h2,
        coupling,
        parity,
        metric,
        bold_a,
        bold_a_ddag,
        cal_n,
        order2_operator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelParams};
    use crate::opalg::{interior_block, interior_commutator};

    fn nc(a: f64, b: f64, t: f64, tt: f64, cutoff: usize) -> NCParams {
        NCParams::new(ModelParams::new(a, b, cutoff).unwrap(), t, tt).unwrap()
    }

    #[test]
    fn zero_theta_reduces_to_commutative() {
        let p = nc(0.3, 0.3, 0.0, 0.0, 10);
        let h = build_nc_hamiltonian(&p).unwrap();
        let ops = build_model(p.base).unwrap();
        assert!(h.max_abs_diff(&ops.h) < 1e-12);
        assert!(build_nc_hamiltonian_via_bopp(&p).unwrap().max_abs_diff(&ops.h) < 1e-12);
    }

    #[test]
    fn bopp_shift_commutators() {
        let p = nc(0.0, 0.0, 0.01, 0.0, 12);
        let m = ModeOperators::new(12, 0.0, 0.0).unwrap();
        let x = [embed(&m.x, 0).unwrap(), embed(&m.x, 1).unwrap()];
        let pp = [embed(&m.p, 0).unwrap(), embed(&m.p, 1).unwrap()];
        let (xh, ph) = bopp_shift(&p, &x, &pp).unwrap();
        let comm = interior_commutator(&xh[0], &xh[1], 4).unwrap();
        let target = ComplexOperator::identity(comm.basis()).scale(c(0.0, 0.01));
        assert!(comm.max_abs_diff(&target) < 1e-10);

        let zero = nc(0.0, 0.0, 0.0, 0.0, 12);
        let (xh, ph0) = bopp_shift(&zero, &x, &pp).unwrap();
        assert_eq!(xh, x);
        assert_eq!(ph0, pp);
        drop(ph);

        let both = nc(0.0, 0.0, 0.01, 0.01, 12);
        let (xh, ph) = bopp_shift(&both, &x, &pp).unwrap();
        let comm = interior_commutator(&xh[0], &ph[0], 4).unwrap();
        let dev = comm.max_abs_diff(&ComplexOperator::identity(comm.basis()).scale(c(0.0, 1.0)));
        assert!((dev - 2.5e-5).abs() < 1e-12, "{dev}");
    }

    #[test]
    fn two_constructions_agree() {
        let p = nc(0.3, 0.3, 0.01, 0.01, 10);
        let a = build_nc_hamiltonian(&p).unwrap();
        let b = build_nc_hamiltonian_via_bopp(&p).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn partial_form_differs_by_constant_and_linear_term() {
        let p = nc(0.3, 0.4, 0.05, 0.02, 12);
        let ops = build_nc_structure(&p).unwrap();
        let diff = &ops.h_partial - &ops.h_nc;
        let rebuilt = ops.order2_operator.shifted(c(p.order2_constant(), 0.0));
        assert!(diff.max_abs_diff(&rebuilt) < 1e-12);
    }

    #[test]
    fn swap_is_an_involution() {
        let p = nc(0.3, 0.3, 0.01, 0.0, 8);
        let h = build_nc_hamiltonian(&p).unwrap();
        assert_eq!(swap_modes(&swap_modes(&h)), h);
        let ops = build_model(p.base).unwrap();
        assert!(swap_modes(&ops.h).max_abs_diff(&ops.h) < 1e-12);
        let keep = 3;
        assert!(
            interior_block(&swap_modes(&h), keep)
                .unwrap()
                .max_abs_diff(&interior_block(&h, keep).unwrap())
                > 1e-4
        );
    }
}
