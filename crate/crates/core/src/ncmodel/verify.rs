use num_complex::Complex64;

use super::build::{build_nc_hamiltonian_via_bopp, swap_modes, NCOperators};
use crate::error::Result;
use crate::model::{ModelOperators, ALGEBRAIC_TOL, CONSTRUCTION_TOL, SPECTRAL_TOL};
use crate::opalg::{
    interior_block, interior_commutator, interior_product, interior_pseudo_adjoint,
    pseudo_adjoint, ComplexOperator,
};
use crate::report::CheckRecord;

const MAX_INTERIOR: &str = "max_interior";
const MAX_ABS: &str = "max_abs";

fn scaled_identity(m: &ComplexOperator, s: Complex64) -> ComplexOperator {
    ComplexOperator::identity(m.basis()).scale(s)
}

/// Structural identities of the noncommutative model.
///
/// Metric-related identities are checked against the partially diagonalized
/// Hamiltonian `ℋ₁ + ℋ₂ + ½(θ+θ̃)(𝒳₂𝒫₁ − 𝒳₁𝒫₂) + A² + B²`, which commutes
/// with `𝒱` exactly. The Bopp-shifted Hamiltonian differs from it by a
/// constant plus `D`, both second order, and the report ties the two
/// together with a separate construction check.
pub fn verify_nc(ops: &NCOperators) -> Result<Vec<CheckRecord>> {
    let keep = ops.keep;
    let m = &ops.metric;
    let p = &ops.params;
    let mut out = Vec::new();

    let via_bopp = build_nc_hamiltonian_via_bopp(p)?;
    out.push(CheckRecord::upper(
        "nc: H - H_via_bopp",
        MAX_ABS,
        ops.h_nc.max_abs_diff(&via_bopp),
        CONSTRUCTION_TOL,
    ));
    for (label, h) in [("H", &ops.h_nc), ("H_partial", &ops.h_partial)] {
        let ph = &ops.parity * h;
        let hp = &h.adjoint() * &ops.parity;
        out.push(CheckRecord::upper(
            format!("nc: P {label} - {label}† P"),
            MAX_ABS,
            ph.max_abs_diff(&hp),
            CONSTRUCTION_TOL,
        ));
    }
    let diff = &ops.h_partial - &ops.h_nc;
    let rebuilt = ops
        .order2_operator
        .shifted(Complex64::new(p.order2_constant(), 0.0));
    out.push(CheckRecord::upper(
        "nc: H_partial - H - D - c",
        MAX_ABS,
        diff.max_abs_diff(&rebuilt),
        CONSTRUCTION_TOL,
    ));

    for j in 0..2 {
        for k in 0..2 {
            let (jj, kk) = (j + 1, k + 1);
            let delta = if j == k { 1.0 } else { 0.0 };
            let c = interior_commutator(&ops.cal_x[j], &ops.cal_p[k], keep)?;
            out.push(CheckRecord::upper(
                format!("nc: [𝒳{jj},𝒫{kk}] - iδ{jj}{kk}"),
                MAX_INTERIOR,
                c.max_abs_diff(&scaled_identity(&c, Complex64::new(0.0, delta))),
                ALGEBRAIC_TOL,
            ));
        }
    }
    out.push(CheckRecord::upper(
        "nc: [𝒳1,𝒳2]",
        MAX_INTERIOR,
        interior_commutator(&ops.cal_x[0], &ops.cal_x[1], keep)?.max_abs(),
        ALGEBRAIC_TOL,
    ));
    out.push(CheckRecord::upper(
        "nc: [𝒫1,𝒫2]",
        MAX_INTERIOR,
        interior_commutator(&ops.cal_p[0], &ops.cal_p[1], keep)?.max_abs(),
        ALGEBRAIC_TOL,
    ));

    let h12 = &ops.cal_h1 + &ops.cal_h2;
    out.push(CheckRecord::upper(
        "nc: [𝒳2𝒫1 - 𝒳1𝒫2, ℋ1+ℋ2]",
        MAX_INTERIOR,
        interior_commutator(&ops.coupling, &h12, keep)?.max_abs(),
        1e-8,
    ));

    out.push(CheckRecord::upper(
        "nc: η₊ - η₊†",
        MAX_INTERIOR,
        m.herm_deviation,
        SPECTRAL_TOL,
    ));
    out.push(CheckRecord::lower(
        "nc: min eig η₊",
        "min_eig_interior",
        m.min_metric_eig,
        0.0,
    ));
    let pvp = interior_product(&[&ops.parity, &m.v_op.adjoint(), &ops.parity], keep)?;
    out.push(CheckRecord::upper(
        "nc: P⁻¹ 𝒱† P - 𝒱",
        MAX_INTERIOR,
        pvp.max_abs_diff(&interior_block(&m.v_op, keep)?),
        SPECTRAL_TOL,
    ));
    out.push(CheckRecord::upper(
        "nc: [H_partial,𝒱]",
        MAX_INTERIOR,
        interior_commutator(&ops.h_partial, &m.v_op, keep)?.max_abs(),
        SPECTRAL_TOL,
    ));
    // The Bopp-shifted form commutes with 𝒱 only up to the second-order D.
    let h_plus_d = &ops.h_nc + &ops.order2_operator;
    out.push(CheckRecord::upper(
        "nc: [H,𝒱] + [D,𝒱]",
        MAX_INTERIOR,
        interior_commutator(&h_plus_d, &m.v_op, keep)?.max_abs(),
        SPECTRAL_TOL,
    ));
    let lhs = interior_product(&[&m.eta_plus, &ops.h_partial], keep)?;
    let h_adj = ops.h_partial.adjoint();
    let rhs = interior_product(&[&h_adj, &m.eta_plus], keep)?;
    out.push(CheckRecord::upper(
        "nc: η₊ H_partial - H_partial† η₊",
        MAX_INTERIOR,
        lhs.max_abs_diff(&rhs),
        SPECTRAL_TOL,
    ));

    for j in 0..2 {
        let jj = j + 1;
        let dd = pseudo_adjoint(&ops.bold_a[j], m)?;
        out.push(CheckRecord::upper(
            format!("nc: pseudo_adjoint(𝐚{jj}) - 𝐚{jj}‡"),
            MAX_INTERIOR,
            interior_block(&dd, keep)?.max_abs_diff(&interior_block(&ops.bold_a_ddag[j], keep)?),
            SPECTRAL_TOL,
        ));
        let back = interior_pseudo_adjoint(&dd, m, keep)?;
        out.push(CheckRecord::upper(
            format!("nc: (𝐚{jj}‡)‡ - 𝐚{jj}"),
            MAX_INTERIOR,
            back.max_abs_diff(&interior_block(&ops.bold_a[j], keep)?),
            SPECTRAL_TOL,
        ));
        for k in 0..2 {
            let kk = k + 1;
            let delta = if j == k { 1.0 } else { 0.0 };
            let c = interior_commutator(&ops.bold_a[j], &ops.bold_a_ddag[k], keep)?;
            out.push(CheckRecord::upper(
                format!("nc: [𝐚{jj},𝐚{kk}‡] - δ{jj}{kk}"),
                MAX_INTERIOR,
                c.max_abs_diff(&scaled_identity(&c, Complex64::new(delta, 0.0))),
                ALGEBRAIC_TOL,
            ));
            let c = interior_commutator(&ops.bold_a[j], &ops.bold_a[k], keep)?;
            out.push(CheckRecord::upper(
                format!("nc: [𝐚{jj},𝐚{kk}]"),
                MAX_INTERIOR,
                c.max_abs(),
                ALGEBRAIC_TOL,
            ));
        }
    }

    let n_sum = (&ops.cal_n[0] + &ops.cal_n[1]).shifted(Complex64::new(1.0, 0.0));
    out.push(CheckRecord::upper(
        "nc: (ℋ1+ℋ2) - (𝒩1+𝒩2+1)",
        MAX_INTERIOR,
        interior_block(&h12, keep)?.max_abs_diff(&interior_block(&n_sum, keep)?),
        SPECTRAL_TOL,
    ));
    let n_diff = &ops.cal_n[0] - &ops.cal_n[1];
    out.push(CheckRecord::upper(
        "nc: (𝒳2𝒫1 - 𝒳1𝒫2) - (𝒩1-𝒩2)",
        MAX_INTERIOR,
        interior_block(&ops.coupling, keep)?.max_abs_diff(&interior_block(&n_diff, keep)?),
        SPECTRAL_TOL,
    ));

    let asym = ops.h_nc.max_abs_diff(&swap_modes(&ops.h_nc));
    if p.theta != 0.0 || p.theta_tilde != 0.0 {
        out.push(CheckRecord::lower("nc: H - Swap H Swap", MAX_ABS, asym, 0.0));
    } else {
        out.push(CheckRecord::upper(
            "nc: H - Swap H Swap",
            MAX_ABS,
            asym,
            CONSTRUCTION_TOL,
        ));
    }
    Ok(out)
}

/// Field-by-field comparison with the commutative model; meaningful when
/// `θ = θ̃ = 0` and both were built with the same couplings and cutoff.
pub fn commutative_reduction(nc: &NCOperators, model: &ModelOperators) -> Result<Vec<CheckRecord>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    // 𝐚₁ = (a₁ + i a₂)/√2, 𝐚₂ = (−i a₁ − a₂)/√2.
    let chiral = [
        (&model.a[0] + &model.a[1].scale(i)).scale_real(s),
        (&model.a[0].scale(-i) - &model.a[1]).scale_real(s),
    ];
    let chiral_dd = [
        (&model.a_ddag[0] - &model.a_ddag[1].scale(i)).scale_real(s),
        (&model.a_ddag[0].scale(i) - &model.a_ddag[1]).scale_real(s),
    ];
    let mut pairs: Vec<(String, &ComplexOperator, &ComplexOperator)> = vec![
        ("H".into(), &nc.h_nc, &model.h),
        ("H_partial".into(), &nc.h_partial, &model.h),
        ("ℋ1".into(), &nc.cal_h1, &model.h1),
        ("ℋ2".into(), &nc.cal_h2, &model.h2),
        ("P".into(), &nc.parity, &model.parity),
        ("𝒱".into(), &nc.metric.v_op, &model.metric.v_op),
        ("η₊".into(), &nc.metric.eta_plus, &model.metric.eta_plus),
    ];
    for j in 0..2 {
        pairs.push((format!("𝒳{}", j + 1), &nc.cal_x[j], &model.big_x[j]));
        pairs.push((format!("𝒫{}", j + 1), &nc.cal_p[j], &model.p_mom[j]));
        pairs.push((format!("𝐚{}", j + 1), &nc.bold_a[j], &chiral[j]));
        pairs.push((format!("𝐚{}‡", j + 1), &nc.bold_a_ddag[j], &chiral_dd[j]));
    }
    Ok(pairs
        .into_iter()
        .map(|(name, a, b)| {
            CheckRecord::upper(
                format!("reduction: {name}"),
                MAX_ABS,
                a.max_abs_diff(b),
                CONSTRUCTION_TOL,
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelParams};
    use crate::ncmodel::{build_nc_structure, NCParams};
    use crate::report::all_pass;

    #[test]
    fn invariants_hold_at_small_cutoff() {
        let p = NCParams::new(ModelParams::new(0.3, 0.3, 16).unwrap(), 0.01, 0.01).unwrap();
        let ops = build_nc_structure(&p).unwrap();
        let checks = verify_nc(&ops).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn reduces_to_commutative_model() {
        let base = ModelParams::new(0.3, -0.2, 16).unwrap();
        let nc = build_nc_structure(&NCParams::new(base, 0.0, 0.0).unwrap()).unwrap();
        let model = build_model(base).unwrap();
        let checks = commutative_reduction(&nc, &model).unwrap();
        assert!(all_pass(&checks), "{checks:#?}");
        assert!(all_pass(&verify_nc(&nc).unwrap()));
    }
}
