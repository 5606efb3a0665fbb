use std::collections::HashMap;

use num_complex::Complex64;

use super::build::{v_similarity_crosscheck, ModelOperators};
use super::state::{apply_creations, ground_state, l2, FockState};
use crate::error::{Error, Result};
use crate::opalg::{
    interior_block, interior_commutator, interior_product, interior_pseudo_adjoint,
    pseudo_adjoint, ComplexOperator,
};
use crate::report::CheckRecord;

/// Tolerance for identities that pass through a spectral decomposition.
pub const SPECTRAL_TOL: f64 = 1e-6;
/// Tolerance for identities that are exact in exact arithmetic.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Tolerance for identities that hold entry by entry up to rounding.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

const MAX_INTERIOR: &str = "max_interior";
const MAX_ABS: &str = "max_abs";
const L2_STATE: &str = "l2_state";

fn identity_like(m: &ComplexOperator, scale: Complex64) -> ComplexOperator {
    ComplexOperator::identity(m.basis()).scale(scale)
}

fn rel_l2(diff: &[Complex64], reference: &[Complex64]) -> f64 {
    l2(diff) / l2(reference).max(f64::MIN_POSITIVE)
}

fn sub(a: &[Complex64], b: &[Complex64], scale: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y * scale).collect()
}

/// Ladder-operator relations on interior blocks and on explicit
/// `n`-particle states with `n1 + n2 ≤ n_max`.
///
/// Statewise deviations are 2-norms relative to the 2-norm of the reference
/// state.
pub fn verify_ladder(ops: &ModelOperators, n_max: usize) -> Result<Vec<CheckRecord>> {
    let limit = ops.cutoff() / 2;
    if n_max > limit {
        return Err(Error::TruncationSafety {
            requested: n_max,
            limit,
        });
    }
    let keep = ops.keep;
    let mut out = Vec::new();
    for j in 0..2 {
        for k in 0..2 {
            let (jj, kk) = (j + 1, k + 1);
            let delta = if j == k { 1.0 } else { 0.0 };

            let c = interior_commutator(&ops.a[j], &ops.a_ddag[k], keep)?;
            let d = c.max_abs_diff(&identity_like(&c, Complex64::new(delta, 0.0)));
            out.push(CheckRecord::upper(
                format!("[a{jj},a{kk}‡] - δ{jj}{kk}"),
                MAX_INTERIOR,
                d,
                SPECTRAL_TOL,
            ));

            let c = interior_commutator(&ops.a[j], &ops.a[k], keep)?;
            out.push(CheckRecord::upper(
                format!("[a{jj},a{kk}]"),
                MAX_INTERIOR,
                c.max_abs(),
                SPECTRAL_TOL,
            ));

            let c = interior_commutator(&ops.n[j], &ops.a_ddag[k], keep)?;
            let target = interior_block(&ops.a_ddag[j], keep)?.scale_real(delta);
            out.push(CheckRecord::upper(
                format!("[N{jj},a{kk}‡] - δ{jj}{kk} a{jj}‡"),
                MAX_INTERIOR,
                c.max_abs_diff(&target),
                SPECTRAL_TOL,
            ));

            let c = interior_commutator(&ops.n[j], &ops.a[k], keep)?;
            let target = interior_block(&ops.a[j], keep)?.scale_real(-delta);
            out.push(CheckRecord::upper(
                format!("[N{jj},a{kk}] + δ{jj}{kk} a{jj}"),
                MAX_INTERIOR,
                c.max_abs_diff(&target),
                SPECTRAL_TOL,
            ));
        }
    }

    let ground = ground_state(ops)?;
    let mut states: HashMap<(usize, usize), FockState> = HashMap::new();
    let mut reordered: HashMap<(usize, usize), FockState> = HashMap::new();
    // One level above n_max is needed as the target of creation.
    let top = n_max + 1;
    for n1 in 0..=top {
        for n2 in 0..=(top - n1) {
            states.insert((n1, n2), apply_creations(ops, &ground, n1, n2, false));
            reordered.insert((n1, n2), apply_creations(ops, &ground, n1, n2, true));
        }
    }

    let mut worst = [0.0f64; 6];
    for n1 in 0..=n_max {
        for n2 in 0..=(n_max - n1) {
            let psi = &states[&(n1, n2)].amplitudes;
            for j in 0..2 {
                let nj = if j == 0 { n1 } else { n2 };
                let up_label = if j == 0 { (n1 + 1, n2) } else { (n1, n2 + 1) };
                let up = &reordered[&up_label].amplitudes;
                let created = ops.a_ddag[j].apply(psi);
                let d = rel_l2(&sub(&created, up, ((nj + 1) as f64).sqrt()), up);
                worst[j] = worst[j].max(d);

                let lowered = ops.a[j].apply(psi);
                let d = if nj == 0 {
                    rel_l2(&lowered, psi)
                } else {
                    let down_label = if j == 0 { (n1 - 1, n2) } else { (n1, n2 - 1) };
                    let down = &reordered[&down_label].amplitudes;
                    rel_l2(&sub(&lowered, down, (nj as f64).sqrt()), down)
                };
                worst[2 + j] = worst[2 + j].max(d);

                let counted = ops.n[j].apply(psi);
                let d = rel_l2(&sub(&counted, psi, nj as f64), psi);
                worst[4 + j] = worst[4 + j].max(d);
            }
        }
    }
    let names = [
        "a1‡|n1,n2⟩ - √(n1+1)|n1+1,n2⟩",
        "a2‡|n1,n2⟩ - √(n2+1)|n1,n2+1⟩",
        "a1|n1,n2⟩ - √n1|n1-1,n2⟩",
        "a2|n1,n2⟩ - √n2|n1,n2-1⟩",
        "N1|n1,n2⟩ - n1|n1,n2⟩",
        "N2|n1,n2⟩ - n2|n1,n2⟩",
    ];
    for (name, d) in names.iter().zip(worst) {
        out.push(CheckRecord::upper(*name, L2_STATE, d, SPECTRAL_TOL));
    }

    let mut gram = 0.0f64;
    let labels: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n1| (0..=(n_max - n1)).map(move |n2| (n1, n2)))
        .collect();
    let eta_states: Vec<Vec<Complex64>> = labels
        .iter()
        .map(|l| ops.metric.eta_plus.apply(&states[l].amplitudes))
        .collect();
    for (i, li) in labels.iter().enumerate() {
        for (k, _) in labels.iter().enumerate() {
            let q: Complex64 = states[li]
                .amplitudes
                .iter()
                .zip(&eta_states[k])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let target = if i == k { 1.0 } else { 0.0 };
            gram = gram.max((q - Complex64::new(target, 0.0)).norm());
        }
    }
    out.push(CheckRecord::upper(
        "⟨n|η₊|m⟩ - δnm",
        "max_abs_gram",
        gram,
        SPECTRAL_TOL,
    ));
    Ok(out)
}

/// Structural identities of the model: the two constructions of `H`,
/// parity and metric pseudo-Hermiticity, the metric itself, the shifted
/// Heisenberg algebra and the pseudo-adjoint relations of the ladder
/// operators.
pub fn verify_model(ops: &ModelOperators) -> Result<Vec<CheckRecord>> {
    let keep = ops.keep;
    let m = &ops.metric;
    let mut out = Vec::new();

    out.push(CheckRecord::upper(
        "H_direct - H_shifted",
        MAX_ABS,
        ops.construction_deviation,
        CONSTRUCTION_TOL,
    ));
    let ph = &ops.parity * &ops.h;
    let hp = &ops.h.adjoint() * &ops.parity;
    out.push(CheckRecord::upper(
        "P H - H† P",
        MAX_ABS,
        ph.max_abs_diff(&hp),
        CONSTRUCTION_TOL,
    ));

    out.push(CheckRecord::upper(
        "η₊ - η₊†",
        MAX_INTERIOR,
        m.herm_deviation,
        SPECTRAL_TOL,
    ));
    out.push(CheckRecord::lower(
        "min eig η₊",
        "min_eig_interior",
        m.min_metric_eig,
        0.0,
    ));
    out.push(CheckRecord::upper(
        "η₊ η₊⁻¹ - I",
        MAX_INTERIOR,
        m.inverse_deviation,
        1e-8,
    ));
    out.push(CheckRecord::upper(
        "V² - I",
        MAX_INTERIOR,
        m.involution_deviation()?,
        SPECTRAL_TOL,
    ));
    let pvp = interior_product(&[&ops.parity, &m.v_op.adjoint(), &ops.parity], keep)?;
    out.push(CheckRecord::upper(
        "P⁻¹ V† P - V",
        MAX_INTERIOR,
        pvp.max_abs_diff(&interior_block(&m.v_op, keep)?),
        SPECTRAL_TOL,
    ));
    out.push(CheckRecord::upper(
        "V - Sim P Sim⁻¹",
        MAX_INTERIOR,
        v_similarity_crosscheck(ops)?,
        1e-4,
    ));
    out.push(CheckRecord::upper(
        "[H,V]",
        MAX_INTERIOR,
        interior_commutator(&ops.h, &m.v_op, keep)?.max_abs(),
        SPECTRAL_TOL,
    ));
    let lhs = interior_product(&[&m.eta_plus, &ops.h], keep)?;
    let h_adj = ops.h.adjoint();
    let rhs = interior_product(&[&h_adj, &m.eta_plus], keep)?;
    out.push(CheckRecord::upper(
        "η₊ H - H† η₊",
        MAX_INTERIOR,
        lhs.max_abs_diff(&rhs),
        SPECTRAL_TOL,
    ));

    for j in 0..2 {
        for k in 0..2 {
            let c = interior_commutator(&ops.big_x[j], &ops.p_mom[k], keep)?;
            let delta = if j == k { 1.0 } else { 0.0 };
            out.push(CheckRecord::upper(
                format!("[X{},P{}] - iδ{}{}", j + 1, k + 1, j + 1, k + 1),
                MAX_INTERIOR,
                c.max_abs_diff(&identity_like(&c, Complex64::new(0.0, delta))),
                ALGEBRAIC_TOL,
            ));
        }
    }

    let (a, b) = (ops.params.a.abs(), ops.params.b.abs());
    for j in 0..2 {
        let jj = j + 1;
        if a >= 0.3 || b >= 0.3 {
            let n = &ops.n[j];
            out.push(CheckRecord::lower(
                format!("N{jj} - N{jj}†"),
                MAX_ABS,
                n.max_abs_diff(&n.adjoint()),
                0.01,
            ));
        }
        let n_dd = interior_pseudo_adjoint(&ops.n[j], m, keep)?;
        out.push(CheckRecord::upper(
            format!("N{jj}‡ - N{jj}"),
            MAX_INTERIOR,
            n_dd.max_abs_diff(&interior_block(&ops.n[j], keep)?),
            SPECTRAL_TOL,
        ));
        let a_dd = pseudo_adjoint(&ops.a[j], m)?;
        out.push(CheckRecord::upper(
            format!("pseudo_adjoint(a{jj}) - a{jj}‡"),
            MAX_INTERIOR,
            interior_block(&a_dd, keep)?.max_abs_diff(&interior_block(&ops.a_ddag[j], keep)?),
            SPECTRAL_TOL,
        ));
        let back = interior_pseudo_adjoint(&a_dd, m, keep)?;
        out.push(CheckRecord::upper(
            format!("(a{jj}‡)‡ - a{jj}"),
            MAX_INTERIOR,
            back.max_abs_diff(&interior_block(&ops.a[j], keep)?),
            SPECTRAL_TOL,
        ));
    }
    let h_dd = pseudo_adjoint(&ops.h, m)?;
    let back = interior_pseudo_adjoint(&h_dd, m, keep)?;
    out.push(CheckRecord::upper(
        "(H‡)‡ - H",
        MAX_INTERIOR,
        back.max_abs_diff(&interior_block(&ops.h, keep)?),
        SPECTRAL_TOL,
    ));

    let ground = ground_state(ops)?;
    out.push(CheckRecord::upper(
        "⟨0|η₊|0⟩ - 1",
        "abs",
        (ground.eta_norm - 1.0).abs(),
        1e-8,
    ));
    for j in 0..2 {
        out.push(CheckRecord::upper(
            format!("a{} |0⟩", j + 1),
            "l2",
            l2(&ops.a[j].apply(&ground.amplitudes)),
            SPECTRAL_TOL,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelParams};
    use crate::report::all_pass;

    #[test]
    fn hermitian_limit_is_exact() {
        let ops = build_model(ModelParams::new(0.0, 0.0, 12).unwrap()).unwrap();
        let ladder = verify_ladder(&ops, 4).unwrap();
        for r in &ladder {
            assert!(r.deviation < 1e-10, "{} = {}", r.name, r.deviation);
        }
        let model = verify_model(&ops).unwrap();
        assert!(all_pass(&model), "{model:#?}");
    }

    #[test]
    fn small_shift_passes() {
        let ops = build_model(ModelParams::new(0.3, 0.3, 16).unwrap()).unwrap();
        let ladder = verify_ladder(&ops, 3).unwrap();
        assert!(all_pass(&ladder), "{ladder:#?}");
        let model = verify_model(&ops).unwrap();
        assert!(all_pass(&model), "{model:#?}");
    }

    #[test]
    fn ladder_guard() {
        let ops = build_model(ModelParams::new(0.0, 0.0, 8).unwrap()).unwrap();
        assert!(matches!(
            verify_ladder(&ops, 5),
            Err(Error::TruncationSafety { .. })
        ));
    }
}
