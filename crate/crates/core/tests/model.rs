use num_complex::Complex64;
use pseudoherm::model::*;
use pseudoherm::opalg::{
    eigenvalues_general, hermitized_interior_extremes, interior_block, interior_commutator,
    interior_product, interior_pseudo_adjoint, pseudo_adjoint, ComplexOperator,
};
use pseudoherm::report::{all_pass, CheckRecord};
use pseudoherm::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn model(a: f64, b: f64, cutoff: usize) -> ModelOperators {
    build_model(ModelParams::new(a, b, cutoff).unwrap()).unwrap()
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn failures(checks: &[CheckRecord]) -> Vec<&CheckRecord> {
    checks.iter().filter(|c| !c.pass).collect()
}

#[test]
fn params_are_validated() {
    assert!(matches!(ModelParams::new(0.1, 0.1, 7), Err(Error::InvalidTruncation(_))));
    assert!(matches!(ModelParams::new(f64::NAN, 0.1, 10), Err(Error::InvalidParameter(_))));
    assert!(matches!(ModelParams::new(0.1, f64::INFINITY, 10), Err(Error::InvalidParameter(_))));
}

#[test]
fn operator_definitions_hold_exactly() {
    let ops = model(0.3, -0.4, 12);
    let (a, b) = (0.3, -0.4);
    for j in 0..2 {
        assert_eq!(ops.big_x[j].max_abs_diff(&ops.x[j].shifted(Complex64::new(0.0, a))), 0.0);
        assert_eq!(ops.p_mom[j].max_abs_diff(&ops.p[j].shifted(Complex64::new(0.0, b))), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ann = (&ops.big_x[j] + &ops.p_mom[j].scale(I)).scale_real(s);
        let cre = (&ops.big_x[j] - &ops.p_mom[j].scale(I)).scale_real(s);
        assert!(ops.a[j].max_abs_diff(&ann) < 1e-15);
        assert!(ops.a_ddag[j].max_abs_diff(&cre) < 1e-15);
        assert!(ops.n[j].max_abs_diff(&(&ops.a_ddag[j] * &ops.a[j])) < 1e-13);
    }
    let sum = (&ops.h1 + &ops.h2).shifted(Complex64::new(a * a + b * b, 0.0));
    assert!(ops.h.max_abs_diff(&sum) < 1e-14);
}

#[test]
fn build_examples() {
    let ops = model(0.0, 0.0, 12);
    assert_eq!(ops.h.max_abs_diff(&ops.h.adjoint()), 0.0);

    let ops = model(0.3, 0.3, 30);
    let direct = hamiltonian_direct(&ops.params).unwrap();
    assert!(direct.max_abs_diff(&ops.h) < 1e-12);
    assert!(ops.construction_deviation < 1e-12);

    for cutoff in [8, 13, 30] {
        let ops = model(0.2, 0.1, cutoff);
        let p2 = &ops.parity * &ops.parity;
        assert_eq!(p2.max_abs_diff(&ComplexOperator::identity(p2.basis())), 0.0);
    }
}

#[test]
fn metric_in_hermitian_limit() {
    let ops = model(0.0, 0.0, 12);
    let c = 12;
    let signs: Vec<Complex64> = (0..c * c)
        .map(|k| Complex64::new(if (k / c + k % c) % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let expected = ComplexOperator::from_diagonal(ops.basis(), &signs);
    assert!(ops.metric.v_op.max_abs_diff(&expected) < 1e-12);
    let eta = &ops.metric.eta_plus;
    assert!(eta.max_abs_diff(&ComplexOperator::identity(eta.basis())) < 1e-12);
}

#[test]
fn metric_at_acceptance_couplings() {
    let ops = model(0.5, 0.5, 30);
    let m = &ops.metric;
    assert!(m.min_metric_eig > 0.0);
    let (lo, _) = hermitized_interior_extremes(&m.eta_plus, ops.keep).unwrap();
    assert!(lo > 0.0);
    assert!(m.herm_deviation < 1e-6);
    let hv = interior_commutator(&ops.h, &m.v_op, ops.keep).unwrap();
    assert!(hv.max_abs() < 1e-6, "{}", hv.max_abs());
}

#[test]
fn metric_construction_routes_agree() {
    let ops = model(0.5, 0.5, 30);
    let dev = v_similarity_crosscheck(&ops).unwrap();
    assert!(dev < 1e-4, "{dev}");
}

#[test]
fn metric_approaches_closed_form_with_cutoff() {
    // The interior of η₊ converges to exp(2Σ(A pⱼ − B xⱼ)) at fixed keep.
    let keep = 6;
    let dev = |cutoff| {
        let params = ModelParams::new(0.3, 0.3, cutoff).unwrap();
        let ops = build_model_with_keep(params, keep).unwrap();
        let exact = interior_block(&closed_form_metric(&params).unwrap(), keep).unwrap();
        interior_block(&ops.metric.eta_plus, keep).unwrap().max_abs_diff(&exact)
    };
    let (d20, d30, d40) = (dev(20), dev(30), dev(40));
    assert!(d30 < d20, "{d30} !< {d20}");
    // By cutoff 30 both sides agree to rounding.
    assert!(d30 < 1e-10 && d40 < 1e-10, "{d30} {d40}");
}

#[test]
fn analytic_spectrum_examples() {
    let p = |a, b| ModelParams::new(a, b, 10).unwrap();
    assert_eq!(spectrum_analytic(0, 0, &p(0.0, 0.0)), 1.0);
    assert_eq!(spectrum_analytic(0, 0, &p(1.0, 1.0)), 3.0);
    assert_eq!(spectrum_analytic(2, 1, &p(0.5, 0.0)), 4.25);
}

#[test]
fn numeric_spectrum_hermitian_limit() {
    let table = spectrum_numeric(&model(0.0, 0.0, 20), 6).unwrap();
    for (row, e) in table.rows.iter().zip([1.0, 2.0, 2.0, 3.0, 3.0, 3.0]) {
        assert!((row.numeric() - Complex64::new(e, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn spectrum_table_layout() {
    let ops = model(0.3, 0.3, 20);
    let table = spectrum_numeric(&ops, 10).unwrap();
    let keys: Vec<(f64, usize, usize)> = table.rows.iter().map(|r| (r.analytic, r.n1, r.n2)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    assert_eq!(keys, sorted);
    for r in &table.rows {
        assert_eq!(r.residual, (r.numeric() - Complex64::new(r.analytic, 0.0)).norm());
        assert_eq!(r.analytic, spectrum_analytic(r.n1, r.n2, &ops.params));
    }
    // Degenerate multiplet n₁+n₂ = k has k+1 members of width < 1e-8.
    for k in 0..4usize {
        let members: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.n1 + r.n2 == k)
            .map(|r| r.numeric_re)
            .collect();
        assert_eq!(members.len(), k + 1);
        let width = members.iter().cloned().fold(f64::MIN, f64::max)
            - members.iter().cloned().fold(f64::MAX, f64::min);
        assert!(width < 1e-8);
    }
    let csv = table.to_csv_string().unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n1,n2,analytic,numeric_re,numeric_im,residual");
    assert_eq!(csv.lines().count(), 11);
    let back: SpectrumTable = serde_json::from_str(&table.to_json().unwrap()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn spectrum_count_is_bounded() {
    let ops = model(0.3, 0.3, 8);
    assert!(spectrum_numeric(&ops, 16).is_ok());
    assert!(spectrum_numeric(&ops, 17).is_err());
    assert!(spectrum_numeric(&ops, 0).is_err());
}

#[test]
fn ground_state_examples() {
    let ops = model(0.0, 0.0, 12);
    let g = ground_state(&ops).unwrap();
    assert!((g.amplitudes[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(l2(&g.amplitudes[1..]) < 1e-12);

    let ops = model(0.5, 0.5, 30);
    let g = ground_state(&ops).unwrap();
    assert!((g.eta_norm - 1.0).abs() < 1e-8);
    assert!(g.eta_norm_imag.abs() < 1e-10);
    for a in &ops.a {
        assert!(l2(&a.apply(&g.amplitudes)) < 1e-6);
    }
    let big = g
        .amplitudes
        .iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap();
    assert!(big.re > 0.0 && big.im == 0.0);
}

#[test]
fn ground_state_is_lowest_eigenvector() {
    let ops = model(0.3, -0.2, 24);
    let g = ground_state(&ops).unwrap();
    let e0 = eigenvalues_general(&ops.h).unwrap()[0];
    let hg = ops.h.apply(&g.amplitudes);
    let r: Vec<Complex64> = hg.iter().zip(&g.amplitudes).map(|(h, v)| h - e0 * v).collect();
    assert!(l2(&r) < 1e-6 * l2(&g.amplitudes));
}

#[test]
fn n_particle_examples() {
    let ops = model(0.5, 0.5, 30);
    let g = ground_state(&ops).unwrap();
    assert_eq!(n_particle_state(&ops, 0, 0).unwrap(), g);

    let s10 = n_particle_state(&ops, 1, 0).unwrap();
    assert!((s10.eta_norm - 1.0).abs() < 1e-6);

    let labels = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 2)];
    let states: Vec<FockState> = labels
        .iter()
        .map(|&(n1, n2)| n_particle_from(&ops, &g, n1, n2).unwrap())
        .collect();
    for (i, s) in states.iter().enumerate() {
        assert!((s.eta_norm - 1.0).abs() < 1e-6, "{:?}", labels[i]);
        assert!(s.eta_norm_imag.abs() < 1e-10 * s.eta_norm.abs());
        for (j, t) in states.iter().enumerate().skip(i + 1) {
            let q = ops.metric.inner(&s.amplitudes, &t.amplitudes);
            assert!(q.norm() < 1e-6, "{:?} {:?}: {q}", labels[i], labels[j]);
        }
        let (n1, n2) = labels[i];
        for (mode, n) in [(0, n1), (1, n2)] {
            let nv = ops.n[mode].apply(&s.amplitudes);
            let r: Vec<Complex64> =
                nv.iter().zip(&s.amplitudes).map(|(x, v)| x - v * n as f64).collect();
            assert!(l2(&r) < 1e-6 * l2(&s.amplitudes));
        }
    }

    assert!(matches!(
        n_particle_state(&ops, 10, 6),
        Err(Error::TruncationSafety { requested: 16, limit: 15 })
    ));
}

#[test]
fn ladder_report_examples() {
    let checks = verify_ladder(&model(0.0, 0.0, 20), 5).unwrap();
    assert!(checks.iter().all(|c| c.deviation < 1e-10), "{checks:#?}");

    let checks = verify_ladder(&model(0.5, 0.5, 30), 5).unwrap();
    assert!(failures(&checks).is_empty(), "{:#?}", failures(&checks));
    assert!(checks.iter().all(|c| c.deviation < 1e-6));

    let cross = checks.iter().find(|c| c.name == "[a1,a2‡] - δ12").unwrap();
    assert!(cross.deviation < 1e-10);

    let v = serde_json::to_value(&checks[0]).unwrap();
    for key in ["name", "norm_type", "deviation", "tolerance", "pass"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn ladder_report_rejects_unsafe_n_max() {
    assert!(verify_ladder(&model(0.3, 0.3, 12), 7).is_err());
}

#[test]
fn evolution_examples() {
    let ops = model(0.5, 0.5, 30);
    let psi = n_particle_state(&ops, 1, 0).unwrap();
    let r = evolve_check(&ops, &psi, &[0.0]).unwrap();
    assert!((r.eta_norms[0] - psi.eta_norm).abs() < 1e-12);

    let grid: Vec<f64> = (0..=10).map(f64::from).collect();
    let r = evolve_check(&ops, &psi, &grid).unwrap();
    assert!(r.max_relative_drift < 1e-8, "{}", r.max_relative_drift);
    assert!(r.max_relative_imag < 1e-8);

    let ops = model(0.0, 0.0, 20);
    let psi = n_particle_state(&ops, 1, 1).unwrap();
    let r = evolve_check(&ops, &psi, &grid).unwrap();
    assert!(r.max_relative_drift < 1e-10);

    assert!(evolve_check(&ops, &psi, &[f64::NAN]).is_err());
}

#[test]
fn spectral_and_dense_propagators_agree_at_short_times() {
    let ops = model(0.5, 0.5, 30);
    let psi = n_particle_state(&ops, 1, 0).unwrap();
    let grid = [0.0, 0.25, 0.5, 1.0];
    let s = evolve_check_with(&ops, &psi, &grid, Propagator::Spectral).unwrap();
    let d = evolve_check_with(&ops, &psi, &grid, Propagator::DenseExpm).unwrap();
    for (x, y) in s.eta_norms.iter().zip(&d.eta_norms) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
}

#[test]
fn parity_pseudo_hermiticity_is_exact() {
    for (a, b) in [(0.3, 0.3), (0.5, -0.5), (1.0, 0.7)] {
        let ops = model(a, b, 20);
        let lhs = &ops.parity * &ops.h;
        let rhs = &ops.h.adjoint() * &ops.parity;
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn metric_pseudo_hermiticity() {
    let ops = model(0.5, 0.5, 30);
    let keep = ops.keep;
    let h_adj = ops.h.adjoint();
    let lhs = interior_product(&[&ops.metric.eta_plus, &ops.h], keep).unwrap();
    let rhs = interior_product(&[&h_adj, &ops.metric.eta_plus], keep).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-6);
}

#[test]
fn shifted_heisenberg_relations() {
    let ops = model(0.5, 0.5, 30);
    for j in 0..2 {
        for k in 0..2 {
            let c = interior_commutator(&ops.big_x[j], &ops.p_mom[k], ops.keep).unwrap();
            let delta = if j == k { I } else { Complex64::new(0.0, 0.0) };
            let target = ComplexOperator::identity(c.basis()).scale(delta);
            assert!(c.max_abs_diff(&target) < 1e-10);
        }
    }
}

#[test]
fn number_operator_is_not_hermitian_but_pseudo_hermitian() {
    for (a, b) in [(0.3, 0.3), (0.5, 0.5)] {
        let ops = model(a, b, 30);
        for n in &ops.n {
            assert!(n.max_abs_diff(&n.adjoint()) > 0.01);
            let dd = pseudo_adjoint(n, &ops.metric).unwrap();
            let dev = interior_block(&dd, ops.keep)
                .unwrap()
                .max_abs_diff(&interior_block(n, ops.keep).unwrap());
            assert!(dev < 1e-6);
            let back = interior_pseudo_adjoint(&dd, &ops.metric, ops.keep).unwrap();
            assert!(back.max_abs_diff(&interior_block(n, ops.keep).unwrap()) < 1e-6);
        }
    }
}

#[test]
fn low_spectrum_is_real_at_default_parameters() {
    for (a, b) in [(0.3, 0.3), (0.5, 0.5)] {
        let ops = model(a, b, 30);
        let values = eigenvalues_general(&ops.h).unwrap();
        let worst = values[..ops.params.max_levels()]
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "A={a} B={b}: {worst}");
    }
}

#[test]
fn interior_metric_is_positive_at_default_parameters() {
    for (a, b) in [(0.3, 0.3), (0.5, 0.5), (-0.5, 0.5)] {
        let ops = model(a, b, 30);
        assert!(ops.metric.min_metric_eig > 0.0, "A={a} B={b}");
    }
}

#[test]
fn full_model_report_passes() {
    let ops = model(0.5, 0.5, 30);
    let checks = verify_model(&ops).unwrap();
    assert!(all_pass(&checks), "{:#?}", failures(&checks));
}
