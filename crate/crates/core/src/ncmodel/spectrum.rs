use std::collections::BTreeMap;

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use super::build::build_nc_hamiltonian;
use super::params::NCParams;
use crate::error::Result;
use crate::model::{check_count, lowest_labels, NcColumns, SpectrumTable};
use crate::opalg::eigenvalues_general;
use crate::report::CheckRecord;

/// Residual floor below which both scaling residuals count as converged.
pub const TRUNCATION_FLOOR: f64 = 1e-8;
/// Accepted window for `r(10⁻²)/r(10⁻³)`.
pub const SCALING_WINDOW: (f64, f64) = (50.0, 200.0);
/// Noncommutative strengths used by the scaling check.
pub const SCALING_STRENGTHS: [f64; 2] = [1e-2, 1e-3];
const SCALING_LEVELS: usize = 6;
const SCALING_COUNT: usize = 10;

/// First-order level `(n₁+n₂+1) + ½(θ+θ̃)(n₁−n₂) + A² + B²`, labelled by the
/// chiral occupations.
pub fn nc_spectrum_analytic(n1: usize, n2: usize, params: &NCParams) -> f64 {
    (n1 + n2 + 1) as f64
        + params.coupling() * (n1 as f64 - n2 as f64)
        + params.base.energy_offset()
}

/// Completing the square in the quadratic Hamiltonian gives the levels
/// exactly: `(n₁+n₂+1) + ½(θ+θ̃)(n₁−n₂) + ½ jᵀM⁻¹j`, where `M` is the
/// Hessian over `(x₁, x₂, p₁, p₂)` and `i·j` the linear coefficients.
pub fn nc_spectrum_exact(n1: usize, n2: usize, params: &NCParams) -> f64 {
    (n1 + n2 + 1) as f64 + params.coupling() * (n1 as f64 - n2 as f64) + exact_constant(params)
}

/// `½ jᵀM⁻¹j`; reduces to `A² + B²` without noncommutativity.
pub fn exact_constant(params: &NCParams) -> f64 {
    let (a, b) = (params.base.a, params.base.b);
    let (t, tt) = (params.theta, params.theta_tilde);
    let g = params.coupling();
    let mut m = Mat::<f64>::identity(4, 4);
    // Order: x₁, x₂, p₁, p₂.
    m[(1, 2)] = g;
    m[(2, 1)] = g;
    m[(0, 3)] = -g;
    m[(3, 0)] = -g;
    let j = Mat::from_fn(4, 1, |i, _| {
        [a - 0.5 * b * tt, a + 0.5 * b * tt, b + 0.5 * a * t, b - 0.5 * a * t][i]
    });
    let sol = m.partial_piv_lu().solve(&j);
    0.5 * (0..4).map(|i| j[(i, 0)] * sol[(i, 0)]).sum::<f64>()
}

/// Lowest `count` eigenvalues of the coupled Hamiltonian, labelled by the
/// first-order levels. Within each `n₁+n₂` multiplet the order follows
/// `sign(θ+θ̃)`.
pub fn nc_spectrum_numeric(params: &NCParams, count: usize) -> Result<SpectrumTable> {
    params.validate()?;
    check_count(count, &params.base)?;
    let h = build_nc_hamiltonian(params)?;
    let mut values = eigenvalues_general(&h)?;
    values.truncate(count);
    Ok(label_nc(params, count, values))
}

fn label_nc(params: &NCParams, count: usize, values: Vec<Complex64>) -> SpectrumTable {
    let labels = lowest_labels(count, params.base.cutoff, |n1, n2| {
        nc_spectrum_analytic(n1, n2, params)
    });
    let mut table = SpectrumTable::from_labels(labels, values);
    table.nc = Some(NcColumns {
        theta: params.theta,
        theta_tilde: params.theta_tilde,
        order2_constant: params.order2_constant(),
    });
    table
}

/// Spread `max Re − min Re` of the numeric levels within each `n₁+n₂`
/// multiplet present in the table, keyed by `n₁+n₂`.
pub fn multiplet_splittings(table: &SpectrumTable) -> BTreeMap<usize, f64> {
    let mut ranges: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for r in &table.rows {
        let e = ranges
            .entry(r.n1 + r.n2)
            .or_insert((f64::INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.min(r.numeric_re);
        e.1 = e.1.max(r.numeric_re);
    }
    ranges.into_iter().map(|(k, (lo, hi))| (k, hi - lo)).collect()
}

/// Residuals of one split level at both strengths.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingLevel {
    pub n1: usize,
    pub n2: usize,
    /// `|numeric − first-order|` at each entry of [`SCALING_STRENGTHS`].
    pub residuals: [f64; 2],
    pub ratio: f64,
    /// Residual predicted by the exact levels, `|½jᵀM⁻¹j − A² − B²|`.
    pub predicted: [f64; 2],
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub levels: Vec<ScalingLevel>,
    pub tables: Vec<SpectrumTable>,
}

impl ScalingReport {
    pub fn pass(&self) -> bool {
        self.levels.iter().all(|l| l.pass)
    }

    pub fn checks(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        for l in &self.levels {
            let name = format!("nc.scaling.level_{}_{}", l.n1, l.n2);
            let floor = l.residuals.iter().all(|r| *r < TRUNCATION_FLOOR);
            if floor {
                out.push(CheckRecord::upper(
                    name,
                    "residual_floor",
                    l.residuals[0].max(l.residuals[1]),
                    TRUNCATION_FLOOR,
                ));
            } else {
                out.push(CheckRecord::lower(
                    format!("{name}.ratio_min"),
                    "residual_ratio",
                    l.ratio,
                    SCALING_WINDOW.0,
                ));
                out.push(CheckRecord::upper(
                    format!("{name}.ratio_max"),
                    "residual_ratio",
                    l.ratio,
                    SCALING_WINDOW.1,
                ));
            }
        }
        out
    }
}

/// Diagonalizes at `θ = θ̃ = s` for both strengths in [`SCALING_STRENGTHS`]
/// and checks that the residual against the first-order levels scales as
/// `s²` for the lowest split levels (`n₁ ≠ n₂`). The `θ` fields of `base` are
/// ignored.
pub fn first_order_scaling_check(base: &NCParams) -> Result<ScalingReport> {
    let mut tables = Vec::with_capacity(2);
    let mut consts = [0.0; 2];
    for (k, &s) in SCALING_STRENGTHS.iter().enumerate() {
        let p = base.with_thetas(s, s)?;
        consts[k] = (exact_constant(&p) - p.base.energy_offset()).abs();
        tables.push(nc_spectrum_numeric(&p, SCALING_COUNT.min(p.base.max_levels()))?);
    }
    let split: Vec<(usize, usize)> = tables[0]
        .rows
        .iter()
        .filter(|r| r.n1 != r.n2)
        .take(SCALING_LEVELS)
        .map(|r| (r.n1, r.n2))
        .collect();
    let residual = |t: &SpectrumTable, n1: usize, n2: usize| {
        t.rows
            .iter()
            .find(|r| r.n1 == n1 && r.n2 == n2)
            .map_or(f64::NAN, |r| r.residual)
    };
    let levels = split
        .into_iter()
        .map(|(n1, n2)| {
            let residuals = [residual(&tables[0], n1, n2), residual(&tables[1], n1, n2)];
            let ratio = residuals[0] / residuals[1];
            let floor = residuals.iter().all(|r| *r < TRUNCATION_FLOOR);
            let pass = floor || (ratio >= SCALING_WINDOW.0 && ratio <= SCALING_WINDOW.1);
            ScalingLevel {
                n1,
                n2,
                residuals,
                ratio,
                predicted: consts,
                pass,
            }
        })
        .collect();
    Ok(ScalingReport { levels, tables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn nc(a: f64, b: f64, t: f64, tt: f64, cutoff: usize) -> NCParams {
        NCParams::new(ModelParams::new(a, b, cutoff).unwrap(), t, tt).unwrap()
    }

    #[test]
    fn analytic_examples() {
        assert!((nc_spectrum_analytic(1, 0, &nc(0.0, 0.0, 0.01, 0.01, 10)) - 2.01).abs() < 1e-15);
        let p = nc(0.3, 0.4, 0.05, -0.05, 10);
        assert_eq!(nc_spectrum_analytic(3, 1, &p), 5.0 + 0.25);
        let q = nc(0.3, 0.4, 0.05, 0.1, 10);
        assert_eq!(nc_spectrum_analytic(2, 2, &q), 5.0 + 0.25);
    }

    #[test]
    fn exact_constant_limits() {
        let p = nc(0.3, 0.4, 0.0, 0.0, 10);
        assert!((exact_constant(&p) - 0.25).abs() < 1e-15);
        assert_eq!(exact_constant(&nc(0.0, 0.0, 0.1, 0.1, 10)), 0.0);
    }

    #[test]
    fn exact_levels_match_diagonalization() {
        let p = nc(0.3, 0.3, 0.05, 0.02, 20);
        let table = nc_spectrum_numeric(&p, 6).unwrap();
        for r in &table.rows {
            let exact = nc_spectrum_exact(r.n1, r.n2, &p);
            assert!((r.numeric_re - exact).abs() < 1e-9, "{r:?} {exact}");
            assert!(r.numeric_im.abs() < 1e-9);
        }
    }

    #[test]
    fn negative_coupling_reverses_multiplets() {
        let p = nc(0.0, 0.0, -0.02, -0.02, 12);
        let table = nc_spectrum_numeric(&p, 3).unwrap();
        let labels: Vec<(usize, usize)> = table.rows.iter().map(|r| (r.n1, r.n2)).collect();
        assert_eq!(labels, vec![(0, 0), (1, 0), (0, 1)]);
        assert!(table.max_residual() < 1e-10);
    }

    #[test]
    fn splittings_vanish_when_parameters_cancel() {
        let p = nc(0.3, 0.3, 0.01, -0.01, 16);
        let table = nc_spectrum_numeric(&p, 10).unwrap();
        for (_, s) in multiplet_splittings(&table) {
            assert!(s < 1e-3);
        }
    }
}
