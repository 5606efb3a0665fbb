use std::io::Write;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wavefunction::{eval_all, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::model::{fmt_f64, ModeOperators, ModelParams};
use crate::opalg::{BasisTag, ComplexOperator};

/// Nodes per Gauss–Legendre panel.
pub const PANEL_NODES: usize = 20;
/// Smallest accepted node count.
pub const MIN_NODES: usize = 200;
/// Largest tolerated change of a result under node doubling.
pub const DOUBLING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Equal panels with a fixed Gauss–Legendre rule on each.
    GaussLegendreComposite,
    Trapezoid,
}

/// Integration of `[−L, L]` along the shifted line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureScheme {
    pub half_width: f64,
    pub node_count: usize,
    pub rule: QuadratureRule,
}

/// `8 + |A| + |B| + √(2·n_max + 1)`.
pub fn required_half_width(n_max: usize, a: f64, b: f64) -> f64 {
    8.0 + a.abs() + b.abs() + ((2 * n_max + 1) as f64).sqrt()
}

impl QuadratureScheme {
    /// Composite Gauss–Legendre with the mandated half-width and 400 nodes.
    pub fn for_degree(n_max: usize, params: &ModelParams) -> Self {
        QuadratureScheme {
            half_width: required_half_width(n_max, params.a, params.b),
            node_count: 400,
            rule: QuadratureRule::GaussLegendreComposite,
        }
    }

    pub fn validate(&self, n_max: usize, a: f64, b: f64) -> Result<()> {
        if self.node_count < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs at least {MIN_NODES} nodes, got {}",
                self.node_count
            )));
        }
        let need = required_half_width(n_max, a, b);
        if !(self.half_width >= need) || !self.half_width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half-width {} below the required {need}",
                self.half_width
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        QuadratureScheme {
            node_count: self.node_count * 2,
            ..*self
        }
    }

    /// Nodes and weights on `[−L, L]`.
    pub fn nodes_weights(&self) -> Vec<(f64, f64)> {
        let l = self.half_width;
        match self.rule {
            QuadratureRule::GaussLegendreComposite => {
                let panels = self.node_count.div_ceil(PANEL_NODES);
                let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_NODES).expect("non-zero"));
                let h = 2.0 * l / panels as f64;
                let mut out = Vec::with_capacity(panels * PANEL_NODES);
                for k in 0..panels {
                    let lo = -l + h * k as f64;
                    let mid = lo + 0.5 * h;
                    for &(x, w) in rule.as_node_weight_pairs() {
                        out.push((mid + 0.5 * h * x, 0.5 * h * w));
                    }
                }
                out
            }
            QuadratureRule::Trapezoid => {
                let n = self.node_count;
                let h = 2.0 * l / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        let w = if k == 0 || k == n - 1 { 0.5 * h } else { h };
                        (-l + h * k as f64, w)
                    })
                    .collect()
            }
        }
    }
}

/// `∫ conj(φ_n(x+iA))·(−1)^m·φ_m(−x+iA) dx` for all `n, m ≤ n_max`.
fn gram_raw(n_max: usize, a: f64, b: f64, scheme: &QuadratureScheme) -> Vec<Vec<Complex64>> {
    let mut g = vec![vec![Complex64::new(0.0, 0.0); n_max + 1]; n_max + 1];
    for (x, w) in scheme.nodes_weights() {
        let left = eval_all(n_max, a, b, x);
        let right = eval_all(n_max, a, b, -x);
        for (n, ln) in left.iter().enumerate() {
            let lc = ln.conj() * w;
            for (m, rm) in right.iter().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                g[n][m] += lc * rm * sign;
            }
        }
    }
    g
}

fn check_inputs(n_max: usize, params: &ModelParams, scheme: &QuadratureScheme) -> Result<()> {
    if n_max > MAX_DEGREE {
        return Err(Error::DegreeLimit {
            degree: n_max,
            max: MAX_DEGREE,
        });
    }
    if !params.a.is_finite() || !params.b.is_finite() {
        return Err(Error::InvalidParameter("A and B must be finite".into()));
    }
    scheme.validate(n_max, params.a, params.b)
}

/// Contour inner product `⟨n|PV|m⟩` along `X = x + iA`, checked against a
/// run with twice the nodes.
pub fn contour_inner_product(
    n: usize,
    m: usize,
    params: &ModelParams,
    scheme: &QuadratureScheme,
) -> Result<Complex64> {
    let top = n.max(m);
    check_inputs(top, params, scheme)?;
    let coarse = gram_raw(top, params.a, params.b, scheme)[n][m];
    let fine = gram_raw(top, params.a, params.b, &scheme.doubled())[n][m];
    let change = (fine - coarse).norm();
    if !(change <= DOUBLING_TOL) {
        return Err(Error::InsufficientQuadrature { change });
    }
    Ok(fine)
}

/// Contour Gram matrix over `0 ≤ n, m ≤ n_max`.
#[derive(Debug, Clone, Serialize)]
pub struct GramMatrix {
    pub n_max: usize,
    pub params: ModelParams,
    pub scheme: QuadratureScheme,
    pub entries: Vec<Vec<Complex64>>,
    /// `max |G − I|`.
    pub max_deviation: f64,
    /// Largest entry change when the node count is doubled.
    pub doubling_change: f64,
    /// `max |G − Gᵀ|` plus the largest imaginary part.
    pub symmetry_deviation: f64,
}

pub fn gram_matrix(
    n_max: usize,
    params: &ModelParams,
    scheme: &QuadratureScheme,
) -> Result<GramMatrix> {
    check_inputs(n_max, params, scheme)?;
    let coarse = gram_raw(n_max, params.a, params.b, scheme);
    let fine = gram_raw(n_max, params.a, params.b, &scheme.doubled());
    let mut doubling_change = 0.0f64;
    let mut max_deviation = 0.0f64;
    let mut symmetry_deviation = 0.0f64;
    for n in 0..=n_max {
        for m in 0..=n_max {
            doubling_change = doubling_change.max((fine[n][m] - coarse[n][m]).norm());
            let delta = if n == m { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((fine[n][m] - Complex64::new(delta, 0.0)).norm());
            symmetry_deviation = symmetry_deviation
                .max((fine[n][m] - fine[m][n]).norm())
                .max(fine[n][m].im.abs());
        }
    }
    if !(doubling_change <= DOUBLING_TOL) {
        return Err(Error::InsufficientQuadrature {
            change: doubling_change,
        });
    }
    Ok(GramMatrix {
        n_max,
        params: *params,
        scheme: *scheme,
        entries: fine,
        max_deviation,
        doubling_change,
        symmetry_deviation,
    })
}

impl GramMatrix {
    /// The Gram matrix in the operator JSON dump layout.
    pub fn as_operator(&self) -> ComplexOperator {
        let d = self.n_max + 1;
        ComplexOperator::from_fn(BasisTag::SingleMode(d), |i, j| self.entries[i][j])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.as_operator())?)
    }

    /// Rows `n, m, re, im, |entry − δ|`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "m", "re", "im", "abs_dev"])?;
        for (n, row) in self.entries.iter().enumerate() {
            for (m, z) in row.iter().enumerate() {
                let delta = if n == m { 1.0 } else { 0.0 };
                let dev = (z - Complex64::new(delta, 0.0)).norm();
                w.write_record([
                    n.to_string(),
                    m.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                    fmt_f64(dev),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Matrix-level Gram matrix `⟨n|η₊|m⟩` of a single mode for `n, m ≤ n_max`.
///
/// Each eigenfunction is expanded in the first `cutoff` Hermite functions by
/// quadrature on the real axis, then paired through the truncated metric
/// `P·(−1)^{h−½}`. Nothing here uses the contour shift, so it is an
/// independent route to the same numbers as [`gram_matrix`].
pub fn metric_gram(n_max: usize, params: &ModelParams) -> Result<Vec<Vec<Complex64>>> {
    let cutoff = params.cutoff;
    if n_max >= cutoff {
        return Err(Error::InvalidTruncation(format!(
            "n_max = {n_max} needs cutoff above it, got {cutoff}"
        )));
    }
    let mode = ModeOperators::new(cutoff, params.a, params.b)?;
    let eta = &mode.parity * &mode.v_factor()?.op;
    let scheme = QuadratureScheme {
        half_width: required_half_width(cutoff, params.a, params.b),
        node_count: 40 * cutoff.max(MIN_NODES / 40),
        rule: QuadratureRule::GaussLegendreComposite,
    };
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); cutoff]; n_max + 1];
    for (x, w) in scheme.nodes_weights() {
        let basis = eval_all(cutoff - 1, 0.0, 0.0, x);
        let psi = eval_all(n_max, params.a, params.b, x);
        for (row, p) in coeffs.iter_mut().zip(&psi) {
            for (c, h) in row.iter_mut().zip(&basis) {
                *c += h.re * w * p;
            }
        }
    }
    let images: Vec<Vec<Complex64>> = coeffs.iter().map(|c| eta.apply(c)).collect();
    Ok(coeffs
        .iter()
        .map(|cn| {
            images
                .iter()
                .map(|im| cn.iter().zip(im).map(|(a, b)| a.conj() * b).sum())
                .collect()
        })
        .collect())
}

/// Difference between the `(0,0)` contour integral and the real-axis
/// Gaussian `π^{−1/2}∫e^{−x²}dx` on the same nodes.
pub fn contour_independence_deviation(params: &ModelParams, scheme: &QuadratureScheme) -> Result<f64> {
    check_inputs(0, params, scheme)?;
    let contour = gram_raw(0, params.a, params.b, scheme)[0][0];
    let reference: f64 = scheme
        .nodes_weights()
        .iter()
        .map(|&(x, w)| w * (-x * x).exp())
        .sum::<f64>()
        / std::f64::consts::PI.sqrt();
    Ok((contour - Complex64::new(reference, 0.0)).norm())
}

/// Largest integrand magnitude at `x = ±L` relative to its peak on the
/// nodes, over all `n, m ≤ n_max`.
pub fn tail_ratio(n_max: usize, params: &ModelParams, scheme: &QuadratureScheme) -> Result<f64> {
    check_inputs(n_max, params, scheme)?;
    let integrand = |x: f64| -> Vec<f64> {
        let l = eval_all(n_max, params.a, params.b, x);
        let r = eval_all(n_max, params.a, params.b, -x);
        l.iter()
            .flat_map(|ln| r.iter().map(move |rm| (ln.conj() * rm).norm()))
            .collect()
    };
    let mut peak = vec![0.0f64; (n_max + 1) * (n_max + 1)];
    for (x, _) in scheme.nodes_weights() {
        for (p, v) in peak.iter_mut().zip(integrand(x)) {
            *p = p.max(v);
        }
    }
    let l = scheme.half_width;
    let mut worst = 0.0f64;
    for edge in [-l, l] {
        for (p, v) in peak.iter().zip(integrand(edge)) {
            if *p > 0.0 {
                worst = worst.max(v / p);
            }
        }
    }
    Ok(worst)
}
