use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::build::ModelOperators;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::opalg::eigenvalues_general;

/// One labelled level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n1: usize,
    pub n2: usize,
    pub analytic: f64,
    pub numeric_re: f64,
    pub numeric_im: f64,
    /// `|numeric − analytic|`.
    pub residual: f64,
}

impl SpectrumRow {
    pub fn numeric(&self) -> Complex64 {
        Complex64::new(self.numeric_re, self.numeric_im)
    }
}

/// Extra columns carried by noncommutative spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcColumns {
    pub theta: f64,
    pub theta_tilde: f64,
    /// Constant separating the two first-order forms of the coupled
    /// Hamiltonian (second order in the noncommutative parameters).
    pub order2_constant: f64,
}

/// Levels sorted by analytic energy, then `(n1, n2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nc: Option<NcColumns>,
}

impl SpectrumTable {
    /// Pairs labels with eigenvalues in sorted order: labels by
    /// `(analytic, n1, n2)`, eigenvalues by `(re, im)`.
    pub fn from_labels(
        mut labels: Vec<(usize, usize, f64)>,
        mut numeric: Vec<Complex64>,
    ) -> SpectrumTable {
        labels.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        numeric.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let rows = labels
            .into_iter()
            .zip(numeric)
            .map(|((n1, n2, analytic), z)| SpectrumRow {
                n1,
                n2,
                analytic,
                numeric_re: z.re,
                numeric_im: z.im,
                residual: (z - Complex64::new(analytic, 0.0)).norm(),
            })
            .collect();
        SpectrumTable { rows, nc: None }
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.rows.iter().map(|r| r.numeric_im.abs()).fold(0.0, f64::max)
    }

    pub fn numeric(&self) -> Vec<Complex64> {
        self.rows.iter().map(SpectrumRow::numeric).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n1", "n2", "analytic", "numeric_re", "numeric_im", "residual"];
        if self.nc.is_some() {
            header.extend(["theta", "theta_tilde", "order2_constant"]);
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.n1.to_string(),
                r.n2.to_string(),
                fmt_f64(r.analytic),
                fmt_f64(r.numeric_re),
                fmt_f64(r.numeric_im),
                fmt_f64(r.residual),
            ];
            if let Some(nc) = &self.nc {
                rec.extend([
                    fmt_f64(nc.theta),
                    fmt_f64(nc.theta_tilde),
                    fmt_f64(nc.order2_constant),
                ]);
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Shortest representation that round-trips.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// `(n1 + n2 + 1) + (A² + B²)`.
pub fn spectrum_analytic(n1: usize, n2: usize, params: &ModelParams) -> f64 {
    (n1 + n2 + 1) as f64 + params.energy_offset()
}

pub(crate) fn check_count(count: usize, params: &ModelParams) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be positive".into()));
    }
    if count > params.max_levels() {
        return Err(Error::TruncationSafety {
            requested: count,
            limit: params.max_levels(),
        });
    }
    Ok(())
}

/// The `count` lowest labels under `energy`, sorted as in [`SpectrumTable`].
pub(crate) fn lowest_labels(
    count: usize,
    cutoff: usize,
    energy: impl Fn(usize, usize) -> f64,
) -> Vec<(usize, usize, f64)> {
    let mut labels: Vec<(usize, usize, f64)> = (0..cutoff)
        .flat_map(|n1| (0..cutoff).map(move |n2| (n1, n2)))
        .map(|(n1, n2)| (n1, n2, energy(n1, n2)))
        .collect();
    labels.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    labels.truncate(count);
    labels
}

/// Lowest `count` eigenvalues of `H`, paired with the closed-form levels.
pub fn spectrum_numeric(ops: &ModelOperators, count: usize) -> Result<SpectrumTable> {
    check_count(count, &ops.params)?;
    let mut values = eigenvalues_general(&ops.h)?;
    values.truncate(count);
    let params = ops.params;
    let labels = lowest_labels(count, params.cutoff, |n1, n2| {
        spectrum_analytic(n1, n2, &params)
    });
    Ok(SpectrumTable::from_labels(labels, values))
}
