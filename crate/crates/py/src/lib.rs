//! Python bindings: the commutative model, its noncommutative extension and
//! the contour Gram matrix.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pseudoherm::model::{
    build_model, evolve_check, ground_state, n_particle_state, spectrum_analytic,
    spectrum_numeric, verify_ladder, verify_model, ModelOperators, ModelParams, SpectrumTable,
};
use pseudoherm::ncmodel::{
    build_nc_structure, nc_spectrum_analytic, nc_spectrum_numeric, verify_nc, NCParams,
};
use pseudoherm::position::{gram_matrix, hermite as hermite_poly, QuadratureScheme};
use pseudoherm::report::CheckRecord;
use pseudoherm::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::InvalidTruncation(_) | Error::DegreeLimit { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// One row of a spectrum table.
#[pyclass(get_all, frozen, module = "pseudoherm_py")]
struct Level {
    n1: usize,
    n2: usize,
    analytic: f64,
    numeric: Complex64,
    residual: f64,
}

#[pymethods]
impl Level {
    fn __repr__(&self) -> String {
        format!(
            "Level(n1={}, n2={}, analytic={}, numeric={}, residual={:.3e})",
            self.n1, self.n2, self.analytic, self.numeric, self.residual
        )
    }
}

fn levels(table: &SpectrumTable) -> Vec<Level> {
    table
        .rows
        .iter()
        .map(|r| Level {
            n1: r.n1,
            n2: r.n2,
            analytic: r.analytic,
            numeric: r.numeric(),
            residual: r.residual,
        })
        .collect()
}

/// A named deviation and whether it is inside its tolerance.
#[pyclass(get_all, frozen, module = "pseudoherm_py")]
struct Check {
    name: String,
    norm_type: String,
    deviation: f64,
    tolerance: f64,
    passed: bool,
}

#[pymethods]
impl Check {
    fn __repr__(&self) -> String {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        format!("Check({}: {:.3e} vs {:.0e}, {verdict})", self.name, self.deviation, self.tolerance)
    }
}

fn checks(records: Vec<CheckRecord>) -> Vec<Check> {
    records
        .into_iter()
        .map(|c| Check {
            passed: c.pass,
            name: c.name,
            norm_type: c.norm_type,
            deviation: c.deviation,
            tolerance: c.tolerance,
        })
        .collect()
}

/// `η₊`-norm history of an evolved state.
#[pyclass(get_all, frozen, module = "pseudoherm_py")]
struct Evolution {
    times: Vec<f64>,
    eta_norms: Vec<f64>,
    max_relative_drift: f64,
}

/// The commutative two-mode model at fixed `A`, `B` and cutoff.
#[pyclass(frozen, module = "pseudoherm_py")]
struct Model {
    ops: ModelOperators,
}

#[pymethods]
impl Model {
    #[new]
    #[pyo3(signature = (a, b, cutoff = 30))]
    fn new(a: f64, b: f64, cutoff: usize) -> PyResult<Self> {
        let params = ModelParams::new(a, b, cutoff).map_err(to_py)?;
        Ok(Model { ops: build_model(params).map_err(to_py)? })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.ops.params.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.ops.params.b
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.ops.cutoff()
    }

    #[pyo3(signature = (count = 10))]
    fn spectrum(&self, count: usize) -> PyResult<Vec<Level>> {
        Ok(levels(&spectrum_numeric(&self.ops, count).map_err(to_py)?))
    }

    /// Construction, metric and ladder checks.
    fn verify(&self) -> PyResult<Vec<Check>> {
        verify_model(&self.ops).map(checks).map_err(to_py)
    }

    #[pyo3(signature = (n_max = 5))]
    fn verify_ladder(&self, n_max: usize) -> PyResult<Vec<Check>> {
        verify_ladder(&self.ops, n_max).map(checks).map_err(to_py)
    }

    /// Amplitudes of `|n₁,n₂⟩`, normalized in the `η₊` inner product.
    #[pyo3(signature = (n1 = 0, n2 = 0))]
    fn state(&self, n1: usize, n2: usize) -> PyResult<Vec<Complex64>> {
        let s = if (n1, n2) == (0, 0) {
            ground_state(&self.ops)
        } else {
            n_particle_state(&self.ops, n1, n2)
        };
        Ok(s.map_err(to_py)?.amplitudes)
    }

    /// Evolves `|n₁,n₂⟩` on an even grid over `[0, t_max]`.
    #[pyo3(signature = (t_max = 10.0, steps = 50, n1 = 0, n2 = 0))]
    fn evolve(&self, t_max: f64, steps: usize, n1: usize, n2: usize) -> PyResult<Evolution> {
        if steps == 0 {
            return Err(PyValueError::new_err("steps must be positive"));
        }
        let psi0 = n_particle_state(&self.ops, n1, n2).map_err(to_py)?;
        let grid: Vec<f64> = (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect();
        let r = evolve_check(&self.ops, &psi0, &grid).map_err(to_py)?;
        Ok(Evolution {
            times: r.times,
            eta_norms: r.eta_norms,
            max_relative_drift: r.max_relative_drift,
        })
    }

    fn __repr__(&self) -> String {
        let p = &self.ops.params;
        format!("Model(a={}, b={}, cutoff={})", p.a, p.b, p.cutoff)
    }
}

#[pyfunction]
fn energy(n1: usize, n2: usize, a: f64, b: f64) -> PyResult<f64> {
    let params = ModelParams::new(a, b, 30).map_err(to_py)?;
    Ok(spectrum_analytic(n1, n2, &params))
}

fn nc_params(a: f64, b: f64, theta: f64, theta_tilde: f64, cutoff: usize) -> PyResult<NCParams> {
    let base = ModelParams::new(a, b, cutoff).map_err(to_py)?;
    NCParams::new(base, theta, theta_tilde).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n1, n2, a, b, theta, theta_tilde))]
fn nc_energy(n1: usize, n2: usize, a: f64, b: f64, theta: f64, theta_tilde: f64) -> PyResult<f64> {
    Ok(nc_spectrum_analytic(n1, n2, &nc_params(a, b, theta, theta_tilde, 30)?))
}

/// Lowest levels of the noncommutative Hamiltonian.
#[pyfunction]
#[pyo3(signature = (a, b, theta, theta_tilde, cutoff = 30, count = 10))]
fn nc_spectrum(
    a: f64,
    b: f64,
    theta: f64,
    theta_tilde: f64,
    cutoff: usize,
    count: usize,
) -> PyResult<Vec<Level>> {
    let p = nc_params(a, b, theta, theta_tilde, cutoff)?;
    Ok(levels(&nc_spectrum_numeric(&p, count).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (a, b, theta, theta_tilde, cutoff = 30))]
fn verify_noncommutative(
    a: f64,
    b: f64,
    theta: f64,
    theta_tilde: f64,
    cutoff: usize,
) -> PyResult<Vec<Check>> {
    let ops = build_nc_structure(&nc_params(a, b, theta, theta_tilde, cutoff)?).map_err(to_py)?;
    verify_nc(&ops).map(checks).map_err(to_py)
}

/// Contour Gram matrix `⟨φₙ|φₘ⟩` for `0 ≤ n, m ≤ n_max`.
#[pyfunction]
fn gram(n_max: usize, a: f64, b: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let params = ModelParams::new(a, b, 30).map_err(to_py)?;
    let scheme = QuadratureScheme::for_degree(n_max, &params);
    Ok(gram_matrix(n_max, &params, &scheme).map_err(to_py)?.entries)
}

#[pyfunction]
fn hermite(n: usize, z: Complex64) -> PyResult<Complex64> {
    hermite_poly(n, z).map_err(to_py)
}

#[pymodule]
fn pseudoherm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Model>()?;
    m.add_class::<Level>()?;
    m.add_class::<Check>()?;
    m.add_class::<Evolution>()?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(nc_energy, m)?)?;
    m.add_function(wrap_pyfunction!(nc_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(verify_noncommutative, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    Ok(())
}
