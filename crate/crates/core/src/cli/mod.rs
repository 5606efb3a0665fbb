//! Command-line front end: argument parsing, dispatch to the numerical
//! modules and report emission.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    build_model, evolve_check, ground_state, n_particle_from, spectrum_numeric, verify_ladder,
    verify_model, EvolutionReport, ModelParams, SpectrumTable,
};
use crate::ncmodel::{
    build_nc_structure, first_order_scaling_check, multiplet_splittings, nc_spectrum_exact,
    nc_spectrum_numeric, verify_nc, NCParams, ScalingReport,
};
use crate::opalg::MetricSummary;
use crate::position::{
    contour_independence_deviation, gram_matrix, metric_gram, GramMatrix, QuadratureScheme,
    DOUBLING_TOL,
};
use crate::report::{all_pass, CheckRecord};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Spectrum,
    NcSpectrum,
    Verify,
    Quadrature,
    Evolve,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "pseudoherm", version, about = "Pseudo-Hermitian oscillator toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest levels of the commutative model against the closed form.
    Spectrum(Flags),
    /// Lowest levels of the noncommutative model against first order.
    NcSpectrum(Flags),
    /// Metric, ladder-algebra and pseudo-Hermiticity checks.
    Verify(Flags),
    /// Contour-integral Gram matrix of the position-space eigenfunctions.
    Quadrature(Flags),
    /// Metric norm of an evolving state.
    Evolve(Flags),
    /// Quadratic scaling of the first-order residuals.
    Scaling(Flags),
}

#[derive(Debug, Clone, Args)]
struct Flags {
    #[arg(long = "A", default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long = "B", default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta_tilde: f64,
    #[arg(long, default_value_t = 30)]
    cutoff: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    t_max: f64,
    #[arg(long, default_value_t = 50)]
    t_steps: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

/// A fully defaulted run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub theta: f64,
    pub theta_tilde: f64,
    pub cutoff: usize,
    pub count: usize,
    pub n_max: usize,
    pub t_max: f64,
    pub t_steps: usize,
    pub out_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Defaults for `command`, as if no flags were given.
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            a: 0.0,
            b: 0.0,
            theta: 0.0,
            theta_tilde: 0.0,
            cutoff: 30,
            count: 10,
            n_max: 5,
            t_max: 10.0,
            t_steps: 50,
            out_path: None,
            format: OutputFormat::Json,
        }
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.a, self.b, self.cutoff)
    }

    pub fn nc_params(&self) -> Result<NCParams> {
        NCParams::new(self.model_params()?, self.theta, self.theta_tilde)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("A", self.a),
            ("B", self.b),
            ("theta", self.theta),
            ("theta-tilde", self.theta_tilde),
            ("t-max", self.t_max),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("--{name} must be finite")));
            }
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("--count must be positive".into()));
        }
        if self.t_steps == 0 {
            return Err(Error::InvalidParameter("--t-steps must be positive".into()));
        }
        if self.t_max < 0.0 {
            return Err(Error::InvalidParameter("--t-max must be non-negative".into()));
        }
        self.model_params()?;
        if self.theta != 0.0 || self.theta_tilde != 0.0 {
            self.nc_params()?;
        }
        Ok(())
    }

    /// Evenly spaced times `0, t_max/t_steps, …, t_max`.
    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.t_steps)
            .map(|k| self.t_max * k as f64 / self.t_steps as f64)
            .collect()
    }
}

/// Parses arguments (including the program name) into a validated config.
/// Errors carry clap's usage message; parameter-guard violations are
/// reported the same way.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, f) = match cli.command {
        Command::Spectrum(f) => (CommandKind::Spectrum, f),
        Command::NcSpectrum(f) => (CommandKind::NcSpectrum, f),
        Command::Verify(f) => (CommandKind::Verify, f),
        Command::Quadrature(f) => (CommandKind::Quadrature, f),
        Command::Evolve(f) => (CommandKind::Evolve, f),
        Command::Scaling(f) => (CommandKind::Scaling, f),
    };
    let config = RunConfig {
        command,
        a: f.a,
        b: f.b,
        theta: f.theta,
        theta_tilde: f.theta_tilde,
        cutoff: f.cutoff,
        count: f.count,
        n_max: f.n_max,
        t_max: f.t_max,
        t_steps: f.t_steps,
        out_path: f.out,
        format: f.format,
    };
    config.validate().map_err(|e| {
        use clap::CommandFactory;
        Cli::command().error(clap::error::ErrorKind::ValueValidation, e.to_string())
    })?;
    Ok(config)
}

/// Table attached to a report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportTable {
    Spectrum(SpectrumTable),
    Gram(GramMatrix),
    Evolution(EvolutionReport),
    Scaling(ScalingReport),
    Metric(MetricSummary),
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub schema_version: u32,
    pub config_echo: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub tables: Option<ReportTable>,
    /// Message of the error that stopped the run, if any.
    pub error: Option<String>,
    pub wallclock_ms: u64,
    #[serde(skip)]
    pub exit_code: i32,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.error.is_none() && all_pass(&self.checks)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV rendering: the spectrum, Gram or time table when present,
    /// otherwise one row per check.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        match &self.tables {
            Some(ReportTable::Spectrum(t)) => t.write_csv(out),
            Some(ReportTable::Gram(g)) => g.write_csv(out),
            Some(ReportTable::Evolution(e)) => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(["t", "eta_norm", "eta_norm_imag"])?;
                for ((t, re), im) in e.times.iter().zip(&e.eta_norms).zip(&e.eta_norms_imag) {
                    w.write_record([fmt(*t), fmt(*re), fmt(*im)])?;
                }
                w.flush()?;
                Ok(())
            }
            _ => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(["name", "norm_type", "deviation", "tolerance", "bound", "pass"])?;
                for c in &self.checks {
                    let bound = serde_json::to_value(c.bound)?;
                    w.write_record([
                        c.name.clone(),
                        c.norm_type.clone(),
                        fmt(c.deviation),
                        fmt(c.tolerance),
                        bound.as_str().unwrap_or_default().to_string(),
                        c.pass.to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }

    pub fn render(&self) -> Result<Vec<u8>> {
        match self.config_echo.format {
            OutputFormat::Json => {
                let mut s = self.to_json()?;
                s.push('\n');
                Ok(s.into_bytes())
            }
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                Ok(buf)
            }
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

struct Outcome {
    checks: Vec<CheckRecord>,
    table: Option<ReportTable>,
}

/// Runs the configured command. Module errors end up in the report rather
/// than being returned.
pub fn run(config: &RunConfig) -> Report {
    let start = Instant::now();
    let result = config.validate().and_then(|()| dispatch(config));
    let (checks, tables, error, exit_code) = match result {
        Ok(o) => {
            let code = if all_pass(&o.checks) {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            };
            (o.checks, o.table, None, code)
        }
        Err(e) => {
            let code = if e.is_numerical() {
                EXIT_NUMERICAL
            } else if is_input_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_CHECK_FAILED
            };
            let record = CheckRecord::failed(format!("{:?}", config.command), "error", 0.0);
            (vec![record], None, Some(e.to_string()), code)
        }
    };
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: SCHEMA_VERSION,
        config_echo: config.clone(),
        checks,
        tables,
        error,
        wallclock_ms: start.elapsed().as_millis() as u64,
        exit_code,
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::InvalidTruncation(_)
            | Error::TruncationSafety { .. }
            | Error::DegreeLimit { .. }
    )
}

fn dispatch(config: &RunConfig) -> Result<Outcome> {
    match config.command {
        CommandKind::Spectrum => run_spectrum(config),
        CommandKind::NcSpectrum => run_nc_spectrum(config),
        CommandKind::Verify => run_verify(config),
        CommandKind::Quadrature => run_quadrature(config),
        CommandKind::Evolve => run_evolve(config),
        CommandKind::Scaling => run_scaling(config),
    }
}

fn run_spectrum(config: &RunConfig) -> Result<Outcome> {
    let ops = build_model(config.model_params()?)?;
    let table = spectrum_numeric(&ops, config.count)?;
    let width = multiplet_splittings(&table).into_values().fold(0.0, f64::max);
    let checks = vec![
        CheckRecord::upper("spectrum: residual", "max_abs", table.max_residual(), 1e-8),
        CheckRecord::upper("spectrum: |Im|", "max_abs", table.max_imag(), 1e-8),
        CheckRecord::upper("spectrum: multiplet width", "max_abs", width, 1e-8),
    ];
    Ok(Outcome {
        checks,
        table: Some(ReportTable::Spectrum(table)),
    })
}

fn run_nc_spectrum(config: &RunConfig) -> Result<Outcome> {
    let p = config.nc_params()?;
    let table = nc_spectrum_numeric(&p, config.count)?;
    let exact = table
        .rows
        .iter()
        .map(|r| (r.numeric() - Complex64::new(nc_spectrum_exact(r.n1, r.n2, &p), 0.0)).norm())
        .fold(0.0, f64::max);
    let mut checks = vec![
        CheckRecord::upper("nc_spectrum: first-order residual", "max_abs", table.max_residual(), 1e-3),
        CheckRecord::upper("nc_spectrum: exact residual", "max_abs", exact, 1e-8),
        CheckRecord::upper("nc_spectrum: |Im|", "max_abs", table.max_imag(), 1e-8),
    ];
    if let Some(g) = table.rows.iter().find(|r| r.n1 == 0 && r.n2 == 0) {
        let shift = (g.numeric_re - 1.0 - p.base.energy_offset()).abs();
        checks.push(CheckRecord::upper("nc_spectrum: ground shift", "abs", shift, 1e-3));
    }
    if p.theta + p.theta_tilde == 0.0 {
        let width = multiplet_splittings(&table).into_values().fold(0.0, f64::max);
        checks.push(CheckRecord::upper("nc_spectrum: multiplet splitting", "max_abs", width, 1e-3));
    }
    Ok(Outcome {
        checks,
        table: Some(ReportTable::Spectrum(table)),
    })
}

fn run_verify(config: &RunConfig) -> Result<Outcome> {
    let ops = build_model(config.model_params()?)?;
    let mut checks = verify_model(&ops)?;
    checks.extend(verify_ladder(&ops, config.n_max)?);
    let mut summary = ops.metric.summary();
    if config.theta != 0.0 || config.theta_tilde != 0.0 {
        let nc = build_nc_structure(&config.nc_params()?)?;
        checks.extend(verify_nc(&nc)?);
        summary = nc.metric.summary();
    }
    Ok(Outcome {
        checks,
        table: Some(ReportTable::Metric(summary)),
    })
}

fn run_quadrature(config: &RunConfig) -> Result<Outcome> {
    let params = config.model_params()?;
    let scheme = QuadratureScheme::for_degree(config.n_max, &params);
    let gram = gram_matrix(config.n_max, &params, &scheme)?;
    let mut checks = vec![
        CheckRecord::upper("quadrature: G - I", "max_abs", gram.max_deviation, 1e-8),
        CheckRecord::upper("quadrature: node doubling", "max_abs", gram.doubling_change, DOUBLING_TOL),
        CheckRecord::upper("quadrature: G - Gᵀ, Im G", "max_abs", gram.symmetry_deviation, 1e-8),
        CheckRecord::upper(
            "quadrature: contour independence",
            "abs",
            contour_independence_deviation(&params, &scheme)?,
            1e-9,
        ),
    ];
    let low = config.n_max.min(3);
    if low < params.cutoff {
        let matrix = metric_gram(low, &params)?;
        let dev = (0..=low)
            .flat_map(|n| (0..=low).map(move |m| (n, m)))
            .map(|(n, m)| (gram.entries[n][m] - matrix[n][m]).norm())
            .fold(0.0, f64::max);
        checks.push(CheckRecord::upper("quadrature: G - ⟨n|η₊|m⟩", "max_abs", dev, 1e-5));
    }
    Ok(Outcome {
        checks,
        table: Some(ReportTable::Gram(gram)),
    })
}

fn run_evolve(config: &RunConfig) -> Result<Outcome> {
    let ops = build_model(config.model_params()?)?;
    let ground = ground_state(&ops)?;
    let psi = n_particle_from(&ops, &ground, 1, 0)?;
    let report = evolve_check(&ops, &psi, &config.time_grid())?;
    let checks = vec![
        CheckRecord::upper("evolve: η₊-norm drift", "relative", report.max_relative_drift, 1e-8),
        CheckRecord::upper("evolve: Im η₊-norm", "relative", report.max_relative_imag, 1e-8),
    ];
    Ok(Outcome {
        checks,
        table: Some(ReportTable::Evolution(report)),
    })
}

fn run_scaling(config: &RunConfig) -> Result<Outcome> {
    let report = first_order_scaling_check(&config.nc_params()?)?;
    Ok(Outcome {
        checks: report.checks(),
        table: Some(ReportTable::Scaling(report)),
    })
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let report = run(&config);
    if let Some(msg) = &report.error {
        eprintln!("error: {msg}");
    }
    let bytes = match report.render() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    let written = match &config.out_path {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_CHECK_FAILED;
    }
    report.exit_code
}
