//! The two-mode oscillator with imaginary coordinate and momentum shifts,
//! its metric, ladder algebra, spectrum and time evolution.

mod build;
mod evolve;
mod mode;
mod params;
mod spectrum;
mod state;
mod verify;

pub use build::{
    build_metric, build_model, build_model_with_keep, closed_form_metric, hamiltonian_direct, hamiltonian_shifted,
    v_similarity_crosscheck, ModelOperators,
};
pub use evolve::{evolve_check, evolve_check_with, EvolutionReport, Propagator, CONVERGED_TOL};
pub use mode::ModeOperators;
pub use params::{ModelParams, MIN_CUTOFF};
pub use spectrum::{
    spectrum_analytic, spectrum_numeric, NcColumns, SpectrumRow, SpectrumTable,
};
pub use state::{ground_state, n_particle_from, n_particle_state, FockState, ANNIHILATION_LIMIT};
pub use verify::{verify_ladder, verify_model, ALGEBRAIC_TOL, CONSTRUCTION_TOL, SPECTRAL_TOL};

pub(crate) use spectrum::{check_count, fmt_f64, lowest_labels};
