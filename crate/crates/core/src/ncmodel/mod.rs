//! First-order noncommutative extension: Bopp-shifted Hamiltonian, the
//! metric `P𝒱`, chiral ladder operators and the corrected spectrum.

mod build;
mod params;
mod spectrum;
mod verify;

pub use build::{
    bopp_shift, build_nc_hamiltonian, build_nc_hamiltonian_via_bopp, build_nc_structure,
    build_nc_structure_with_keep, swap_modes, NCOperators,
};
pub use params::{NCParams, THETA_LIMIT};
pub use spectrum::{
    exact_constant, first_order_scaling_check, multiplet_splittings, nc_spectrum_analytic,
    nc_spectrum_exact, nc_spectrum_numeric, ScalingLevel, ScalingReport, SCALING_STRENGTHS,
    SCALING_WINDOW, TRUNCATION_FLOOR,
};
pub use verify::{commutative_reduction, verify_nc};
