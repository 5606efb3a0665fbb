//! Dense complex operators on truncated Fock spaces and the metric-adjoint
//! machinery built on them.

mod expm;
mod metric;
mod operator;
mod spectral;

pub use expm::expm;
pub use metric::{
    hermitized_interior_extremes, interior_pseudo_adjoint, pseudo_adjoint, MetricBundle,
    MetricSummary,
};
pub use operator::{
    annihilation_matrix, commutator, default_keep, embed, interior_block, interior_commutator,
    interior_product, kron, position_momentum, single_mode_parity, BasisTag, ComplexOperator,
};
pub use spectral::{
    eig_general, eigenvalues_general, kronecker_sum_factors, matrix_power_of_minus_one,
    matrix_power_of_minus_one_with, IntegerBranch, MinusOnePower, SpectralDecomposition,
    BIORTHOGONALITY_TOLERANCE, INTEGER_TOLERANCE, NEAR_DEFECTIVE_CONDITION,
};
