//! Position-space eigenfunctions and the shifted-contour inner products,
//! evaluated by quadrature as a check independent of the matrix metric.

mod quadrature;
mod wavefunction;

pub use quadrature::{
    contour_independence_deviation, contour_inner_product, gram_matrix, metric_gram, required_half_width,
    tail_ratio, GramMatrix, QuadratureRule, QuadratureScheme, DOUBLING_TOL, MIN_NODES,
    PANEL_NODES,
};
pub use wavefunction::{eval_all, eval_wavefunction, hermite, Wavefunction, MAX_DEGREE};
