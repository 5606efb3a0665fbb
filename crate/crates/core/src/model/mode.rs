use num_complex::Complex64;

use crate::error::Result;
use crate::opalg::{
    matrix_power_of_minus_one_with, position_momentum, single_mode_parity, BasisTag,
    ComplexOperator, IntegerBranch, MinusOnePower,
};

/// Single-mode operators of a shifted oscillator `½(P² + X²)` with
/// `X = x + i·shift_x` and `P = p + i·shift_p`.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub x: ComplexOperator,
    pub p: ComplexOperator,
    pub big_x: ComplexOperator,
    pub big_p: ComplexOperator,
    /// `½(P² + X²)`.
    pub h: ComplexOperator,
    /// `(X + iP)/√2`.
    pub a: ComplexOperator,
    /// `(X − iP)/√2`.
    pub a_ddag: ComplexOperator,
    /// `a‡·a`.
    pub n: ComplexOperator,
    /// `diag((−1)ⁿ)`.
    pub parity: ComplexOperator,
}

impl ModeOperators {
    pub fn new(cutoff: usize, shift_x: f64, shift_p: f64) -> Result<Self> {
        let (x, p) = position_momentum(cutoff)?;
        let big_x = x.shifted(Complex64::new(0.0, shift_x));
        let big_p = p.shifted(Complex64::new(0.0, shift_p));
        let h = (&(&big_p * &big_p) + &(&big_x * &big_x)).scale_real(0.5);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ip = big_p.scale(Complex64::new(0.0, 1.0));
        let a = (&big_x + &ip).scale_real(s);
        let a_ddag = (&big_x - &ip).scale_real(s);
        let n = &a_ddag * &a;
        Ok(ModeOperators {
            x,
            p,
            big_x,
            big_p,
            h,
            a,
            a_ddag,
            n,
            parity: single_mode_parity(cutoff),
        })
    }

    pub fn basis(&self) -> BasisTag {
        self.h.basis()
    }

    /// `(−1)^{h − ½}` on this mode, rounding every eigenvalue to the nearest
    /// integer; truncation-edge eigenvalues are complex and get counted in
    /// `nonconverged`.
    pub fn v_factor(&self) -> Result<MinusOnePower> {
        matrix_power_of_minus_one_with(&self.h, 0.5, IntegerBranch::Nearest)
    }
}
