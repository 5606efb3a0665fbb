use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use super::operator::ComplexOperator;
use crate::error::{Error, Result};

// Padé(13) coefficients and the 1-norm bound below which it is accurate to
// double precision (Higham 2005).
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;
const MAX_SQUARINGS: i32 = 1000;

fn one_norm(m: &Mat<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.col(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn combo(terms: &[(f64, &Mat<Complex64>)], identity_coeff: f64, d: usize) -> Mat<Complex64> {
    let mut out = Mat::<Complex64>::zeros(d, d);
    for &(coef, m) in terms {
        out += m * faer::Scale(Complex64::new(coef, 0.0));
    }
    for i in 0..d {
        out[(i, i)] += Complex64::new(identity_coeff, 0.0);
    }
    out
}

/// Matrix exponential by Padé(13) scaling and squaring.
pub fn expm(m: &ComplexOperator) -> Result<ComplexOperator> {
    if !m.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let d = m.dim();
    let a0 = m.as_mat().to_owned();
    let norm = one_norm(&a0);
    if !norm.is_finite() {
        return Err(Error::ScalingFailure { norm });
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(Error::ScalingFailure { norm });
    }
    let a = &a0 * faer::Scale(Complex64::new(2f64.powi(-s), 0.0));
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;

    let inner_u = combo(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0, d);
    let outer_u = combo(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1], d);
    let u = &a * (&a6 * &inner_u + &outer_u);

    let inner_v = combo(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0, d);
    let outer_v = combo(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0], d);
    let v = &a6 * &inner_v + &outer_v;

    let num = &v + &u;
    let den = &v - &u;
    let mut r = den.partial_piv_lu().solve(&num);
    for _ in 0..s {
        r = &r * &r;
    }
    let out = ComplexOperator::from_mat_unchecked(r, m.basis());
    if !out.is_finite() {
        return Err(Error::ScalingFailure { norm });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::operator::{position_momentum, BasisTag, I};
    use std::f64::consts::PI;

    #[test]
    fn exponential_of_zero_and_diagonal() {
        let zero = ComplexOperator::zeros(BasisTag::SingleMode(3));
        assert!(expm(&zero).unwrap().max_abs_diff(&ComplexOperator::identity(zero.basis())) < 1e-15);

        let d = ComplexOperator::from_diagonal(
            BasisTag::SingleMode(2),
            &[Complex64::new(0.0, PI), Complex64::new(0.0, 0.0)],
        );
        let e = expm(&d).unwrap();
        let target = ComplexOperator::from_diagonal(
            d.basis(),
            &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        assert!(e.max_abs_diff(&target) < 1e-14);
    }

    #[test]
    fn rotation_generator_closed_form() {
        // exp(t·[[0,1],[−1,0]]) = [[cos t, sin t], [−sin t, cos t]]
        let t = 7.3;
        let g = ComplexOperator::from_rows(
            BasisTag::SingleMode(2),
            &[
                vec![Complex64::new(0.0, 0.0), Complex64::new(t, 0.0)],
                vec![Complex64::new(-t, 0.0), Complex64::new(0.0, 0.0)],
            ],
        )
        .unwrap();
        let e = expm(&g).unwrap();
        let (s, c) = t.sin_cos();
        assert!((e.get(0, 0).re - c).abs() < 1e-10 * c.abs().max(1.0));
        assert!((e.get(0, 1).re - s).abs() < 1e-10);
        assert!((e.get(1, 0).re + s).abs() < 1e-10);
    }

    #[test]
    fn nilpotent_exponential_is_finite_series() {
        let n = ComplexOperator::from_fn(BasisTag::SingleMode(3), |i, j| {
            if j == i + 1 {
                Complex64::new(2.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let e = expm(&n).unwrap();
        assert!((e.get(0, 2).re - 2.0).abs() < 1e-14);
        assert!((e.get(0, 1).re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_property_for_skew_generator() {
        let (x, p) = position_momentum(12).unwrap();
        let h = (&(&x * &x) + &(&p * &p)).scale_real(0.5);
        let u = expm(&h.scale(-I)).unwrap();
        let w = expm(&h.scale(I)).unwrap();
        let id = ComplexOperator::identity(h.basis());
        assert!((&u * &w).max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn overflow_is_a_scaling_failure() {
        let huge = ComplexOperator::from_diagonal(
            BasisTag::SingleMode(1 + 1),
            &[Complex64::new(1e300, 0.0), Complex64::new(1e300, 0.0)],
        );
        assert!(matches!(expm(&huge), Err(Error::ScalingFailure { .. })));
    }
}
