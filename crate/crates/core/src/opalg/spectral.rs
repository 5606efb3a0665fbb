use std::cmp::Ordering;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use super::operator::{kron, BasisTag, ComplexOperator, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvector-matrix condition number above which spectral calculus is
/// refused.
pub const NEAR_DEFECTIVE_CONDITION: f64 = 1e8;

/// Largest tolerated `‖left·right − I‖_max` after normalization.
pub const BIORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// Distance from an integer beyond which an eigenvalue is not treated as
/// belonging to an integer spectrum.
pub const INTEGER_TOLERANCE: f64 = 0.1;

/// Right and left eigenvectors of a diagonalizable matrix, paired so that
/// `left · right = I`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Unit 2-norm eigenvectors as columns.
    pub right_vectors: Mat<Complex64>,
    /// Dual vectors as rows.
    pub left_vectors: Mat<Complex64>,
    /// Ratio of extreme singular values of `right_vectors`.
    pub condition: f64,
    pub biorthogonality_error: f64,
    basis: BasisTag,
}

impl SpectralDecomposition {
    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    /// `right · diag(f(λ)) · left`.
    pub fn apply_function(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexOperator {
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.recombine(&values)
    }

    pub(crate) fn recombine(&self, values: &[Complex64]) -> ComplexOperator {
        let d = self.eigenvalues.len();
        let mut scaled = self.right_vectors.clone();
        for (j, v) in values.iter().enumerate() {
            for i in 0..d {
                scaled[(i, j)] *= *v;
            }
        }
        ComplexOperator::from_mat_unchecked(&scaled * &self.left_vectors, self.basis)
    }

    /// `‖right·diag(λ)·left − m‖_max`.
    pub fn reconstruction_error(&self, m: &ComplexOperator) -> f64 {
        self.apply_function(|l| l).max_abs_diff(m)
    }

    pub fn right_vector(&self, k: usize) -> Vec<Complex64> {
        self.right_vectors.col(k).iter().copied().collect()
    }
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues sorted by real part, then imaginary part.
pub fn eigenvalues_general(m: &ComplexOperator) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigenvalue input"));
    }
    let mut values = m.as_mat().eigenvalues().map_err(|_| Error::EigenSolver)?;
    values.sort_by(cmp_complex);
    Ok(values)
}

/// Full biorthogonal eigendecomposition.
///
/// Fails with [`Error::NearDefective`] when the eigenvector matrix has a
/// condition number above [`NEAR_DEFECTIVE_CONDITION`] or the dual vectors
/// cannot be normalized against it.
pub fn eig_general(m: &ComplexOperator) -> Result<SpectralDecomposition> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigendecomposition input"));
    }
    let d = m.dim();
    let evd = m.as_mat().eigen().map_err(|_| Error::EigenSolver)?;
    let s = evd.S().column_vector();
    let u = evd.U();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| cmp_complex(&s[i], &s[j]));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| s[k]).collect();

    let mut right = Mat::<Complex64>::from_fn(d, d, |i, j| u[(i, order[j])]);
    for j in 0..d {
        let norm = right.col(j).norm_l2();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NearDefective {
                condition: f64::INFINITY,
                biorthogonality: f64::INFINITY,
            });
        }
        for i in 0..d {
            right[(i, j)] /= norm;
        }
    }

    let sv = right.singular_values().map_err(|_| Error::EigenSolver)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= NEAR_DEFECTIVE_CONDITION) {
        return Err(Error::NearDefective {
            condition,
            biorthogonality: f64::NAN,
        });
    }

    let left = right.partial_piv_lu().inverse();
    let product = &left * &right;
    let mut biorthogonality_error = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            let target = if i == j { ONE } else { ZERO };
            biorthogonality_error = biorthogonality_error.max((product[(i, j)] - target).norm());
        }
    }
    if !(biorthogonality_error < BIORTHOGONALITY_TOLERANCE) {
        return Err(Error::NearDefective {
            condition,
            biorthogonality: biorthogonality_error,
        });
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        condition,
        biorthogonality_error,
        basis: m.basis(),
    })
}

/// How `(−1)^λ` treats eigenvalues that are not close to an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegerBranch {
    /// Refuse with [`Error::SpectrumNotInteger`].
    Strict,
    /// Round the real part anyway and count the offenders.
    Nearest,
}

/// Result of [`matrix_power_of_minus_one_with`].
#[derive(Debug, Clone)]
pub struct MinusOnePower {
    pub op: ComplexOperator,
    /// Eigenvalues farther than [`INTEGER_TOLERANCE`] from an integer.
    pub nonconverged: usize,
    pub worst: Complex64,
    pub worst_distance: f64,
    /// Eigenvector condition number of the decomposition actually used.
    pub condition: f64,
    /// Whether the input was split as a Kronecker sum of two single-mode
    /// operators.
    pub factorized: bool,
}

fn distance_to_integer(l: Complex64) -> f64 {
    (l - Complex64::new(l.re.round(), 0.0)).norm()
}

fn sign_of(l: Complex64) -> Complex64 {
    // rem_euclid keeps negative integers on the right branch.
    if (l.re.round() as i64).rem_euclid(2) == 0 {
        ONE
    } else {
        -ONE
    }
}

struct Signed {
    op: ComplexOperator,
    nonconverged: usize,
    worst: Complex64,
    worst_distance: f64,
    condition: f64,
}

fn signed_power(m: &ComplexOperator, shift: f64, branch: IntegerBranch) -> Result<Signed> {
    let dec = eig_general(m)?;
    let shifted: Vec<Complex64> = dec
        .eigenvalues
        .iter()
        .map(|&l| l - Complex64::new(shift, 0.0))
        .collect();
    let mut worst = ZERO;
    let mut worst_distance = 0.0f64;
    let mut nonconverged = 0;
    for &l in &shifted {
        let dist = distance_to_integer(l);
        if dist >= INTEGER_TOLERANCE {
            nonconverged += 1;
        }
        if dist > worst_distance {
            worst_distance = dist;
            worst = l;
        }
    }
    if branch == IntegerBranch::Strict && nonconverged > 0 {
        return Err(Error::SpectrumNotInteger {
            worst,
            distance: worst_distance,
        });
    }
    let signs: Vec<Complex64> = shifted.iter().map(|&l| sign_of(l)).collect();
    Ok(Signed {
        op: dec.recombine(&signs),
        nonconverged,
        worst,
        worst_distance,
        condition: dec.condition,
    })
}

/// Splits a two-mode operator as `h1 ⊗ I + I ⊗ h2` when it has that form to
/// within rounding.
pub fn kronecker_sum_factors(m: &ComplexOperator) -> Option<(ComplexOperator, ComplexOperator)> {
    let BasisTag::TwoMode(c) = m.basis() else {
        return None;
    };
    let single = BasisTag::SingleMode(c);
    let mat = m.as_mat();
    // Block (0,0) is h1[0,0]·I + h2; column/row 0 of mode 2 gives h1 + h2[0,0]·I.
    let h2 = ComplexOperator::from_fn(single, |j, l| mat[(j, l)]);
    let corner = h2.get(0, 0);
    let h1 = ComplexOperator::from_fn(single, |i, k| {
        let v = mat[(i * c, k * c)];
        if i == k {
            v - corner
        } else {
            v
        }
    });
    let id = ComplexOperator::identity(single);
    let rebuilt = &kron(&h1, &id).ok()? + &kron(&id, &h2).ok()?;
    let scale = m.max_abs().max(1.0);
    (rebuilt.max_abs_diff(m) <= 64.0 * f64::EPSILON * scale).then_some((h1, h2))
}

/// Moves the fractional offset of `h1`'s lowest eigenvalue onto `h2`, so that
/// each factor has a near-integer spectrum whenever the sum does.
fn balance_split(
    h1: ComplexOperator,
    h2: ComplexOperator,
) -> Result<(ComplexOperator, ComplexOperator)> {
    let values = eigenvalues_general(&h1)?;
    let lowest = values.first().copied().unwrap_or(ZERO);
    let offset = lowest - Complex64::new(lowest.re.round(), 0.0);
    Ok((h1.shifted(-offset), h2.shifted(offset)))
}

/// `(−1)^{M − shift}` by spectral calculus, refusing non-integer spectra.
pub fn matrix_power_of_minus_one(m: &ComplexOperator, shift: f64) -> Result<ComplexOperator> {
    Ok(matrix_power_of_minus_one_with(m, shift, IntegerBranch::Strict)?.op)
}

/// `(−1)^{M − shift}` with an explicit branch policy.
///
/// A two-mode Kronecker sum `h1 ⊗ I + I ⊗ h2` is evaluated as
/// `(−1)^{h1} ⊗ (−1)^{h2 − shift}`; the eigenvector basis of the full sum is
/// far worse conditioned than either factor.
pub fn matrix_power_of_minus_one_with(
    m: &ComplexOperator,
    shift: f64,
    branch: IntegerBranch,
) -> Result<MinusOnePower> {
    if !shift.is_finite() {
        return Err(Error::InvalidParameter("shift must be finite".into()));
    }
    if let Some((h1, h2)) = kronecker_sum_factors(m) {
        let (h1, h2) = balance_split(h1, h2)?;
        let s1 = signed_power(&h1, 0.0, branch)?;
        let s2 = signed_power(&h2, shift, branch)?;
        let (worst, worst_distance) = if s1.worst_distance >= s2.worst_distance {
            (s1.worst, s1.worst_distance)
        } else {
            (s2.worst, s2.worst_distance)
        };
        return Ok(MinusOnePower {
            op: kron(&s1.op, &s2.op)?,
            nonconverged: s1.nonconverged * m.basis().cutoff()
                + s2.nonconverged * m.basis().cutoff()
                - s1.nonconverged * s2.nonconverged,
            worst,
            worst_distance,
            condition: s1.condition * s2.condition,
            factorized: true,
        });
    }
    let s = signed_power(m, shift, branch)?;
    Ok(MinusOnePower {
        op: s.op,
        nonconverged: s.nonconverged,
        worst: s.worst,
        worst_distance: s.worst_distance,
        condition: s.condition,
        factorized: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::operator::{embed, interior_block, position_momentum};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexOperator {
        let d: Vec<Complex64> = values.iter().map(|&v| c(v)).collect();
        ComplexOperator::from_diagonal(BasisTag::SingleMode(values.len()), &d)
    }

    #[test]
    fn eig_sorts_diagonal() {
        let dec = eig_general(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(dec.eigenvalues, vec![c(1.0), c(2.0), c(3.0)]);
        assert!(dec.biorthogonality_error < 1e-14);
    }

    #[test]
    fn eig_ties_broken_by_imaginary_part() {
        let d = [Complex64::new(1.0, 0.5), Complex64::new(1.0, -0.5), c(0.0)];
        let m = ComplexOperator::from_diagonal(BasisTag::SingleMode(3), &d);
        let values = eigenvalues_general(&m).unwrap();
        assert_eq!(values, vec![c(0.0), d[1], d[0]]);
    }

    #[test]
    fn jordan_block_is_near_defective() {
        let m = ComplexOperator::from_rows(
            BasisTag::SingleMode(2),
            &[vec![c(1.0), c(1.0)], vec![c(0.0), c(1.0)]],
        )
        .unwrap();
        assert!(matches!(eig_general(&m), Err(Error::NearDefective { .. })));
    }

    #[test]
    fn eig_reconstructs_non_normal_matrix() {
        let (x, p) = position_momentum(12).unwrap();
        let m = &(&x * &x) + &(&p * &p).scale_real(0.5) + &x.scale(Complex64::new(0.0, 0.3));
        let dec = eig_general(&m).unwrap();
        assert!(dec.reconstruction_error(&m) < 1e-6 * m.max_abs());
        assert!(dec.biorthogonality_error < 1e-8);
    }

    #[test]
    fn minus_one_power_examples() {
        let v = matrix_power_of_minus_one(&diag(&[1.0, 2.0, 3.0]), 1.0).unwrap();
        assert_eq!(v.diagonal(), vec![c(1.0), c(-1.0), c(1.0)]);

        let v = matrix_power_of_minus_one(&diag(&[0.99998, 2.00001]), 0.0).unwrap();
        assert_eq!(v.diagonal(), vec![c(-1.0), c(1.0)]);

        let v = matrix_power_of_minus_one(&diag(&[-1.0, -2.0]), 0.0).unwrap();
        assert_eq!(v.diagonal(), vec![c(-1.0), c(1.0)]);
    }

    #[test]
    fn minus_one_power_rejects_half_integers() {
        let err = matrix_power_of_minus_one(&diag(&[1.0, 1.5]), 0.0).unwrap_err();
        match err {
            Error::SpectrumNotInteger { worst, distance } => {
                assert_eq!(worst, c(1.5));
                assert!((distance - 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let lenient =
            matrix_power_of_minus_one_with(&diag(&[1.0, 1.5]), 0.0, IntegerBranch::Nearest).unwrap();
        assert_eq!(lenient.nonconverged, 1);
    }

    #[test]
    fn kronecker_sum_is_detected_and_factorized() {
        let (x, p) = position_momentum(10).unwrap();
        let h = (&(&x * &x) + &(&p * &p)).scale_real(0.5);
        let sum = &embed(&h, 0).unwrap() + &embed(&h, 1).unwrap();
        let (h1, h2) = kronecker_sum_factors(&sum).unwrap();
        let id = ComplexOperator::identity(BasisTag::SingleMode(10));
        let rebuilt = &kron(&h1, &id).unwrap() + &kron(&id, &h2).unwrap();
        assert!(rebuilt.max_abs_diff(&sum) < 1e-14);

        let factored =
            matrix_power_of_minus_one_with(&sum, 1.0, IntegerBranch::Nearest).unwrap();
        assert!(factored.factorized);
        let dense = signed_power(&sum, 1.0, IntegerBranch::Nearest).unwrap();
        let a = interior_block(&factored.op, 4).unwrap();
        let b = interior_block(&dense.op, 4).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-8);

        assert!(kronecker_sum_factors(&(&embed(&x, 0).unwrap() * &embed(&p, 1).unwrap())).is_none());
    }
}
