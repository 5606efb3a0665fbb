use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
#[cfg(test)]
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which Fock basis an operator lives in.
///
/// Two-mode operators use the tensor basis with the mode-1 occupation as the
/// slow index: state `(n1, n2)` sits at position `n1 * cutoff + n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "cutoff")]
pub enum BasisTag {
    SingleMode(usize),
    TwoMode(usize),
}

impl BasisTag {
    pub fn cutoff(self) -> usize {
        match self {
            BasisTag::SingleMode(c) | BasisTag::TwoMode(c) => c,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            BasisTag::SingleMode(c) => c,
            BasisTag::TwoMode(c) => c * c,
        }
    }

    /// Basis indices of the states whose every mode occupation is below `keep`,
    /// in ascending order.
    pub fn interior_indices(self, keep: usize) -> Vec<usize> {
        match self {
            BasisTag::SingleMode(_) => (0..keep).collect(),
            BasisTag::TwoMode(c) => (0..keep)
                .flat_map(|n1| (0..keep).map(move |n2| n1 * c + n2))
                .collect(),
        }
    }

    fn shrunk(self, keep: usize) -> BasisTag {
        match self {
            BasisTag::SingleMode(_) => BasisTag::SingleMode(keep),
            BasisTag::TwoMode(_) => BasisTag::TwoMode(keep),
        }
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::SingleMode(c) => write!(f, "single-mode(cutoff {c})"),
            BasisTag::TwoMode(c) => write!(f, "two-mode(cutoff {c} per mode)"),
        }
    }
}

/// Default interior size for a given per-mode cutoff.
///
/// Truncated ladder matrices are wrong in their last rows and columns, and
/// for non-Hermitian shifts that corruption leaks a few levels further down,
/// so only the lowest third of every mode is trusted.
pub fn default_keep(cutoff: usize) -> usize {
    (cutoff / 3).max(1)
}

/// Dense square complex matrix tagged with its Fock basis.
#[derive(Clone, PartialEq)]
pub struct ComplexOperator {
    mat: Mat<Complex64>,
    basis: BasisTag,
}

impl fmt::Debug for ComplexOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexOperator")
            .field("basis", &self.basis)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl ComplexOperator {
    /// Wraps a matrix, checking shape and finiteness.
    pub fn from_mat(mat: Mat<Complex64>, basis: BasisTag) -> Result<Self> {
        let dim = basis.dim();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::InvalidTruncation(format!(
                "matrix is {}x{} but {basis} needs {dim}x{dim}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let op = ComplexOperator { mat, basis };
        if !op.is_finite() {
            return Err(Error::NonFinite("operator construction"));
        }
        Ok(op)
    }

    pub(crate) fn from_mat_unchecked(mat: Mat<Complex64>, basis: BasisTag) -> Self {
        debug_assert_eq!(mat.nrows(), basis.dim());
        ComplexOperator { mat, basis }
    }

    pub fn zeros(basis: BasisTag) -> Self {
        let d = basis.dim();
        Self::from_mat_unchecked(Mat::zeros(d, d), basis)
    }

    pub fn identity(basis: BasisTag) -> Self {
        let d = basis.dim();
        Self::from_mat_unchecked(Mat::identity(d, d), basis)
    }

    pub fn from_fn(basis: BasisTag, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let d = basis.dim();
        Self::from_mat_unchecked(Mat::from_fn(d, d, f), basis)
    }

    pub fn from_diagonal(basis: BasisTag, diag: &[Complex64]) -> Self {
        assert_eq!(diag.len(), basis.dim(), "diagonal length must equal dim");
        Self::from_fn(basis, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(basis: BasisTag, rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = basis.dim();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidTruncation(format!(
                "expected {d} rows of length {d}"
            )));
        }
        Self::from_mat(Mat::from_fn(d, d, |i, j| rows[i][j]), basis)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn as_mat(&self) -> MatRef<'_, Complex64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<Complex64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.mat[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        let d = self.dim();
        (0..d).all(|j| (0..d).all(|i| self.mat[(i, j)].is_finite()))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_mat_unchecked(self.mat.adjoint().to_owned(), self.basis)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_mat_unchecked(&self.mat * faer::Scale(factor), self.basis)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut mat = self.mat.clone();
        for i in 0..self.dim() {
            mat[(i, i)] += shift;
        }
        Self::from_mat_unchecked(mat, self.basis)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.check_same_basis(other)
            .expect("max_abs_diff needs operators in the same basis");
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        m
    }

    /// Maximum deviation from Hermiticity, `max |M - M†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis,
                right: other.basis,
            });
        }
        Ok(())
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self::from_mat_unchecked(&self.mat * &other.mat, self.basis))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "vector length must equal dim");
        let col = faer::ColRef::from_slice(v);
        let out = &self.mat * col;
        out.iter().copied().collect()
    }

    /// Multiplies row `i` by `diag[i]`, i.e. `diag(d) * self` without a dense
    /// product.
    pub fn left_scale_rows(&self, diag: &[Complex64]) -> Self {
        assert_eq!(diag.len(), self.dim());
        let mut mat = self.mat.clone();
        for j in 0..self.dim() {
            for (i, d) in diag.iter().enumerate() {
                mat[(i, j)] *= *d;
            }
        }
        Self::from_mat_unchecked(mat, self.basis)
    }

    /// `self * diag(d)`.
    pub fn right_scale_cols(&self, diag: &[Complex64]) -> Self {
        assert_eq!(diag.len(), self.dim());
        let mut mat = self.mat.clone();
        for (j, d) in diag.iter().enumerate() {
            for i in 0..self.dim() {
                mat[(i, j)] *= *d;
            }
        }
        Self::from_mat_unchecked(mat, self.basis)
    }

    /// Returns the diagonal if every off-diagonal entry is exactly zero.
    pub fn as_diagonal(&self) -> Option<Vec<Complex64>> {
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                if i != j && self.mat[(i, j)] != ZERO {
                    return None;
                }
            }
        }
        Some(self.diagonal())
    }

    /// For a two-mode operator of the exact form `h ⊗ I` (mode 0) or
    /// `I ⊗ h` (mode 1), returns the single-mode factor `h`.
    pub fn mode_factor(&self, mode: usize) -> Option<ComplexOperator> {
        let BasisTag::TwoMode(c) = self.basis else {
            return None;
        };
        let single = BasisTag::SingleMode(c);
        let factor = match mode {
            0 => ComplexOperator::from_fn(single, |i, k| self.mat[(i * c, k * c)]),
            1 => ComplexOperator::from_fn(single, |j, l| self.mat[(j, l)]),
            _ => return None,
        };
        let id = ComplexOperator::identity(single);
        let rebuilt = match mode {
            0 => kron(&factor, &id),
            _ => kron(&id, &factor),
        }
        .ok()?;
        (rebuilt.mat == self.mat).then_some(factor)
    }

    /// Row-major entries, for fixtures and reports.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.mat[(i, j)]).collect())
            .collect()
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexOperator> for &ComplexOperator {
            type Output = ComplexOperator;

            /// Panics when the operands live in different bases.
            fn $method(self, rhs: &ComplexOperator) -> ComplexOperator {
                assert_eq!(self.basis, rhs.basis, "operator basis mismatch");
                ComplexOperator::from_mat_unchecked(&self.mat $op &rhs.mat, self.basis)
            }
        }

        impl $trait<ComplexOperator> for ComplexOperator {
            type Output = ComplexOperator;

            fn $method(self, rhs: ComplexOperator) -> ComplexOperator {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&ComplexOperator> for ComplexOperator {
            type Output = ComplexOperator;

            fn $method(self, rhs: &ComplexOperator) -> ComplexOperator {
                (&self).$method(rhs)
            }
        }

        impl $trait<ComplexOperator> for &ComplexOperator {
            type Output = ComplexOperator;

            fn $method(self, rhs: ComplexOperator) -> ComplexOperator {
                self.$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for &ComplexOperator {
    type Output = ComplexOperator;

    fn neg(self) -> ComplexOperator {
        self.scale_real(-1.0)
    }
}

impl Neg for ComplexOperator {
    type Output = ComplexOperator;

    fn neg(self) -> ComplexOperator {
        -&self
    }
}

/// JSON debug dump: row-major `[re, im]` pairs plus `dim` and `basis_tag`.
#[derive(Serialize, Deserialize)]
struct OperatorDump {
    dim: usize,
    basis_tag: BasisTag,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.mat[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        OperatorDump {
            dim: d,
            basis_tag: self.basis,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let dump = OperatorDump::deserialize(deserializer)?;
        let d = dump.dim;
        if dump.basis_tag.dim() != d || dump.entries.len() != d * d {
            return Err(D::Error::custom("dim, basis_tag and entries disagree"));
        }
        let mat = Mat::from_fn(d, d, |i, j| {
            let [re, im] = dump.entries[i * d + j];
            Complex64::new(re, im)
        });
        ComplexOperator::from_mat(mat, dump.basis_tag).map_err(D::Error::custom)
    }
}

/// Truncated annihilation operator: `√n` at row `n-1`, column `n`.
pub fn annihilation_matrix(cutoff: usize) -> Result<ComplexOperator> {
    if cutoff < 2 {
        return Err(Error::InvalidTruncation(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    Ok(ComplexOperator::from_fn(
        BasisTag::SingleMode(cutoff),
        |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        },
    ))
}

/// Hermitian position and momentum, `x = (b + b†)/√2`, `p = i(b† − b)/√2`.
pub fn position_momentum(cutoff: usize) -> Result<(ComplexOperator, ComplexOperator)> {
    let b = annihilation_matrix(cutoff)?;
    let bd = b.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&b + &bd).scale_real(s);
    let p = (&bd - &b).scale(Complex64::new(0.0, s));
    Ok((x, p))
}

/// Diagonal `(−1)^n` on a single mode.
pub fn single_mode_parity(cutoff: usize) -> ComplexOperator {
    let diag: Vec<Complex64> = (0..cutoff)
        .map(|n| if n % 2 == 0 { ONE } else { -ONE })
        .collect();
    ComplexOperator::from_diagonal(BasisTag::SingleMode(cutoff), &diag)
}

/// Tensor product of two single-mode operators (mode-1 index slow).
pub fn kron(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    let (BasisTag::SingleMode(ca), BasisTag::SingleMode(cb)) = (a.basis, b.basis) else {
        return Err(Error::BasisMismatch {
            left: a.basis,
            right: b.basis,
        });
    };
    if ca != cb {
        return Err(Error::BasisMismatch {
            left: a.basis,
            right: b.basis,
        });
    }
    let d = ca * cb;
    let mut out = Mat::<Complex64>::zeros(d, d);
    faer::linalg::kron::kron(out.as_mut(), a.mat.as_ref(), b.mat.as_ref());
    Ok(ComplexOperator::from_mat_unchecked(out, BasisTag::TwoMode(ca)))
}

/// Embeds a single-mode operator into the two-mode basis on `mode` (0 or 1).
pub fn embed(op: &ComplexOperator, mode: usize) -> Result<ComplexOperator> {
    let id = ComplexOperator::identity(op.basis);
    match mode {
        0 => kron(op, &id),
        1 => kron(&id, op),
        _ => Err(Error::InvalidParameter(format!("mode index {mode} out of range"))),
    }
}

/// `AB − BA`.
pub fn commutator(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    a.check_same_basis(b)?;
    Ok(ComplexOperator::from_mat_unchecked(
        &a.mat * &b.mat - &b.mat * &a.mat,
        a.basis,
    ))
}

fn check_keep(basis: BasisTag, keep: usize) -> Result<()> {
    if keep == 0 || keep >= basis.cutoff() {
        return Err(Error::InvalidTruncation(format!(
            "interior size {keep} must be in 1..{}",
            basis.cutoff()
        )));
    }
    Ok(())
}

/// Sub-matrix over the states whose occupations are all below `keep`.
pub fn interior_block(m: &ComplexOperator, keep: usize) -> Result<ComplexOperator> {
    check_keep(m.basis, keep)?;
    let idx = m.basis.interior_indices(keep);
    Ok(ComplexOperator::from_fn(m.basis.shrunk(keep), |i, j| {
        m.mat[(idx[i], idx[j])]
    }))
}

/// Interior block of the product `factors[0] · factors[1] · …`, computed
/// from the interior rows of the first factor and interior columns of the
/// last one. Equal to `interior_block` of the full product.
pub fn interior_product(factors: &[&ComplexOperator], keep: usize) -> Result<ComplexOperator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
    check_keep(first.basis, keep)?;
    for f in rest {
        first.check_same_basis(f)?;
    }
    let idx = first.basis.interior_indices(keep);
    let n = idx.len();
    let d = first.dim();
    if rest.is_empty() {
        return interior_block(first, keep);
    }
    let mut acc = Mat::<Complex64>::from_fn(n, d, |i, j| first.mat[(idx[i], j)]);
    let (last, middle) = rest.split_last().expect("non-empty");
    for f in middle {
        acc = &acc * &f.mat;
    }
    let last_cols = Mat::<Complex64>::from_fn(d, n, |i, j| last.mat[(i, idx[j])]);
    let out = &acc * &last_cols;
    Ok(ComplexOperator::from_mat_unchecked(out, first.basis.shrunk(keep)))
}

/// Interior block of `[A, B]`.
pub fn interior_commutator(
    a: &ComplexOperator,
    b: &ComplexOperator,
    keep: usize,
) -> Result<ComplexOperator> {
    Ok(interior_product(&[a, b], keep)? - interior_product(&[b, a], keep)?)
}
