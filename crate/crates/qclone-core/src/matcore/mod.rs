//! Dense complex linear-algebra kernel.
//!
//! Provides the column vectors and row-major matrices everything else is
//! built from, together with Hermitian eigendecomposition, PSD tests,
//! principal square roots, order-preserving orthonormalization, tensor
//! products, and completion of partial isometries to full unitaries.
//!
//! All operations are pure functions of their inputs; values are immutable
//! after construction and safe to share or send between threads.

mod eig;
mod ortho;

pub use eig::{hermitian_eig, is_psd, min_eigenvalue, principal_sqrt, EigDecomposition, PsdCheck};
pub(crate) use eig::cholesky_inverse_logdet;
pub use ortho::{complete_basis, gram_preserving_unitary, orthonormalize, Orthonormalized};

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

/// Errors reported by the linear-algebra kernel.
#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix is not Hermitian: ‖M − M†‖_F = {deviation:.3e} exceeds tolerance")]
    NotHermitian { deviation: f64 },
    #[error("eigenvalue iteration failed to converge within {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("matrix is not positive semidefinite: λ_min = {lambda_min:.3e}")]
    NotPsd { lambda_min: f64 },
    #[error("input and output Gram matrices disagree: max entrywise deviation {max_deviation:.3e}")]
    GramMismatch { max_deviation: f64 },
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite entry encountered")]
    NonFinite,
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector<T> {
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CVector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![T::czero(); dim],
        }
    }

    /// Standard basis vector |index⟩ of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut v = Self::zeros(dim);
        v.data[index] = T::cone();
        v
    }

    pub fn from_real(values: &[T]) -> Self {
        Self {
            data: values.iter().map(|&x| T::creal(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.data.iter()
    }

    /// Inner product ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in inner product");
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::czero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Subtracts `factor · other` in place; the Gram-Schmidt update step.
    pub fn axpy(&mut self, factor: Complex<T>, other: &Self) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a = *a - factor * b;
        }
    }

    /// Returns a unit-norm copy. Panics on the zero vector.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > T::zero(), "cannot normalize the zero vector");
        self.scale(T::creal(T::one() / n))
    }

    /// Tensor product |self⟩ ⊗ |other⟩.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    /// m-fold tensor power |self⟩^{⊗m}, m ≥ 1.
    pub fn kron_pow(&self, m: u32) -> Self {
        assert!(m >= 1, "tensor power requires m ≥ 1");
        let mut out = self.clone();
        for _ in 1..m {
            out = out.kron(self);
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl<T: Scalar> Index<usize> for CVector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; rejects ragged input.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self, MatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatError::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = T::creal(v);
        }
        m
    }

    pub fn from_cols(cols: &[CVector<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, CVector::dim);
        assert!(cols.iter().all(|v| v.dim() == r), "column dimension mismatch");
        Self::from_fn(r, c, |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> CVector<T> {
        assert!(j < self.cols);
        CVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn columns(&self) -> Vec<CVector<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Conjugate transpose M†.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::czero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVector<T>) -> CVector<T> {
        assert_eq!(self.cols, v.dim(), "dimension mismatch in matrix-vector product");
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = T::czero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * v[k];
            }
            out.data[i] = acc;
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// ‖M − M†‖_F; zero for Hermitian matrices.
    pub fn hermitian_deviation(&self) -> T {
        assert!(self.is_square());
        self.sub(&self.adjoint()).frobenius_norm()
    }

    /// (M + M†)/2, the Hermitian part.
    pub fn hermitian_part(&self) -> Self {
        let half = T::creal(T::real(0.5));
        self.add(&self.adjoint()).scale(half)
    }

    /// ‖M†M − I‖_F, the unitarity residual.
    pub fn unitarity_residual(&self) -> T {
        assert!(self.is_square());
        self.adjoint()
            .mul(self)
            .sub(&Self::identity(self.rows))
            .frobenius_norm()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl<T: Scalar> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Standard tensor product A ⊗ B.
pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a[(ia, ja)];
            if f == T::czero() {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Tensor product with an overflow guard on the product dimension.
pub fn try_kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, cap: usize) -> Result<CMatrix<T>, MatError> {
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .ok_or(MatError::DimensionCap { dim: usize::MAX, cap })?;
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .ok_or(MatError::DimensionCap { dim: usize::MAX, cap })?;
    let dim = rows.max(cols);
    if dim > cap {
        return Err(MatError::DimensionCap { dim, cap });
    }
    Ok(kron(a, b))
}
