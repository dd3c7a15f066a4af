//! Order-preserving orthonormalization and Gram-preserving unitary
//! completion.
//!
//! The construction behind [`gram_preserving_unitary`] is the one used to
//! realize a machine once its input and output families are known to have
//! equal Gram matrices: orthonormalize both families in the same order,
//! map basis to basis, and extend with any orthonormal completion of the
//! two spans.

use num_complex::Complex;

use super::{CMatrix, CVector, MatError};
use crate::scalar::Scalar;
use crate::tol;

/// Result of orthonormalizing a list of vectors in order.
#[derive(Debug, Clone)]
pub struct Orthonormalized<T> {
    /// Orthonormal basis of the span, one column per kept vector.
    pub basis: CMatrix<T>,
    /// Upper-trapezoidal coefficients with `vectors = basis · coeffs`.
    pub coeffs: CMatrix<T>,
    /// Indices of input vectors flagged as linearly dependent and dropped.
    pub dropped: Vec<usize>,
}

struct MgsState<T> {
    dim: usize,
    basis: Vec<CVector<T>>,
    columns: Vec<Vec<Complex<T>>>,
    dropped: Vec<usize>,
}

impl<T: Scalar> MgsState<T> {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            columns: Vec::new(),
            dropped: Vec::new(),
        }
    }

    /// Projects `v` against the current basis twice (modified Gram-Schmidt
    /// with reorthogonalization) and returns the residual plus the
    /// accumulated coefficients.
    fn project(&self, v: &CVector<T>) -> (CVector<T>, Vec<Complex<T>>) {
        let mut r = v.clone();
        let mut coeff = vec![T::czero(); self.basis.len()];
        for _ in 0..2 {
            for (k, b) in self.basis.iter().enumerate() {
                let c = b.inner(&r);
                r.axpy(c, b);
                coeff[k] = coeff[k] + c;
            }
        }
        (r, coeff)
    }

    fn push_kept(&mut self, residual: CVector<T>, mut coeff: Vec<Complex<T>>, norm: T) {
        self.basis.push(residual.scale(T::creal(T::one() / norm)));
        coeff.push(T::creal(norm));
        self.columns.push(coeff);
    }

    fn finish(self) -> Orthonormalized<T> {
        let rank = self.basis.len();
        let n = self.columns.len();
        let mut coeffs = CMatrix::zeros(rank, n);
        for (j, col) in self.columns.iter().enumerate() {
            for (k, &c) in col.iter().enumerate() {
                coeffs[(k, j)] = c;
            }
        }
        let basis = if rank == 0 {
            CMatrix::zeros(self.dim, 0)
        } else {
            CMatrix::from_cols(&self.basis)
        };
        Orthonormalized {
            basis,
            coeffs,
            dropped: self.dropped,
        }
    }
}

fn common_dim<T: Scalar>(vectors: &[CVector<T>]) -> Result<usize, MatError> {
    let dim = vectors.first().map_or(0, CVector::dim);
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(MatError::ShapeMismatch(
            "vectors must share one dimension".into(),
        ));
    }
    if vectors.iter().any(|v| !v.all_finite()) {
        return Err(MatError::NonFinite);
    }
    Ok(dim)
}

/// Orthonormalizes `vectors` in the given order (no pivoting). Vectors
/// whose residual norm after projection falls below `drop_tol` are flagged
/// as dependent and contribute no basis column; rank deficiency is
/// reported, not an error.
pub fn orthonormalize<T: Scalar>(
    vectors: &[CVector<T>],
    drop_tol: T,
) -> Result<Orthonormalized<T>, MatError> {
    let dim = common_dim(vectors)?;
    let mut state = MgsState::new(dim);
    for (idx, v) in vectors.iter().enumerate() {
        let (residual, coeff) = state.project(v);
        let norm = residual.norm();
        if norm > drop_tol {
            state.push_kept(residual, coeff, norm);
        } else {
            state.dropped.push(idx);
            state.columns.push(coeff);
        }
    }
    Ok(state.finish())
}

/// Orthonormalizes `vectors` forcing the keep/drop pattern of a previous
/// run; used to give two Gram-matched families identical coefficients.
fn orthonormalize_with_pattern<T: Scalar>(
    vectors: &[CVector<T>],
    dropped: &[usize],
) -> Result<Orthonormalized<T>, MatError> {
    let dim = common_dim(vectors)?;
    let mut state = MgsState::new(dim);
    for (idx, v) in vectors.iter().enumerate() {
        let (residual, coeff) = state.project(v);
        if dropped.contains(&idx) {
            state.dropped.push(idx);
            state.columns.push(coeff);
        } else {
            let norm = residual.norm();
            if norm <= T::epsilon() * T::real(64.0) {
                // The forced pattern disagrees with the actual rank
                // structure; the Grams cannot match to working precision.
                return Err(MatError::GramMismatch {
                    max_deviation: norm.to_f64().unwrap_or(f64::NAN),
                });
            }
            state.push_kept(residual, coeff, norm);
        }
    }
    Ok(state.finish())
}

/// Extends orthonormal columns to a full orthonormal basis of the
/// `dim`-dimensional space by sweeping standard basis vectors.
pub fn complete_basis<T: Scalar>(basis: &CMatrix<T>, dim: usize) -> Result<CMatrix<T>, MatError> {
    if basis.rows() != dim {
        return Err(MatError::ShapeMismatch(
            "basis vectors must have the target dimension".into(),
        ));
    }
    let mut cols = basis.columns();
    for threshold in [T::real(1e-4), T::real(1e-12)] {
        for k in 0..dim {
            if cols.len() == dim {
                break;
            }
            let mut r = CVector::basis(dim, k);
            for _ in 0..2 {
                for b in &cols {
                    let c = b.inner(&r);
                    r.axpy(c, b);
                }
            }
            let norm = r.norm();
            if norm > threshold {
                cols.push(r.scale(T::creal(T::one() / norm)));
            }
        }
        if cols.len() == dim {
            break;
        }
    }
    if cols.len() != dim {
        return Err(MatError::ShapeMismatch(
            "failed to complete orthonormal basis".into(),
        ));
    }
    Ok(CMatrix::from_cols(&cols))
}

/// Largest entrywise deviation between the two Gram matrices.
fn gram_deviation<T: Scalar>(a: &[CVector<T>], b: &[CVector<T>]) -> T {
    let mut max = T::zero();
    for i in 0..a.len() {
        for j in 0..a.len() {
            let d = (a[i].inner(&a[j]) - b[i].inner(&b[j])).norm();
            if d > max {
                max = d;
            }
        }
    }
    max
}

/// Builds a unitary `U` with `U · input_i = output_i` for all `i`, given
/// that the two families have equal Gram matrices (checked entrywise).
///
/// Both families are orthonormalized in the same order with the same
/// keep/drop pattern, which forces identical coefficients; the basis map
/// is then extended to the whole space by completing both bases.
pub fn gram_preserving_unitary<T: Scalar>(
    inputs: &[CVector<T>],
    outputs: &[CVector<T>],
    dim: usize,
) -> Result<CMatrix<T>, MatError> {
    if inputs.len() != outputs.len() {
        return Err(MatError::ShapeMismatch(
            "input and output families must have equal length".into(),
        ));
    }
    if inputs.iter().chain(outputs.iter()).any(|v| v.dim() != dim) {
        return Err(MatError::ShapeMismatch(
            "all vectors must have the stated dimension".into(),
        ));
    }
    let deviation = gram_deviation(inputs, outputs);
    if deviation > tol::gram_match::<T>() {
        return Err(MatError::GramMismatch {
            max_deviation: deviation.to_f64().unwrap_or(f64::NAN),
        });
    }

    let oin = orthonormalize(inputs, tol::ortho_drop::<T>())?;
    let oout = orthonormalize_with_pattern(outputs, &oin.dropped)?;

    let full_in = complete_basis(&oin.basis, dim)?;
    let full_out = complete_basis(&oout.basis, dim)?;
    Ok(full_out.mul(&full_in.adjoint()))
}
