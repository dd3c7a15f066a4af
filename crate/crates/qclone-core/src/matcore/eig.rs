//! Hermitian eigendecomposition and derived factorizations.
//!
//! The solver reduces a complex Hermitian matrix to real symmetric
//! tridiagonal form with Householder reflections, then runs implicit QL
//! iteration with Wilkinson-style shifts, accumulating the unitary
//! transform throughout. The iteration is capped at 64 sweeps per
//! dimension.

use num_complex::Complex;

use super::{CMatrix, MatError};
use crate::scalar::Scalar;
use crate::tol;

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a
/// Hermitian matrix: `M = V Λ V†`.
#[derive(Debug, Clone)]
pub struct EigDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: CMatrix<T>,
}

/// Outcome of the shared PSD test.
#[derive(Debug, Clone, Copy)]
pub struct PsdCheck<T> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub accepted: bool,
}

fn check_hermitian<T: Scalar>(m: &CMatrix<T>) -> Result<(), MatError> {
    if !m.is_square() || m.rows() == 0 {
        return Err(MatError::ShapeMismatch(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.all_finite() {
        return Err(MatError::NonFinite);
    }
    let dev = m.hermitian_deviation();
    let scale = T::one().max(m.frobenius_norm());
    if dev > tol::hermitian::<T>() * scale {
        return Err(MatError::NotHermitian {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form. Returns the diagonal, the (real, nonnegative)
/// subdiagonal, and the accumulated unitary Q with Q† M Q tridiagonal.
fn tridiagonalize<T: Scalar>(m: &CMatrix<T>) -> (Vec<T>, Vec<T>, CMatrix<T>) {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut q = CMatrix::<T>::identity(n);
    let two = T::real(2.0);

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        // Column segment below the diagonal.
        let mut below_sq = T::zero();
        for i in k + 2..n {
            below_sq = below_sq + a[(i, k)].norm_sqr();
        }
        if below_sq == T::zero() {
            continue; // already tridiagonal in this column
        }
        let x0 = a[(k + 1, k)];
        let xnorm = (x0.norm_sqr() + below_sq).sqrt();
        let phase = if x0.norm() > T::zero() {
            x0 / T::creal(x0.norm())
        } else {
            T::cone()
        };
        let alpha = -phase * T::creal(xnorm);

        // Normalized Householder vector v with (I − 2vv†) x = α e₁.
        let mut v: Vec<Complex<T>> = Vec::with_capacity(len);
        v.push(x0 - alpha);
        for i in k + 2..n {
            v.push(a[(i, k)]);
        }
        let vnorm = v
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |x, y| x + y)
            .sqrt();
        if vnorm == T::zero() {
            continue;
        }
        let inv = T::creal(T::one() / vnorm);
        for z in v.iter_mut() {
            *z = *z * inv;
        }

        // Rank-2 update of the trailing block: A ← A − v w† − w v†
        // with p = 2 A v and w = p − (v†p) v.
        let mut p: Vec<Complex<T>> = vec![T::czero(); len];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut acc = T::czero();
            for (j, vj) in v.iter().enumerate() {
                acc = acc + a[(k + 1 + i, k + 1 + j)] * vj;
            }
            *pi = acc * T::creal(two);
        }
        let mut vp = T::czero();
        for (vi, pi) in v.iter().zip(p.iter()) {
            vp = vp + vi.conj() * pi;
        }
        let kappa = vp * T::creal(T::real(0.5)) + vp.conj() * T::creal(T::real(0.5));
        let w: Vec<Complex<T>> = p
            .iter()
            .zip(v.iter())
            .map(|(pi, vi)| pi - kappa * vi)
            .collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] = a[(k + 1 + i, k + 1 + j)] - upd;
            }
        }

        // Write the reduced column/row and clear the rest.
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = T::czero();
            a[(k, i)] = T::czero();
        }

        // Accumulate Q ← Q (I − 2vv†) on columns k+1..n.
        for r in 0..n {
            let mut t = T::czero();
            for (j, vj) in v.iter().enumerate() {
                t = t + q[(r, k + 1 + j)] * vj;
            }
            let t2 = t * T::creal(two);
            for (j, vj) in v.iter().enumerate() {
                q[(r, k + 1 + j)] = q[(r, k + 1 + j)] - t2 * vj.conj();
            }
        }
    }

    // Make the subdiagonal real and nonnegative by a diagonal phase
    // similarity, folded into Q's columns.
    let d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e: Vec<T> = vec![T::zero(); n.saturating_sub(1)];
    let mut delta = T::cone();
    for k in 0..n.saturating_sub(1) {
        let sub = a[(k + 1, k)];
        let mag = sub.norm();
        e[k] = mag;
        let phase = if mag > T::zero() {
            sub / T::creal(mag)
        } else {
            T::cone()
        };
        delta = delta * phase;
        if delta != T::cone() {
            for r in 0..n {
                q[(r, k + 1)] = q[(r, k + 1)] * delta;
            }
        }
    }
    (d, e, q)
}

/// Implicit QL iteration with shifts on a real symmetric tridiagonal
/// matrix, rotating the complex column accumulator alongside.
fn tql2<T: Scalar>(
    d: &mut [T],
    e: &mut Vec<T>,
    v: &mut CMatrix<T>,
    max_sweeps: usize,
) -> Result<(), MatError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    e.push(T::zero()); // e[i] couples (i, i+1); last entry unused
    let mut sweeps = 0usize;

    for l in 0..n {
        loop {
            // Find the first negligible subdiagonal element at or after l.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(MatError::NoConvergence { iterations: sweeps });
            }

            // Wilkinson-style shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (T::real(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;

            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + T::real(2.0) * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;

                // Apply the real rotation to complex eigenvector columns i, i+1.
                let (cs, sn) = (T::creal(c), T::creal(s));
                for row in 0..n {
                    let h = v[(row, i + 1)];
                    v[(row, i + 1)] = sn * v[(row, i)] + cs * h;
                    v[(row, i)] = cs * v[(row, i)] - sn * h;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Hermitian eigendecomposition `M = V Λ V†` with eigenvalues ascending.
pub fn hermitian_eig<T: Scalar>(m: &CMatrix<T>) -> Result<EigDecomposition<T>, MatError> {
    check_hermitian(m)?;
    let n = m.rows();
    let (mut d, mut e, mut q) = tridiagonalize(m);
    tql2(&mut d, &mut e, &mut q, 64 * n)?;

    // Sort ascending, permuting the eigenvector columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Scalar>(m: &CMatrix<T>) -> Result<T, MatError> {
    Ok(hermitian_eig(m)?.eigenvalues[0])
}

/// Shared PSD test: accepted iff `λ_min ≥ −rel_tol · max(1, λ_max)`.
pub fn is_psd<T: Scalar>(m: &CMatrix<T>, rel_tol: T) -> Result<PsdCheck<T>, MatError> {
    let eig = hermitian_eig(m)?;
    let lambda_min = eig.eigenvalues[0];
    let lambda_max = *eig.eigenvalues.last().unwrap();
    let accepted = lambda_min >= -rel_tol * T::one().max(lambda_max);
    Ok(PsdCheck {
        lambda_min,
        lambda_max,
        accepted,
    })
}

/// Principal square root of a PSD Hermitian matrix: the unique PSD `S`
/// with `S·S = M`. Eigenvalues that are negative within the PSD tolerance
/// are clamped to zero; anything below that fails with `NotPsd`.
pub fn principal_sqrt<T: Scalar>(m: &CMatrix<T>) -> Result<CMatrix<T>, MatError> {
    let eig = hermitian_eig(m)?;
    let lambda_max = *eig.eigenvalues.last().unwrap();
    let clamp = tol::psd_rel::<T>() * T::one().max(lambda_max);
    if eig.eigenvalues[0] < -clamp {
        return Err(MatError::NotPsd {
            lambda_min: eig.eigenvalues[0].to_f64().unwrap_or(f64::NAN),
        });
    }
    let roots: Vec<T> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > T::zero() { l.sqrt() } else { T::zero() })
        .collect();
    let v = &eig.eigenvectors;
    Ok(v.mul(&CMatrix::diag(&roots)).mul(&v.adjoint()))
}

/// Cholesky-based inverse and log-determinant of a Hermitian
/// positive-definite matrix; `None` when a pivot fails, i.e. the matrix
/// is not (numerically) positive definite.
pub(crate) fn cholesky_inverse_logdet<T: Scalar>(m: &CMatrix<T>) -> Option<(CMatrix<T>, T)> {
    let n = m.rows();
    debug_assert!(m.is_square());
    let mut l = CMatrix::<T>::zeros(n, n);
    let mut logdet = T::zero();
    for j in 0..n {
        let mut diag = m[(j, j)].re;
        for k in 0..j {
            diag = diag - l[(j, k)].norm_sqr();
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return None;
        }
        let dsqrt = diag.sqrt();
        l[(j, j)] = T::creal(dsqrt);
        logdet = logdet + T::real(2.0) * dsqrt.ln();
        for i in j + 1..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc = acc - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / T::creal(dsqrt);
        }
    }
    // Invert via forward/back substitution against basis vectors.
    let mut inv = CMatrix::<T>::zeros(n, n);
    for col in 0..n {
        let mut y = vec![T::czero(); n];
        for i in 0..n {
            let mut acc = if i == col { T::cone() } else { T::czero() };
            for k in 0..i {
                acc = acc - l[(i, k)] * y[k];
            }
            y[i] = acc / l[(i, i)];
        }
        let mut x = vec![T::czero(); n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..n {
                acc = acc - l[(k, i)].conj() * x[k];
            }
            x[i] = acc / l[(i, i)];
        }
        for i in 0..n {
            inv[(i, col)] = x[i];
        }
    }
    Some((inv, logdet))
}
