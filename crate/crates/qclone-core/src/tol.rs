//! Shared numerical tolerances.
//!
//! All feasibility decisions in the crate funnel through the same
//! positive-semidefiniteness test: a Hermitian matrix is accepted as PSD
//! when `lambda_min >= -psd_rel() * max(1, lambda_max)`. The remaining
//! constants bound symmetry checks, Gram agreement, unitarity residuals
//! and orthonormalization drop decisions.

use crate::scalar::Scalar;

/// Relative Hermitian-symmetry tolerance: `‖M − M†‖_F ≤ hermitian() · max(1, ‖M‖_F)`.
pub fn hermitian<T: Scalar>() -> T {
    T::real(1e-10)
}

/// Relative PSD acceptance: `λ_min ≥ −psd_rel() · max(1, λ_max)`.
pub fn psd_rel<T: Scalar>() -> T {
    T::real(1e-9)
}

/// Unitarity residual bound on constructed matrices: `‖U†U − I‖_F ≤ unitary()`.
pub fn unitary<T: Scalar>() -> T {
    T::real(1e-9)
}

/// Entrywise Gram-agreement tolerance between input and output families.
pub fn gram_match<T: Scalar>() -> T {
    T::real(1e-8)
}

/// Unit-norm tolerance on state vectors.
pub fn state_norm<T: Scalar>() -> T {
    T::real(1e-8)
}

/// Residual-norm threshold below which a vector counts as linearly
/// dependent during orthonormalization.
pub fn ortho_drop<T: Scalar>() -> T {
    T::real(1e-8)
}

/// Per-state scale factor for the linear-independence verdict:
/// independent iff `λ_min(gram) > independence() · n`.
pub fn independence<T: Scalar>() -> T {
    T::real(1e-9)
}

/// Overlaps with modulus within this of 1 count as unit overlaps.
pub fn unit_overlap<T: Scalar>() -> T {
    T::real(1e-12)
}

/// Absolute bisection width for efficiency optimization.
pub fn bisect_width<T: Scalar>() -> T {
    T::real(1e-10)
}

/// Default cap on the total simulated dimension `N^m · (n+1)`.
pub const DIM_CAP: usize = 4096;
