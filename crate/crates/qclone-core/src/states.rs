//! State sets and their Gram matrices.
//!
//! A [`StateSet`] holds the candidate states |Ψ_1⟩,…,|Ψ_n⟩ the machine is
//! built for. Linear independence is decided through the positive
//! definiteness of the Gram matrix: the set is independent exactly when
//! the smallest Gram eigenvalue is positive.

use num_complex::Complex;
use thiserror::Error;

use crate::matcore::{self, CMatrix, CVector, MatError};
use crate::scalar::Scalar;
use crate::tol;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state {index} has norm {norm:.12}, outside the unit-norm tolerance")]
    NotNormalized { index: usize, norm: f64 },
    #[error("state {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("state set must contain at least one state in dimension ≥ 1")]
    Empty,
    #[error("state {index} contains a non-finite amplitude")]
    NonFinite { index: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
}

/// A finite set of unit vectors in an N-dimensional complex space.
#[derive(Debug, Clone)]
pub struct StateSet<T> {
    dim: usize,
    states: Vec<CVector<T>>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> StateSet<T> {
    /// Validates and wraps the given states. Each must be normalized to
    /// within the unit-norm tolerance; use [`StateSet::new_normalized`] to
    /// renormalize instead of rejecting.
    pub fn new(dim: usize, states: Vec<CVector<T>>) -> Result<Self, StateError> {
        if dim == 0 || states.is_empty() {
            return Err(StateError::Empty);
        }
        for (index, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(StateError::DimensionMismatch {
                    index,
                    got: s.dim(),
                    expected: dim,
                });
            }
            if !s.all_finite() {
                return Err(StateError::NonFinite { index });
            }
            let norm = s.norm();
            if (norm - T::one()).abs() > tol::state_norm::<T>() {
                return Err(StateError::NotNormalized {
                    index,
                    norm: norm.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            dim,
            states,
            labels: None,
        })
    }

    /// Renormalizes every state, then validates. Zero vectors still fail.
    pub fn new_normalized(dim: usize, states: Vec<CVector<T>>) -> Result<Self, StateError> {
        let normalized = states
            .into_iter()
            .enumerate()
            .map(|(index, s)| {
                if !s.all_finite() {
                    return Err(StateError::NonFinite { index });
                }
                let norm = s.norm();
                if norm <= T::real(1e-15) {
                    return Err(StateError::NotNormalized {
                        index,
                        norm: norm.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Ok(s.scale(T::creal(T::one() / norm)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dim, normalized)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, StateError> {
        if labels.len() != self.n() {
            return Err(StateError::LabelCount {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, i: usize) -> &CVector<T> {
        &self.states[i]
    }

    pub fn states(&self) -> &[CVector<T>] {
        &self.states
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        self.labels
            .as_ref()
            .map(|l| l[i].clone())
            .unwrap_or_else(|| format!("Ψ_{}", i + 1))
    }

    /// Overlap ⟨Ψ_i|Ψ_j⟩.
    pub fn overlap(&self, i: usize, j: usize) -> Complex<T> {
        self.states[i].inner(&self.states[j])
    }
}

/// Hermitian matrix of pairwise overlaps with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    entries: CMatrix<T>,
}

impl<T: Scalar> GramMatrix<T> {
    pub(crate) fn from_matrix(entries: CMatrix<T>) -> Self {
        debug_assert!(entries.is_square());
        Self { entries }
    }

    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }
}

/// Gram matrix X⁽¹⁾ with entries ⟨Ψ_i|Ψ_j⟩, conjugate-linear in the first
/// argument. Hermitian with unit diagonal by construction.
pub fn gram<T: Scalar>(set: &StateSet<T>) -> GramMatrix<T> {
    let n = set.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = T::cone();
        for j in i + 1..n {
            let z = set.overlap(i, j);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    GramMatrix::from_matrix(m)
}

/// Entrywise m-th power of the Gram matrix: X⁽ᵐ⁾ with entries
/// ⟨Ψ_i|Ψ_j⟩^m, the Gram matrix of the m-fold tensor-power states.
pub fn gram_power<T: Scalar>(set: &StateSet<T>, m: u32) -> GramMatrix<T> {
    assert!(m >= 1, "gram_power requires m ≥ 1");
    let g = gram(set);
    let n = set.n();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = g.entry(i, j).powu(m);
        }
    }
    GramMatrix::from_matrix(out)
}

/// Linear-independence verdict with the smallest Gram eigenvalue as
/// evidence: independent iff `λ_min(X⁽¹⁾) > tol · n`.
pub fn is_linearly_independent<T: Scalar>(
    set: &StateSet<T>,
    tol: T,
) -> Result<(bool, T), MatError> {
    let lambda_min = matcore::min_eigenvalue(gram(set).as_matrix())?;
    let threshold = tol * T::from_usize(set.n()).expect("set size fits in scalar");
    Ok((lambda_min > threshold, lambda_min))
}

/// [`is_linearly_independent`] at the default threshold.
pub fn is_linearly_independent_default<T: Scalar>(
    set: &StateSet<T>,
) -> Result<(bool, T), MatError> {
    is_linearly_independent(set, tol::independence::<T>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::SplitMix64;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn random_state(dim: usize, rng: &mut SplitMix64) -> CVector<f64> {
        CVector::new(
            (0..dim)
                .map(|_| c(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
                .collect(),
        )
        .normalized()
    }

    #[test]
    fn orthonormal_states_have_identity_gram() {
        let set =
            StateSet::<f64>::new(3, vec![CVector::basis(3, 0), CVector::basis(3, 1)]).unwrap();
        let g = gram(&set);
        assert!(g.as_matrix().sub(&CMatrix::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn plus_state_overlap_is_inverse_sqrt_two() {
        let e1 = CVector::<f64>::basis(2, 0);
        let plus = CVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).normalized();
        let set = StateSet::new(2, vec![e1, plus]).unwrap();
        let g = gram(&set);
        assert!((g.entry(0, 1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(g.entry(0, 1).im.abs() < 1e-15);
    }

    #[test]
    fn gram_matches_brute_force_inner_products() {
        let mut rng = SplitMix64::new(17);
        let states: Vec<_> = (0..3).map(|_| random_state(4, &mut rng)).collect();
        let set = StateSet::new(4, states.clone()).unwrap();
        let g = gram(&set);
        for i in 0..3 {
            for j in 0..3 {
                // Independent loop oracle over raw amplitudes.
                let mut acc = c(0.0, 0.0);
                for k in 0..4 {
                    acc += states[i].as_slice()[k].conj() * states[j].as_slice()[k];
                }
                assert!((g.entry(i, j) - acc).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn gram_power_one_equals_gram_exactly() {
        let mut rng = SplitMix64::new(19);
        let set = StateSet::new(3, (0..3).map(|_| random_state(3, &mut rng)).collect()).unwrap();
        assert_eq!(gram_power(&set, 1), gram(&set));
    }

    #[test]
    fn gram_power_squares_the_overlap() {
        let e1 = CVector::<f64>::basis(2, 0);
        let mix = CVector::new(vec![c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)]);
        let set = StateSet::new(2, vec![e1, mix]).unwrap();
        let g2 = gram_power(&set, 2);
        assert!((g2.entry(0, 1).re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gram_power_matches_tensor_power_states() {
        let mut rng = SplitMix64::new(23);
        let states: Vec<_> = (0..3).map(|_| random_state(3, &mut rng)).collect();
        let set = StateSet::new(3, states.clone()).unwrap();
        let g3 = gram_power(&set, 3);
        for i in 0..3 {
            for j in 0..3 {
                let ti = states[i].kron_pow(3);
                let tj = states[j].kron_pow(3);
                assert!((g3.entry(i, j) - ti.inner(&tj)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn independence_verdicts() {
        let set =
            StateSet::<f64>::new(2, vec![CVector::basis(2, 0), CVector::basis(2, 1)]).unwrap();
        let (flag, lmin) = is_linearly_independent_default(&set).unwrap();
        assert!(flag);
        assert!((lmin - 1.0).abs() < 1e-12);

        let psi = CVector::new(vec![c(0.6, 0.0), c(0.8, 0.0)]);
        let dup = StateSet::new(2, vec![psi.clone(), psi]).unwrap();
        let (flag, lmin) = is_linearly_independent_default(&dup).unwrap();
        assert!(!flag);
        assert!(lmin.abs() < 1e-12);
    }

    #[test]
    fn three_states_in_dimension_two_are_dependent() {
        let mut rng = SplitMix64::new(29);
        let set = StateSet::new(2, (0..3).map(|_| random_state(2, &mut rng)).collect()).unwrap();
        let (flag, lmin) = is_linearly_independent_default(&set).unwrap();
        assert!(!flag);
        assert!(lmin <= 1e-12);
    }

    #[test]
    fn unnormalized_input_is_rejected_unless_normalizing() {
        let v = CVector::new(vec![c(2.0, 0.0), c(0.0, 0.0)]);
        let err = StateSet::new(2, vec![v.clone()]).unwrap_err();
        assert!(matches!(err, StateError::NotNormalized { index: 0, .. }));
        let set = StateSet::new_normalized(2, vec![v]).unwrap();
        assert!((set.state(0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_is_psd_for_valid_state_sets() {
        let mut rng = SplitMix64::new(31);
        for dim in [2usize, 3, 5] {
            for n in 1..=dim + 1 {
                let set =
                    StateSet::new(dim, (0..n).map(|_| random_state(dim, &mut rng)).collect())
                        .unwrap();
                let check =
                    crate::matcore::is_psd(gram(&set).as_matrix(), crate::tol::psd_rel()).unwrap();
                assert!(check.accepted, "gram not PSD: λ_min = {}", check.lambda_min);
            }
        }
    }
}
