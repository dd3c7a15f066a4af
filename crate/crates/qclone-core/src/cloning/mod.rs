//! Feasibility predicates and efficiency optimization for 1→m
//! probabilistic cloning and for identification (the m→∞ case).
//!
//! Whether efficiencies γ are attainable is a positive-semidefiniteness
//! question about the residual matrix
//!
//! ```text
//! R(γ) = X⁽¹⁾ − √Γ X_P⁽ᵐ⁾ √Γ†,      X_P⁽ᵐ⁾[i][j] = ⟨Ψ_i|Ψ_j⟩^m ⟨P⁽ⁱ⁾|P⁽ʲ⁾⟩
//! ```
//!
//! for finite m, degenerating to `X⁽¹⁾ − Γ` as m → ∞. The probe Gram
//! ⟨P⁽ⁱ⁾|P⁽ʲ⁾⟩ enters only these bounds; constructed machines (see the
//! `machine` module) use the single-probe form.

mod optimize;

pub use optimize::{optimize_weighted, OptimizeOptions};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use thiserror::Error;

use crate::matcore::{self, CMatrix, MatError};
use crate::scalar::Scalar;
use crate::states::{self, StateSet};
use crate::tol;

#[derive(Debug, Error)]
pub enum CloneError {
    #[error("efficiency {value} at index {index} is outside [0, 1]")]
    InvalidEfficiency { index: usize, value: f64 },
    #[error("expected {expected} efficiencies, got {got}")]
    EfficiencyCount { expected: usize, got: usize },
    #[error("copy count must be at least 2 (got {0})")]
    InvalidCopyCount(u32),
    #[error("cannot parse copy count from {0:?}: expected an integer ≥ 2 or \"inf\"")]
    CopyCountParse(String),
    #[error("1→∞ cloning requires all pairwise overlaps strictly below 1; |⟨Ψ_{i}|Ψ_{j}⟩| = {overlap:.12}")]
    InfiniteCopyWithUnitOverlap { i: usize, j: usize, overlap: f64 },
    #[error("two-state bound undefined at unit overlap |⟨Ψ_1|Ψ_2⟩| = {0:.12}")]
    UnitOverlap(f64),
    #[error("invalid probe Gram: {0}")]
    InvalidProbeGram(String),
    #[error("probe Gram order {got} does not match the {expected} states")]
    ProbeOrderMismatch { expected: usize, got: usize },
    #[error("states are linearly dependent (λ_min = {lambda_min:.3e}); no positive efficiencies exist")]
    DependentStates { lambda_min: f64 },
    #[error("weights must be nonnegative and sum to 1 (got sum {sum:.12})")]
    InvalidWeights { sum: f64 },
    #[error("optimization did not converge; best objective so far {objective:.12}")]
    NotConverged { objective: f64, gammas: Vec<f64> },
    #[error("no feasible efficiency vector found")]
    Infeasible,
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Number of copies requested from the machine: a finite m ≥ 2 or the
/// 1→∞ limit that encodes identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyCount {
    Finite(u32),
    Infinite,
}

impl CopyCount {
    pub fn finite(m: u32) -> Result<Self, CloneError> {
        if m < 2 {
            return Err(CloneError::InvalidCopyCount(m));
        }
        Ok(CopyCount::Finite(m))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CopyCount::Infinite)
    }
}

impl fmt::Display for CopyCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CopyCount::Finite(m) => write!(f, "{m}"),
            CopyCount::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for CopyCount {
    type Err = CloneError;

    fn from_str(s: &str) -> Result<Self, CloneError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(CopyCount::Infinite);
        }
        let m: u32 = t
            .parse()
            .map_err(|_| CloneError::CopyCountParse(s.to_string()))?;
        CopyCount::finite(m)
    }
}

/// Per-state success probabilities, the diagonal of Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyVector<T> {
    gammas: Vec<T>,
}

impl<T: Scalar> EfficiencyVector<T> {
    pub fn new(gammas: Vec<T>) -> Result<Self, CloneError> {
        for (index, &g) in gammas.iter().enumerate() {
            if !(g >= T::zero() && g <= T::one()) {
                return Err(CloneError::InvalidEfficiency {
                    index,
                    value: g.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { gammas })
    }

    pub fn uniform(n: usize, gamma: T) -> Result<Self, CloneError> {
        Self::new(vec![gamma; n])
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.gammas[i]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.gammas
    }
}

/// Gram matrix ⟨P⁽ⁱ⁾|P⁽ʲ⁾⟩ of the normalized success-probe states:
/// Hermitian, unit diagonal, PSD, entry moduli ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGram<T> {
    entries: CMatrix<T>,
}

impl<T: Scalar> ProbeGram<T> {
    /// All probes identical: the all-ones matrix, matching the machine
    /// construction with a single success flag.
    pub fn all_ones(n: usize) -> Self {
        Self {
            entries: CMatrix::from_fn(n, n, |_, _| T::cone()),
        }
    }

    /// Validates a user-supplied matrix against the probe-Gram invariants.
    pub fn user(entries: CMatrix<T>) -> Result<Self, CloneError> {
        if !entries.is_square() || entries.rows() == 0 {
            return Err(CloneError::InvalidProbeGram(format!(
                "expected a nonempty square matrix, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if !entries.all_finite() {
            return Err(CloneError::InvalidProbeGram("non-finite entry".into()));
        }
        let n = entries.rows();
        let herm = entries.hermitian_deviation();
        if herm > tol::hermitian::<T>() * T::one().max(entries.frobenius_norm()) {
            return Err(CloneError::InvalidProbeGram(format!(
                "not Hermitian (deviation {:.3e})",
                herm.to_f64().unwrap_or(f64::NAN)
            )));
        }
        for i in 0..n {
            let d = (entries[(i, i)] - T::cone()).norm();
            if d > tol::state_norm::<T>() {
                return Err(CloneError::InvalidProbeGram(format!(
                    "diagonal entry {i} deviates from 1 by {:.3e}",
                    d.to_f64().unwrap_or(f64::NAN)
                )));
            }
            for j in 0..n {
                let m = entries[(i, j)].norm();
                if m > T::one() + tol::state_norm::<T>() {
                    return Err(CloneError::InvalidProbeGram(format!(
                        "entry ({i},{j}) has modulus {} > 1",
                        m.to_f64().unwrap_or(f64::NAN)
                    )));
                }
            }
        }
        let check = matcore::is_psd(&entries, tol::psd_rel())?;
        if !check.accepted {
            return Err(CloneError::InvalidProbeGram(format!(
                "not PSD (λ_min = {:.3e})",
                check.lambda_min.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self { entries })
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
}

/// Probe choice for the feasibility bounds.
#[derive(Debug, Clone)]
pub enum ProbeMode<T> {
    /// All success probes identical (all-ones Gram), the constructed form.
    Single,
    /// Unit-modulus phases chosen to align each residual entry with the
    /// corresponding overlap, falling back to `Single` if the phase matrix
    /// is not PSD.
    PhaseAligned,
    /// User-supplied Gram, validated.
    User(CMatrix<T>),
}

/// A probe Gram plus a flag recording whether `PhaseAligned` had to fall
/// back to `Single` because the phase matrix was not PSD.
#[derive(Debug, Clone)]
pub struct ProbeGramResult<T> {
    pub gram: ProbeGram<T>,
    pub fell_back_to_single: bool,
}

/// Builds the probe Gram for the requested mode.
///
/// For `PhaseAligned` with finite m the entry is
/// `exp(−i·arg(⟨Ψ_i|Ψ_j⟩^{m−1}))`, which aligns the phase of
/// `⟨Ψ_i|Ψ_j⟩^m ⟨P⁽ⁱ⁾|P⁽ʲ⁾⟩` with the phase of ⟨Ψ_i|Ψ_j⟩ — for n = 2
/// this is exactly the equality condition of the two-state bound. The
/// probe does not enter the 1→∞ residual, so `PhaseAligned` reduces to
/// `Single` there.
pub fn make_probe_gram<T: Scalar>(
    set: &StateSet<T>,
    m: CopyCount,
    mode: ProbeMode<T>,
) -> Result<ProbeGramResult<T>, CloneError> {
    let n = set.n();
    match mode {
        ProbeMode::Single => Ok(ProbeGramResult {
            gram: ProbeGram::all_ones(n),
            fell_back_to_single: false,
        }),
        ProbeMode::User(entries) => {
            if entries.rows() != n {
                return Err(CloneError::ProbeOrderMismatch {
                    expected: n,
                    got: entries.rows(),
                });
            }
            Ok(ProbeGramResult {
                gram: ProbeGram::user(entries)?,
                fell_back_to_single: false,
            })
        }
        ProbeMode::PhaseAligned => {
            let mm = match m {
                CopyCount::Finite(mm) => mm,
                CopyCount::Infinite => {
                    return Ok(ProbeGramResult {
                        gram: ProbeGram::all_ones(n),
                        fell_back_to_single: false,
                    })
                }
            };
            let g = states::gram(set);
            let entries = CMatrix::from_fn(n, n, |i, j| {
                let t = g.entry(i, j);
                let mag = t.norm();
                if mag <= T::zero() {
                    T::cone()
                } else {
                    let phase = t / T::creal(mag);
                    phase.conj().powu(mm - 1)
                }
            });
            let check = matcore::is_psd(&entries, tol::psd_rel())?;
            if check.accepted {
                Ok(ProbeGramResult {
                    gram: ProbeGram { entries },
                    fell_back_to_single: false,
                })
            } else {
                Ok(ProbeGramResult {
                    gram: ProbeGram::all_ones(n),
                    fell_back_to_single: true,
                })
            }
        }
    }
}

/// Feasibility evidence: the residual matrix and its extreme eigenvalues.
#[derive(Debug, Clone)]
pub struct FeasibilityReport<T> {
    pub feasible: bool,
    pub lambda_min: T,
    pub lambda_max: T,
    pub residual: CMatrix<T>,
}

fn validate_shapes<T: Scalar>(
    set: &StateSet<T>,
    gamma: &EfficiencyVector<T>,
    probe: &ProbeGram<T>,
) -> Result<(), CloneError> {
    let n = set.n();
    if gamma.len() != n {
        return Err(CloneError::EfficiencyCount {
            expected: n,
            got: gamma.len(),
        });
    }
    if probe.order() != n {
        return Err(CloneError::ProbeOrderMismatch {
            expected: n,
            got: probe.order(),
        });
    }
    Ok(())
}

/// Residual matrix `X⁽¹⁾ − √Γ X_P⁽ᵐ⁾ √Γ†` (finite m), or `X⁽¹⁾ − Γ` for
/// the 1→∞ case, which additionally requires all pairwise overlap moduli
/// strictly below 1.
pub fn residual<T: Scalar>(
    set: &StateSet<T>,
    m: CopyCount,
    gamma: &EfficiencyVector<T>,
    probe: &ProbeGram<T>,
) -> Result<CMatrix<T>, CloneError> {
    validate_shapes(set, gamma, probe)?;
    let n = set.n();
    let x1 = states::gram(set);
    match m {
        CopyCount::Infinite => {
            for i in 0..n {
                for j in i + 1..n {
                    let overlap = x1.entry(i, j).norm();
                    if overlap >= T::one() - tol::unit_overlap::<T>() {
                        return Err(CloneError::InfiniteCopyWithUnitOverlap {
                            i,
                            j,
                            overlap: overlap.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
            let mut r = x1.into_matrix();
            for i in 0..n {
                r[(i, i)] = r[(i, i)] - T::creal(gamma.get(i));
            }
            Ok(r)
        }
        CopyCount::Finite(mm) => {
            let xm = states::gram_power(set, mm);
            let mut r = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let w = (gamma.get(i) * gamma.get(j)).sqrt();
                    r[(i, j)] = x1.entry(i, j) - T::creal(w) * xm.entry(i, j) * probe.entry(i, j);
                }
            }
            Ok(r)
        }
    }
}

/// Tests whether the efficiencies are attainable: the residual must be
/// PSD within `rel_tol` (relative to `max(1, λ_max)`).
pub fn feasible<T: Scalar>(
    set: &StateSet<T>,
    m: CopyCount,
    gamma: &EfficiencyVector<T>,
    probe: &ProbeGram<T>,
    rel_tol: T,
) -> Result<FeasibilityReport<T>, CloneError> {
    let r = residual(set, m, gamma, probe)?;
    let check = matcore::is_psd(&r, rel_tol)?;
    Ok(FeasibilityReport {
        feasible: check.accepted,
        lambda_min: check.lambda_min,
        lambda_max: check.lambda_max,
        residual: r,
    })
}

/// Closed-form maximal symmetric efficiency for two states with overlap
/// modulus `s = |⟨Ψ_1|Ψ_2⟩|`, with the probe phase aligned optimally:
/// `(1−s)/(1−s^m)` for finite m (equal to `1/(1+s)` at m = 2) and `1−s`
/// for the 1→∞ case.
pub fn two_state_bound<T: Scalar>(overlap: Complex<T>, m: CopyCount) -> Result<T, CloneError> {
    let s = overlap.norm();
    if s >= T::one() - tol::unit_overlap::<T>() {
        return Err(CloneError::UnitOverlap(s.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(match m {
        CopyCount::Infinite => T::one() - s,
        CopyCount::Finite(mm) => {
            if s == T::zero() {
                T::one()
            } else {
                (T::one() - s) / (T::one() - s.powi(mm as i32))
            }
        }
    })
}

/// Largest uniform efficiency γ with `feasible(S, m, (γ,…,γ), Q)`,
/// located by bisection to absolute width 1e-10. The bisection tracks the
/// exact sign change of λ_min (up to a machine-epsilon margin) rather
/// than the tolerant PSD test, so the result sits on the feasible side of
/// the true boundary instead of overshooting it by the tolerance.
/// Linearly dependent sets short-circuit to γ* = 0, the only value
/// consistent with cloning impossibility.
pub fn max_uniform_gamma<T: Scalar>(
    set: &StateSet<T>,
    m: CopyCount,
    probe: &ProbeGram<T>,
    rel_tol: T,
) -> Result<(T, FeasibilityReport<T>), CloneError> {
    let n = set.n();
    let zero = EfficiencyVector::uniform(n, T::zero())?;
    let (independent, _) = states::is_linearly_independent_default(set)?;
    if !independent {
        let report = feasible(set, m, &zero, probe, rel_tol)?;
        return Ok((T::zero(), report));
    }

    let check = |g: T| -> Result<FeasibilityReport<T>, CloneError> {
        let gamma = EfficiencyVector::uniform(n, g)?;
        feasible(set, m, &gamma, probe, rel_tol)
    };
    let on_boundary = |rep: &FeasibilityReport<T>| -> bool {
        let margin = T::epsilon() * T::real(64.0) * T::one().max(rep.lambda_max);
        rep.lambda_min >= -margin
    };

    let at_one = check(T::one())?;
    if on_boundary(&at_one) {
        return Ok((T::one(), at_one));
    }

    let mut lo = T::zero();
    let mut hi = T::one();
    while hi - lo > tol::bisect_width::<T>() {
        let mid = (lo + hi) * T::real(0.5);
        if on_boundary(&check(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let report = check(lo)?;
    Ok((lo, report))
}
