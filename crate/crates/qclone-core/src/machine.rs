//! Explicit construction of cloning and identification machines.
//!
//! A cloning machine acts on system ⊗ blanks ⊗ probe. On input
//! |Ψ_i⟩|Σ⟩…|Σ⟩|P_0⟩ the constructed unitary produces
//!
//! ```text
//! √γ_i |Ψ_i⟩^{⊗m} |P_0⟩  +  Σ_j c_ij |Φ⟩ |P_j⟩
//! ```
//!
//! with orthonormal probe outcomes, a fixed failure state |Φ⟩ and the C
//! matrix chosen as the principal square root of the residual, so that
//! input and output families share their Gram matrix and a unitary
//! mapping one to the other exists. Measuring the probe and keeping
//! outcome 0 projects the rest onto perfect copies.
//!
//! The identification machine plays the same game with n+1 probe
//! outcomes: outcome i < n certifies the input was |Ψ_i⟩ (flagged by an
//! orthonormal marker state), outcome n is the inconclusive failure.

use thiserror::Error;

use crate::cloning::{self, CloneError, CopyCount, EfficiencyVector, ProbeGram};
use crate::matcore::{self, CMatrix, CVector, MatError};
use crate::scalar::Scalar;
use crate::states::{self, StateSet};
use crate::tol;

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("requested efficiencies are infeasible (residual λ_min = {lambda_min:.3e}); lower them, e.g. to the value reported by max_uniform_gamma")]
    NotFeasible { lambda_min: f64 },
    #[error("total dimension {dim} exceeds the cap {cap}; raise the cap to build anyway")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("plan is structurally invalid: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Clone(#[from] CloneError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Construction options; the cap bounds the total simulated dimension.
#[derive(Debug, Clone, Copy)]
pub struct MachineOptions {
    pub dim_cap: usize,
}

impl Default for MachineOptions {
    fn default() -> Self {
        Self {
            dim_cap: tol::DIM_CAP,
        }
    }
}

/// C matrix of the cloning evolution: the principal square root of the
/// single-probe residual `X⁽¹⁾ − √Γ X⁽ᵐ⁾ √Γ†`, so that `C C†` equals the
/// residual exactly.
pub fn build_c_matrix<T: Scalar>(
    set: &StateSet<T>,
    m: u32,
    gamma: &EfficiencyVector<T>,
) -> Result<CMatrix<T>, MachineError> {
    let copies = CopyCount::finite(m)?;
    let probe = ProbeGram::all_ones(set.n());
    let report = cloning::feasible(set, copies, gamma, &probe, tol::psd_rel())?;
    if !report.feasible {
        return Err(MachineError::NotFeasible {
            lambda_min: report.lambda_min.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(matcore::principal_sqrt(&report.residual)?)
}

/// Full description of a constructed 1→m cloning machine.
#[derive(Debug, Clone)]
pub struct ClonePlan<T> {
    pub n: usize,
    pub state_dim: usize,
    pub copies: u32,
    pub gamma: EfficiencyVector<T>,
    pub c_matrix: CMatrix<T>,
    /// Dimension of the system register, `state_dim^copies`.
    pub system_dim: usize,
    /// Dimension of the probe register, `n + 1`.
    pub probe_dim: usize,
    /// Basis index the blank factors are initialized to.
    pub blank_index: usize,
    /// Probe outcome that flags success.
    pub probe_success_index: usize,
    pub unitary: CMatrix<T>,
    /// Composite input vectors |Ψ_i⟩|Σ⟩…|Σ⟩|P_0⟩.
    pub inputs: Vec<CVector<T>>,
    /// Designed output vectors, images of the inputs under the unitary.
    pub outputs: Vec<CVector<T>>,
    /// Success targets |Ψ_i⟩^{⊗m} in the system register.
    pub targets: Vec<CVector<T>>,
}

/// Full description of a constructed identification machine.
#[derive(Debug, Clone)]
pub struct IdentifyPlan<T> {
    pub n: usize,
    pub state_dim: usize,
    /// Ancilla dimension hosting flags and failure vectors (= n).
    pub ancilla_dim: usize,
    /// Dimension of system ⊗ ancilla.
    pub system_dim: usize,
    /// Dimension of the probe register, `n + 1`; outcome i < n certifies
    /// state i, outcome n is the inconclusive failure.
    pub probe_dim: usize,
    pub gamma: EfficiencyVector<T>,
    /// Normalized Gram of the failure states where defined; rows with
    /// γ_i = 1 carry no failure amplitude and are filled in as identity.
    pub y_matrix: CMatrix<T>,
    pub unitary: CMatrix<T>,
    pub inputs: Vec<CVector<T>>,
    pub outputs: Vec<CVector<T>>,
    /// Orthonormal success flags in the system ⊗ ancilla register.
    pub flags: Vec<CVector<T>>,
    /// Unnormalized failure vectors with ⟨g_i|g_j⟩ = (X⁽¹⁾ − Γ)_ij.
    pub failure_vectors: Vec<CVector<T>>,
}

/// Either kind of constructed machine.
#[derive(Debug, Clone)]
pub enum Plan<T> {
    Clone(ClonePlan<T>),
    Identify(IdentifyPlan<T>),
}

impl<T: Scalar> Plan<T> {
    pub fn n(&self) -> usize {
        match self {
            Plan::Clone(p) => p.n,
            Plan::Identify(p) => p.n,
        }
    }

    pub fn probe_dim(&self) -> usize {
        match self {
            Plan::Clone(p) => p.probe_dim,
            Plan::Identify(p) => p.probe_dim,
        }
    }

    pub fn system_dim(&self) -> usize {
        match self {
            Plan::Clone(p) => p.system_dim,
            Plan::Identify(p) => p.system_dim,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim() * self.probe_dim()
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        match self {
            Plan::Clone(p) => &p.unitary,
            Plan::Identify(p) => &p.unitary,
        }
    }

    pub fn inputs(&self) -> &[CVector<T>] {
        match self {
            Plan::Clone(p) => &p.inputs,
            Plan::Identify(p) => &p.inputs,
        }
    }

    pub fn outputs(&self) -> &[CVector<T>] {
        match self {
            Plan::Clone(p) => &p.outputs,
            Plan::Identify(p) => &p.outputs,
        }
    }

    pub fn gamma(&self) -> &EfficiencyVector<T> {
        match self {
            Plan::Clone(p) => &p.gamma,
            Plan::Identify(p) => &p.gamma,
        }
    }

    /// Probe outcome that counts as success for the given input.
    pub fn success_outcome(&self, input: usize) -> usize {
        match self {
            Plan::Clone(p) => p.probe_success_index,
            Plan::Identify(_) => input,
        }
    }

    /// Expected post-measurement state of the non-probe registers for the
    /// given input and outcome, where the construction pins one down.
    pub fn expected_state(&self, input: usize, outcome: usize) -> Option<CVector<T>> {
        match self {
            Plan::Clone(p) => {
                if outcome == p.probe_success_index {
                    Some(p.targets[input].clone())
                } else {
                    // All failure branches hold the same fixed state.
                    Some(
                        CVector::basis(p.state_dim, p.blank_index)
                            .kron_pow(p.copies),
                    )
                }
            }
            Plan::Identify(p) => {
                if outcome < p.n {
                    if outcome == input {
                        Some(p.flags[input].clone())
                    } else {
                        None // zero-probability branch
                    }
                } else {
                    let g = &p.failure_vectors[input];
                    let norm = g.norm();
                    if norm > T::real(1e-12) {
                        Some(g.scale(T::creal(T::one() / norm)))
                    } else {
                        None
                    }
                }
            }
        }
    }

    /// Structural consistency of dimensions and counts; value-level
    /// residuals are checked by the simulator's verification pass.
    pub fn validate(&self) -> Result<(), MachineError> {
        let n = self.n();
        let total = self.total_dim();
        let bad = |msg: &str| Err(MachineError::InvalidPlan(msg.into()));
        if n == 0 {
            return bad("plan must describe at least one state");
        }
        if self.probe_dim() != n + 1 {
            return bad("probe dimension must be n + 1");
        }
        if !self.unitary().is_square() || self.unitary().rows() != total {
            return bad("unitary must be square of the total dimension");
        }
        if self.inputs().len() != n || self.outputs().len() != n {
            return bad("plan must carry one input and one output per state");
        }
        if self.inputs().iter().chain(self.outputs()).any(|v| v.dim() != total) {
            return bad("input/output vectors must live in the total dimension");
        }
        if self.gamma().len() != n {
            return bad("efficiency vector length must equal n");
        }
        if !self.unitary().all_finite() {
            return bad("unitary contains non-finite entries");
        }
        match self {
            Plan::Clone(p) => {
                if p.system_dim != p.state_dim.pow(p.copies) {
                    return bad("system dimension must be state_dim^copies");
                }
                if p.copies < 2 {
                    return bad("clone plan needs at least 2 copies");
                }
                if p.targets.len() != n || p.targets.iter().any(|t| t.dim() != p.system_dim) {
                    return bad("targets must live in the system register");
                }
                if p.c_matrix.rows() != n || p.c_matrix.cols() != n {
                    return bad("C matrix must be n×n");
                }
                if p.blank_index >= p.state_dim || p.probe_success_index >= p.probe_dim {
                    return bad("blank or probe index out of range");
                }
            }
            Plan::Identify(p) => {
                if p.system_dim != p.state_dim * p.ancilla_dim {
                    return bad("system dimension must be state_dim × ancilla_dim");
                }
                if p.ancilla_dim != n {
                    return bad("ancilla dimension must equal n");
                }
                if p.flags.len() != n || p.failure_vectors.len() != n {
                    return bad("flags and failure vectors must have one entry per state");
                }
                if p
                    .flags
                    .iter()
                    .chain(p.failure_vectors.iter())
                    .any(|v| v.dim() != p.system_dim)
                {
                    return bad("flags and failure vectors must live in the system register");
                }
                if p.y_matrix.rows() != n || p.y_matrix.cols() != n {
                    return bad("Y matrix must be n×n");
                }
            }
        }
        Ok(())
    }
}

/// Builds the 1→m cloning machine for the given efficiencies.
pub fn build_clone_machine<T: Scalar>(
    set: &StateSet<T>,
    m: u32,
    gamma: &EfficiencyVector<T>,
    opts: &MachineOptions,
) -> Result<ClonePlan<T>, MachineError> {
    let n = set.n();
    let dim = set.dim();
    let system_dim = dim
        .checked_pow(m)
        .filter(|&d| d <= opts.dim_cap)
        .ok_or(MachineError::DimensionCapExceeded {
            dim: usize::MAX,
            cap: opts.dim_cap,
        })?;
    let probe_dim = n + 1;
    let total = system_dim
        .checked_mul(probe_dim)
        .ok_or(MachineError::DimensionCapExceeded {
            dim: usize::MAX,
            cap: opts.dim_cap,
        })?;
    if total > opts.dim_cap {
        return Err(MachineError::DimensionCapExceeded {
            dim: total,
            cap: opts.dim_cap,
        });
    }

    let c_matrix = build_c_matrix(set, m, gamma)?;

    let blank = CVector::basis(dim, 0).kron_pow(m - 1);
    let failure = CVector::basis(dim, 0).kron_pow(m);
    let probe = |j: usize| CVector::basis(probe_dim, j);

    let mut inputs = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        let psi = set.state(i);
        inputs.push(psi.kron(&blank).kron(&probe(0)));
        let target = psi.kron_pow(m);
        let mut out = target
            .scale(T::creal(gamma.get(i).sqrt()))
            .kron(&probe(0));
        for j in 0..n {
            // The coefficient enters the output Gram conjugated, so conj
            // here keeps ⟨out_i|out_k⟩ = (√Γ X⁽ᵐ⁾ √Γ† + C C†)_{ik}.
            let coeff = c_matrix[(i, j)].conj();
            out = out.add(&failure.scale(coeff).kron(&probe(j + 1)));
        }
        outputs.push(out);
        targets.push(target);
    }

    let unitary = matcore::gram_preserving_unitary(&inputs, &outputs, total)?;
    Ok(ClonePlan {
        n,
        state_dim: dim,
        copies: m,
        gamma: gamma.clone(),
        c_matrix,
        system_dim,
        probe_dim,
        blank_index: 0,
        probe_success_index: 0,
        unitary,
        inputs,
        outputs,
        targets,
    })
}

/// Builds the identification machine for the given efficiencies; requires
/// `X⁽¹⁾ − Γ ⪰ 0`.
pub fn build_identifier<T: Scalar>(
    set: &StateSet<T>,
    gamma: &EfficiencyVector<T>,
    opts: &MachineOptions,
) -> Result<IdentifyPlan<T>, MachineError> {
    let n = set.n();
    let dim = set.dim();
    if gamma.len() != n {
        return Err(MachineError::Clone(CloneError::EfficiencyCount {
            expected: n,
            got: gamma.len(),
        }));
    }
    let ancilla_dim = n;
    let system_dim = dim * ancilla_dim;
    let probe_dim = n + 1;
    let total = system_dim * probe_dim;
    if total > opts.dim_cap {
        return Err(MachineError::DimensionCapExceeded {
            dim: total,
            cap: opts.dim_cap,
        });
    }

    // Slack X⁽¹⁾ − Γ and its PSD certificate.
    let mut slack = states::gram(set).into_matrix();
    for i in 0..n {
        slack[(i, i)] = slack[(i, i)] - T::creal(gamma.get(i));
    }
    let check = matcore::is_psd(&slack, tol::psd_rel())?;
    if !check.accepted {
        return Err(MachineError::NotFeasible {
            lambda_min: check.lambda_min.to_f64().unwrap_or(f64::NAN),
        });
    }

    // Failure vectors: columns of the principal square root reproduce the
    // slack Gram exactly, with no division by 1 − γ_i anywhere.
    let root = matcore::principal_sqrt(&slack)?;
    let cut = T::real(1e-10);
    let y_matrix = CMatrix::from_fn(n, n, |i, j| {
        let si = T::one() - gamma.get(i);
        let sj = T::one() - gamma.get(j);
        if si <= cut || sj <= cut {
            if i == j {
                T::cone()
            } else {
                T::czero()
            }
        } else {
            slack[(i, j)] / T::creal((si * sj).sqrt())
        }
    });

    let anc_zero = CVector::basis(ancilla_dim, 0);
    let sys_zero = CVector::basis(dim, 0);
    let probe = |j: usize| CVector::basis(probe_dim, j);

    let mut inputs = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    let mut failure_vectors = Vec::with_capacity(n);
    for i in 0..n {
        inputs.push(set.state(i).kron(&anc_zero).kron(&probe(0)));
        let flag = sys_zero.kron(&CVector::basis(ancilla_dim, i));
        let fail = sys_zero.kron(&root.col(i));
        let out = flag
            .scale(T::creal(gamma.get(i).sqrt()))
            .kron(&probe(i))
            .add(&fail.kron(&probe(n)));
        outputs.push(out);
        flags.push(flag);
        failure_vectors.push(fail);
    }

    let unitary = matcore::gram_preserving_unitary(&inputs, &outputs, total)?;
    Ok(IdentifyPlan {
        n,
        state_dim: dim,
        ancilla_dim,
        system_dim,
        probe_dim,
        gamma: gamma.clone(),
        y_matrix,
        unitary,
        inputs,
        outputs,
        flags,
        failure_vectors,
    })
}
