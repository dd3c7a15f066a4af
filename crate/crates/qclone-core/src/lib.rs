//! Probabilistic cloning and unambiguous identification of linearly
//! independent quantum states.
//!
//! Given a finite set of pure states |Ψ_1⟩,…,|Ψ_n⟩, this crate decides
//! whether the set can be probabilistically cloned (1 → m faithful
//! copies) or unambiguously identified, computes the best attainable
//! success efficiencies from positive-semidefiniteness conditions on the
//! Gram matrices involved, constructs an explicit unitary-reduction
//! machine realizing those efficiencies, and simulates the machine to
//! verify the theory end to end.
//!
//! # Modules
//!
//! - [`matcore`]: dense complex linear algebra — Hermitian
//!   eigendecomposition, PSD tests, principal square roots, tensor
//!   products, orthonormalization and Gram-preserving unitary completion.
//! - [`states`]: state sets, Gram matrices `X⁽ᵐ⁾`, linear-independence
//!   verdicts.
//! - [`cloning`]: feasibility predicates, the two-state closed-form
//!   bound, uniform-efficiency bisection and weighted optimization
//!   (convex for the 1→∞ case, safeguarded local search for finite m).
//! - [`machine`]: explicit construction of cloning and identification
//!   machines as global unitaries.
//! - [`simulate`]: exact Born probabilities, postselection, fidelity
//!   checks and seeded, reproducible Monte Carlo sampling.
//!
//! Everything is generic over the real scalar `T: Scalar` (`f32`/`f64`);
//! the `*64` aliases below pin the `f64` instantiation the default
//! tolerances are calibrated for.
//!
//! # Example
//!
//! ```
//! use qclone_core::{CVector64, StateSet64};
//! use qclone_core::cloning::{max_uniform_gamma, two_state_bound, CopyCount, ProbeGram};
//! use num_complex::Complex;
//!
//! // Two real states with overlap 1/2.
//! let a = CVector64::basis(2, 0);
//! let b = CVector64::new(vec![
//!     Complex::new(0.5, 0.0),
//!     Complex::new(0.75_f64.sqrt(), 0.0),
//! ]);
//! let set = StateSet64::new(2, vec![a, b]).unwrap();
//!
//! // The best symmetric 1→2 cloning efficiency is 1/(1+s) = 2/3 …
//! let bound = two_state_bound(Complex::<f64>::new(0.5, 0.0), CopyCount::Finite(2)).unwrap();
//! assert!((bound - 2.0 / 3.0).abs() < 1e-12);
//!
//! // … and the feasibility bisection agrees.
//! let probe = ProbeGram::all_ones(2);
//! let (gamma, _) = max_uniform_gamma(&set, CopyCount::Finite(2), &probe, 1e-9).unwrap();
//! assert!((gamma - bound).abs() < 1e-8);
//! ```

pub mod cloning;
pub mod machine;
pub mod matcore;
pub mod scalar;
pub mod simulate;
pub mod states;
pub mod tol;

pub use cloning::{CopyCount, EfficiencyVector, FeasibilityReport, ProbeGram, ProbeMode};
pub use machine::{ClonePlan, IdentifyPlan, MachineOptions, Plan};
pub use matcore::{CMatrix, CVector, MatError};
pub use scalar::Scalar;
pub use simulate::{SimulationReport, SplitMix64};
pub use states::{GramMatrix, StateSet};

/// Complex double-precision scalar.
pub type Complex64 = num_complex::Complex<f64>;
/// Complex single-precision scalar.
pub type Complex32 = num_complex::Complex<f32>;

/// Double-precision instantiations; the tolerances in [`tol`] assume these.
pub type CMatrix64 = matcore::CMatrix<f64>;
pub type CVector64 = matcore::CVector<f64>;
pub type StateSet64 = states::StateSet<f64>;
pub type GramMatrix64 = states::GramMatrix<f64>;
pub type EfficiencyVector64 = cloning::EfficiencyVector<f64>;
pub type ProbeGram64 = cloning::ProbeGram<f64>;
pub type FeasibilityReport64 = cloning::FeasibilityReport<f64>;
pub type ClonePlan64 = machine::ClonePlan<f64>;
pub type IdentifyPlan64 = machine::IdentifyPlan<f64>;
pub type Plan64 = machine::Plan<f64>;
pub type SimulationReport64 = simulate::SimulationReport<f64>;

/// Single-precision instantiations.
pub type CMatrix32 = matcore::CMatrix<f32>;
pub type CVector32 = matcore::CVector<f32>;
pub type StateSet32 = states::StateSet<f32>;
