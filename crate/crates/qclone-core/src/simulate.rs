//! State-vector simulation of constructed plans: exact Born-rule outcome
//! probabilities, postselection, fidelity verification, and seeded Monte
//! Carlo shot sampling.
//!
//! Sampling uses an explicitly specified SplitMix64 generator with
//! inverse-CDF selection over the exact probability vector, so counts are
//! bit-reproducible across implementations given the seed. The update is
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! and a draw in [0, 1) takes the top 53 bits: `(output >> 11) * 2⁻⁵³`.

use thiserror::Error;

use crate::machine::Plan;
use crate::matcore::CVector;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("input index {index} out of range for a plan with {n} states")]
    InputOutOfRange { index: usize, n: usize },
    #[error("outcome {outcome} has probability {probability:.3e}, below the postselection floor")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },
    #[error("outcome {outcome} out of range for {outcomes} probe outcomes")]
    OutcomeOutOfRange { outcome: usize, outcomes: usize },
}

/// Deterministic 64-bit generator for reproducible shot sampling.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn check_input<T: Scalar>(plan: &Plan<T>, input: usize) -> Result<(), SimError> {
    if input >= plan.n() {
        return Err(SimError::InputOutOfRange {
            index: input,
            n: plan.n(),
        });
    }
    Ok(())
}

/// Evolved composite state for the given input.
fn evolved<T: Scalar>(plan: &Plan<T>, input: usize) -> CVector<T> {
    plan.unitary().mul_vec(&plan.inputs()[input])
}

/// Born-rule probabilities of the probe outcomes for the given input:
/// `prob[j]` is the squared norm of the probe-j sector of U|in_i⟩.
pub fn exact_outcome_probs<T: Scalar>(plan: &Plan<T>, input: usize) -> Result<Vec<T>, SimError> {
    check_input(plan, input)?;
    let v = evolved(plan, input);
    let probe_dim = plan.probe_dim();
    let mut probs = vec![T::zero(); probe_dim];
    for (k, z) in v.iter().enumerate() {
        probs[k % probe_dim] = probs[k % probe_dim] + z.norm_sqr();
    }
    Ok(probs)
}

/// Normalized post-measurement state of the non-probe registers after
/// observing `outcome`, together with its fidelity |⟨expected|state⟩|²
/// against the state the construction pins down for that branch (1 when
/// the construction leaves the branch free).
pub fn postselected_state<T: Scalar>(
    plan: &Plan<T>,
    input: usize,
    outcome: usize,
) -> Result<(CVector<T>, T), SimError> {
    check_input(plan, input)?;
    let probe_dim = plan.probe_dim();
    if outcome >= probe_dim {
        return Err(SimError::OutcomeOutOfRange {
            outcome,
            outcomes: probe_dim,
        });
    }
    let v = evolved(plan, input);
    let system_dim = plan.system_dim();
    let mut sector = Vec::with_capacity(system_dim);
    for k in 0..system_dim {
        sector.push(v[k * probe_dim + outcome]);
    }
    let sector = CVector::new(sector);
    let prob = sector.norm_sqr();
    if prob <= T::real(1e-12) {
        return Err(SimError::ZeroProbabilityOutcome {
            outcome,
            probability: prob.to_f64().unwrap_or(f64::NAN),
        });
    }
    let state = sector.scale(T::creal(T::one() / prob.sqrt()));
    let fidelity = match plan.expected_state(input, outcome) {
        Some(expected) => expected.inner(&state).norm_sqr(),
        None => T::one(),
    };
    Ok((state, fidelity))
}

/// Samples `shots` outcomes from the exact probabilities by inverse CDF
/// over the SplitMix64 stream; identical arguments give identical counts.
pub fn run_shots<T: Scalar>(
    plan: &Plan<T>,
    input: usize,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>, SimError> {
    let probs = exact_outcome_probs(plan, input)?;
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0f64, |acc, &p| {
            *acc += p.to_f64().unwrap_or(0.0);
            Some(*acc)
        })
        .collect();
    let mut rng = SplitMix64::new(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.next_f64();
        // First outcome whose cumulative weight exceeds u; zero-width
        // outcomes can never be selected.
        let mut chosen = probs.len() - 1;
        for (j, &edge) in cdf.iter().enumerate() {
            if u < edge {
                chosen = j;
                break;
            }
        }
        counts[chosen] += 1;
    }
    Ok(counts)
}

/// Per-input verification row.
#[derive(Debug, Clone)]
pub struct InputReport<T> {
    pub exact_success_prob: T,
    pub target_fidelity: T,
    pub outcome_probs: Vec<T>,
    pub shot_counts: Option<Vec<u64>>,
}

/// Aggregated residuals and per-input rows for a plan.
#[derive(Debug, Clone)]
pub struct SimulationReport<T> {
    pub rows: Vec<InputReport<T>>,
    pub seed: Option<u64>,
    /// ‖U†U − I‖_F.
    pub unitarity_residual: T,
    /// max entrywise |⟨out_i|out_j⟩ − ⟨in_i|in_j⟩| over the designed family.
    pub gram_residual: T,
    /// max_i ‖U·in_i − out_i‖.
    pub map_residual: T,
    /// max_i |Σ_j prob_j − 1|.
    pub probability_sum_residual: T,
    /// max_i |prob_success(i) − γ_i|.
    pub success_prob_residual: T,
    /// max_i (1 − fidelity on the success branch).
    pub fidelity_deficit: T,
    pub pass: bool,
}

/// Runs every residual check the construction promises and aggregates the
/// evidence; `pass` is true when all residuals fall within `tol`.
pub fn verify_plan<T: Scalar>(plan: &Plan<T>, tol: T) -> Result<SimulationReport<T>, SimError> {
    let n = plan.n();
    let unitarity_residual = plan.unitary().unitarity_residual();

    let mut gram_residual = T::zero();
    let inputs = plan.inputs();
    let outputs = plan.outputs();
    for i in 0..n {
        for j in 0..n {
            let d = (outputs[i].inner(&outputs[j]) - inputs[i].inner(&inputs[j])).norm();
            if d > gram_residual {
                gram_residual = d;
            }
        }
    }

    let mut map_residual = T::zero();
    let mut probability_sum_residual = T::zero();
    let mut success_prob_residual = T::zero();
    let mut fidelity_deficit = T::zero();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mapped = evolved(plan, i);
        let d = mapped.sub(&outputs[i]).norm();
        if d > map_residual {
            map_residual = d;
        }
        let outcome_probs = exact_outcome_probs(plan, i)?;
        let total: T = outcome_probs.iter().copied().fold(T::zero(), |a, b| a + b);
        let sum_dev = (total - T::one()).abs();
        if sum_dev > probability_sum_residual {
            probability_sum_residual = sum_dev;
        }
        let success = plan.success_outcome(i);
        let exact_success_prob = outcome_probs[success];
        let gamma_dev = (exact_success_prob - plan.gamma().get(i)).abs();
        if gamma_dev > success_prob_residual {
            success_prob_residual = gamma_dev;
        }
        let target_fidelity = if exact_success_prob > T::real(1e-12) {
            postselected_state(plan, i, success)?.1
        } else {
            T::one() // success branch empty at γ_i = 0; nothing to check
        };
        let deficit = T::one() - target_fidelity;
        if deficit > fidelity_deficit {
            fidelity_deficit = deficit;
        }
        rows.push(InputReport {
            exact_success_prob,
            target_fidelity,
            outcome_probs,
            shot_counts: None,
        });
    }

    let pass = unitarity_residual <= tol
        && gram_residual <= tol
        && map_residual <= tol
        && probability_sum_residual <= tol
        && success_prob_residual <= tol
        && fidelity_deficit <= tol;
    Ok(SimulationReport {
        rows,
        seed: None,
        unitarity_residual,
        gram_residual,
        map_residual,
        probability_sum_residual,
        success_prob_residual,
        fidelity_deficit,
        pass,
    })
}
