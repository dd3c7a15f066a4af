//! Weighted efficiency optimization.
//!
//! For the 1→∞ case the constraint `X⁽¹⁾ − Γ ⪰ 0` is linear in γ and the
//! problem is convex; a log-barrier interior method with damped Newton
//! ascent reaches the global optimum. For finite m the problem is
//! bilinear in √γ_i and generally nonconvex; a safeguarded coordinate
//! ascent from the uniform solution is used instead and the result is
//! locally optimal only.

use super::{
    feasible, max_uniform_gamma, CloneError, CopyCount, EfficiencyVector, FeasibilityReport,
    ProbeGram,
};
use crate::matcore::{cholesky_inverse_logdet, CMatrix};
use crate::scalar::Scalar;
use crate::states::{self, StateSet};
use crate::tol;

/// Options for [`optimize_weighted`].
#[derive(Debug, Clone)]
pub struct OptimizeOptions<T> {
    /// Relative PSD tolerance for feasibility checks.
    pub psd_tol: T,
    /// Coordinate sweeps stop once no coordinate improves the objective
    /// by more than this.
    pub sweep_improvement: T,
    /// Cap on coordinate sweeps (finite m).
    pub max_sweeps: usize,
    /// Initial barrier weight (1→∞ solver).
    pub barrier_mu0: T,
    /// Final barrier weight; the duality gap scales with it.
    pub barrier_mu_min: T,
    /// Geometric barrier reduction factor in (0, 1).
    pub barrier_shrink: T,
    /// Cap on Newton iterations per barrier stage.
    pub max_newton: usize,
}

impl<T: Scalar> Default for OptimizeOptions<T> {
    fn default() -> Self {
        Self {
            psd_tol: tol::psd_rel(),
            sweep_improvement: T::real(1e-8),
            max_sweeps: 64,
            barrier_mu0: T::real(0.25),
            barrier_mu_min: T::real(1e-10),
            barrier_shrink: T::real(0.2),
            max_newton: 80,
        }
    }
}

fn validate_weights<T: Scalar>(weights: &[T], n: usize) -> Result<(), CloneError> {
    let sum: T = weights.iter().copied().fold(T::zero(), |a, b| a + b);
    let ok = weights.len() == n
        && weights.iter().all(|&w| w >= T::zero())
        && (sum - T::one()).abs() <= T::real(1e-6);
    if !ok {
        return Err(CloneError::InvalidWeights {
            sum: sum.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Maximizes `Σ w_i γ_i` over feasible efficiency vectors.
///
/// The returned vector always passes [`feasible`]; the attached report is
/// its certificate. For `m = Infinite` the solution is globally optimal
/// (within the barrier gap); for finite m it is the result of coordinate
/// sweeps from the uniform solution and is labeled locally optimal.
pub fn optimize_weighted<T: Scalar>(
    set: &StateSet<T>,
    m: CopyCount,
    probe: &ProbeGram<T>,
    weights: &[T],
    opts: &OptimizeOptions<T>,
) -> Result<(EfficiencyVector<T>, FeasibilityReport<T>), CloneError> {
    let n = set.n();
    validate_weights(weights, n)?;
    let (independent, lambda_min) = states::is_linearly_independent_default(set)?;
    if !independent {
        return Err(CloneError::DependentStates {
            lambda_min: lambda_min.to_f64().unwrap_or(f64::NAN),
        });
    }
    let gammas = match m {
        CopyCount::Infinite => barrier_infinite(set, weights, opts)?,
        CopyCount::Finite(_) => coordinate_sweeps(set, m, probe, weights, opts)?,
    };
    let gamma = EfficiencyVector::new(gammas)?;
    let report = feasible(set, m, &gamma, probe, opts.psd_tol)?;
    if !report.feasible {
        return Err(CloneError::Infeasible);
    }
    Ok((gamma, report))
}

/// Log-barrier interior method for `max w·γ` subject to
/// `X⁽¹⁾ − diag(γ) ⪰ 0` and `0 ≤ γ ≤ 1`.
fn barrier_infinite<T: Scalar>(
    set: &StateSet<T>,
    weights: &[T],
    opts: &OptimizeOptions<T>,
) -> Result<Vec<T>, CloneError> {
    let n = set.n();
    let x1 = states::gram(set).into_matrix();
    let lambda_min = crate::matcore::min_eigenvalue(&x1)?;
    if lambda_min <= T::zero() {
        return Err(CloneError::DependentStates {
            lambda_min: lambda_min.to_f64().unwrap_or(f64::NAN),
        });
    }

    let slack_matrix = |g: &[T]| -> CMatrix<T> {
        let mut a = x1.clone();
        for i in 0..n {
            a[(i, i)] = a[(i, i)] - T::creal(g[i]);
        }
        a
    };
    let barrier_value = |g: &[T], mu: T| -> Option<T> {
        if g.iter().any(|&x| x <= T::zero() || x >= T::one()) {
            return None;
        }
        let (_, logdet) = cholesky_inverse_logdet(&slack_matrix(g))?;
        let linear: T = weights.iter().zip(g).map(|(&w, &x)| w * x).sum();
        let boxes: T = g
            .iter()
            .map(|&x| x.ln() + (T::one() - x).ln())
            .fold(T::zero(), |a, b| a + b);
        Some(linear + mu * (logdet + boxes))
    };

    // Strictly feasible start.
    let start = (T::real(0.45) * lambda_min).min(T::real(0.45));
    let mut g = vec![start; n];
    let mut mu = opts.barrier_mu0;

    while mu > opts.barrier_mu_min {
        mu = mu * opts.barrier_shrink;
        for _ in 0..opts.max_newton {
            let a = slack_matrix(&g);
            let (ainv, _) = cholesky_inverse_logdet(&a).ok_or(CloneError::NotConverged {
                objective: f64::NAN,
                gammas: g.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            })?;
            let mut grad = vec![T::zero(); n];
            for i in 0..n {
                grad[i] = weights[i] - mu * ainv[(i, i)].re + mu / g[i] - mu / (T::one() - g[i]);
            }
            // Negated Hessian (positive definite).
            let mut h = vec![T::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = mu * ainv[(i, j)].norm_sqr();
                }
                h[i * n + i] = h[i * n + i]
                    + mu * (T::one() / (g[i] * g[i])
                        + T::one() / ((T::one() - g[i]) * (T::one() - g[i])));
            }
            let Some(step) = solve_spd(&mut h, &grad) else {
                break;
            };
            let decrement: T = grad.iter().zip(step.iter()).map(|(&a, &b)| a * b).sum();
            if decrement <= T::real(1e-12) * T::one().max(mu) {
                break;
            }
            // Fraction-to-boundary cap on the box, then backtrack on the
            // barrier value (also rejects steps that leave the PSD cone).
            let mut t = T::one();
            for i in 0..n {
                if step[i] > T::zero() {
                    t = t.min(T::real(0.995) * (T::one() - g[i]) / step[i]);
                } else if step[i] < T::zero() {
                    t = t.min(T::real(0.995) * g[i] / -step[i]);
                }
            }
            let f0 = barrier_value(&g, mu).ok_or(CloneError::Infeasible)?;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<T> = g
                    .iter()
                    .zip(step.iter())
                    .map(|(&x, &d)| x + t * d)
                    .collect();
                if let Some(f) = barrier_value(&trial, mu) {
                    if f > f0 {
                        g = trial;
                        accepted = true;
                        break;
                    }
                }
                t = t * T::real(0.5);
            }
            if !accepted {
                break;
            }
        }
    }
    Ok(g)
}

/// Dense Cholesky solve of a real symmetric positive-definite system,
/// consuming the matrix buffer. Returns `None` if a pivot fails.
fn solve_spd<T: Scalar>(a: &mut [T], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - a[j * n + k] * a[j * n + k];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let ds = d.sqrt();
        a[j * n + j] = ds;
        for i in j + 1..n {
            let mut acc = a[i * n + j];
            for k in 0..j {
                acc = acc - a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = acc / ds;
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut acc = b[i];
        for k in 0..i {
            acc = acc - a[i * n + k] * y[k];
        }
        y[i] = acc / a[i * n + i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in i + 1..n {
            acc = acc - a[k * n + i] * x[k];
        }
        x[i] = acc / a[i * n + i];
    }
    Some(x)
}

/// Coordinate-wise bisection sweeps from the uniform solution for finite
/// m; stops once no coordinate improves the objective by more than the
/// configured threshold.
fn coordinate_sweeps<T: Scalar>(
    set: &StateSet<T>,
    m: CopyCount,
    probe: &ProbeGram<T>,
    weights: &[T],
    opts: &OptimizeOptions<T>,
) -> Result<Vec<T>, CloneError> {
    let n = set.n();
    let (uniform, _) = max_uniform_gamma(set, m, probe, opts.psd_tol)?;
    let mut g = vec![uniform; n];

    let is_feasible = |g: &[T]| -> Result<bool, CloneError> {
        let gamma = EfficiencyVector::new(g.to_vec())?;
        Ok(feasible(set, m, &gamma, probe, opts.psd_tol)?.feasible)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| weights[j].partial_cmp(&weights[i]).expect("finite weights"));

    for sweep in 0..opts.max_sweeps {
        let mut improved = false;
        for &i in &order {
            if weights[i] <= T::zero() {
                continue;
            }
            let base = g[i];
            let mut probe_full = g.to_vec();
            probe_full[i] = T::one();
            let hi = if is_feasible(&probe_full)? {
                T::one()
            } else {
                let mut lo = base;
                let mut hi = T::one();
                while hi - lo > tol::bisect_width::<T>() {
                    let mid = (lo + hi) * T::real(0.5);
                    let mut trial = g.to_vec();
                    trial[i] = mid;
                    if is_feasible(&trial)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            if weights[i] * (hi - base) > opts.sweep_improvement {
                improved = true;
            }
            g[i] = hi;
        }
        if !improved {
            return Ok(g);
        }
        if sweep + 1 == opts.max_sweeps {
            let objective: T = weights.iter().zip(&g).map(|(&w, &x)| w * x).sum();
            return Err(CloneError::NotConverged {
                objective: objective.to_f64().unwrap_or(f64::NAN),
                gammas: g.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            });
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::super::tests::two_state_set;
    use super::*;
    use crate::matcore::CVector;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// |Ψ_1⟩ ⊥ |Ψ_2⟩, |Ψ_3⟩ and ⟨Ψ_2|Ψ_3⟩ = s.
    pub(crate) fn orthogonal_plus_pair(s: f64) -> StateSet<f64> {
        let a = CVector::basis(3, 0);
        let b = CVector::basis(3, 1);
        let psi3 = CVector::new(vec![c(0.0, 0.0), c(s, 0.0), c((1.0 - s * s).sqrt(), 0.0)]);
        StateSet::new(3, vec![a, b, psi3]).unwrap()
    }

    #[test]
    fn symmetric_two_state_identification() {
        let set = two_state_set(0.5);
        let q = ProbeGram::all_ones(2);
        let (gamma, report) = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &[0.5, 0.5],
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(report.feasible);
        assert!((gamma.get(0) - 0.5).abs() < 1e-5, "γ_1 = {}", gamma.get(0));
        assert!((gamma.get(1) - 0.5).abs() < 1e-5, "γ_2 = {}", gamma.get(1));
    }

    #[test]
    fn three_state_identification_example() {
        let set = orthogonal_plus_pair(0.3);
        let q = ProbeGram::all_ones(3);
        let w = [1.0 / 3.0; 3];
        let (gamma, report) = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &w,
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(report.feasible);
        assert!((gamma.get(0) - 1.0).abs() < 1e-4, "γ_1 = {}", gamma.get(0));
        assert!((gamma.get(1) - 0.7).abs() < 1e-4, "γ_2 = {}", gamma.get(1));
        assert!((gamma.get(2) - 0.7).abs() < 1e-4, "γ_3 = {}", gamma.get(2));
    }

    #[test]
    fn lopsided_weights_trade_one_state_for_the_other() {
        // With all weight on γ_1 and γ_2 free to vanish, the determinant
        // condition (1−γ_1)(1−γ_2) ≥ s² caps γ_1 at 1 − s² = 0.75.
        let set = two_state_set(0.5);
        let q = ProbeGram::all_ones(2);
        let (gamma, _) = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &[1.0, 0.0],
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!((gamma.get(0) - 0.75).abs() < 1e-4, "γ_1 = {}", gamma.get(0));
        assert!(gamma.get(1).abs() < 1e-4, "γ_2 = {}", gamma.get(1));
    }

    #[test]
    fn finite_m_sweeps_beat_or_match_the_uniform_solution() {
        let set = orthogonal_plus_pair(0.4);
        let q = ProbeGram::all_ones(3);
        let w = [0.6, 0.2, 0.2];
        let opts = OptimizeOptions::default();
        let (uniform, _) = max_uniform_gamma(&set, CopyCount::Finite(2), &q, opts.psd_tol).unwrap();
        let (gamma, report) =
            optimize_weighted(&set, CopyCount::Finite(2), &q, &w, &opts).unwrap();
        assert!(report.feasible);
        let objective: f64 = w.iter().zip(gamma.as_slice()).map(|(a, b)| a * b).sum();
        let uniform_objective: f64 = w.iter().map(|a| a * uniform).sum();
        assert!(objective >= uniform_objective - 1e-12);
    }

    #[test]
    fn dependent_states_are_rejected() {
        let psi = CVector::new(vec![c(0.6, 0.0), c(0.8, 0.0)]);
        let set = StateSet::new(2, vec![psi.clone(), psi]).unwrap();
        let q = ProbeGram::all_ones(2);
        let err = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &[0.5, 0.5],
            &OptimizeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CloneError::DependentStates { .. }));
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let set = two_state_set(0.5);
        let q = ProbeGram::all_ones(2);
        let err = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &[0.7, 0.7],
            &OptimizeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CloneError::InvalidWeights { .. }));
    }
}
