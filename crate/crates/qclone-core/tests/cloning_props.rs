//! Invariants of the feasibility predicates and optimizers, checked
//! against independent oracles: closed forms for two states, determinant
//! arithmetic for the grid scans, and seeded random instances throughout.

use num_complex::Complex;
use qclone_core::cloning::{
    feasible, make_probe_gram, max_uniform_gamma, optimize_weighted, residual, two_state_bound,
    CopyCount, EfficiencyVector, OptimizeOptions, ProbeGram, ProbeMode,
};
use qclone_core::matcore::{min_eigenvalue, orthonormalize, CMatrix, CVector};
use qclone_core::states::{gram, StateSet};
use qclone_core::{tol, SplitMix64};

type C64 = Complex<f64>;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn random_state(dim: usize, rng: &mut SplitMix64) -> CVector<f64> {
    CVector::new(
        (0..dim)
            .map(|_| c(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect::<Vec<_>>(),
    )
    .normalized()
}

/// Random set with strictly positive entries, hence positive overlaps.
fn random_positive_set(dim: usize, n: usize, rng: &mut SplitMix64) -> StateSet<f64> {
    let states = (0..n)
        .map(|_| {
            CVector::new(
                (0..dim)
                    .map(|_| c(0.2 + 0.8 * rng.next_f64(), 0.0))
                    .collect::<Vec<_>>(),
            )
            .normalized()
        })
        .collect();
    StateSet::new(dim, states).unwrap()
}

fn random_orthonormal_set(dim: usize, n: usize, rng: &mut SplitMix64) -> StateSet<f64> {
    loop {
        let raw: Vec<_> = (0..n).map(|_| random_state(dim, rng)).collect();
        let basis = orthonormalize(&raw, 1e-6).unwrap().basis;
        if basis.cols() == n {
            return StateSet::new(dim, basis.columns()).unwrap();
        }
    }
}

/// Two states with the given complex overlap.
fn pair_with_overlap(t: C64) -> StateSet<f64> {
    let a = CVector::basis(2, 0);
    let b = CVector::new(vec![t, c((1.0 - t.norm_sqr()).sqrt(), 0.0)]);
    StateSet::new(2, vec![a, b]).unwrap()
}

#[test]
fn lambda_min_is_nonincreasing_in_uniform_gamma() {
    let mut rng = SplitMix64::new(101);
    for n in [2usize, 3] {
        let set = StateSet::new(3, (0..n).map(|_| random_state(3, &mut rng)).collect()).unwrap();
        let q = ProbeGram::all_ones(n);
        for m in [CopyCount::Finite(2), CopyCount::Infinite] {
            let mut prev = f64::INFINITY;
            for k in 0..=100 {
                let g = k as f64 / 100.0;
                let gamma = EfficiencyVector::uniform(n, g).unwrap();
                let r = residual(&set, m, &gamma, &q).unwrap();
                let lm = min_eigenvalue(&r).unwrap();
                assert!(lm <= prev + 1e-12, "λ_min rose from {prev} to {lm} at γ = {g}");
                prev = lm;
            }
        }
    }
}

#[test]
fn deterministic_cloning_iff_orthogonal() {
    let mut rng = SplitMix64::new(103);
    // Orthonormal sets are feasible at γ = 1 for m = 2 and 3.
    for n in 2..=4usize {
        let set = random_orthonormal_set(4, n, &mut rng);
        let ones = EfficiencyVector::uniform(n, 1.0).unwrap();
        let q = ProbeGram::all_ones(n);
        for m in [CopyCount::Finite(2), CopyCount::Finite(3)] {
            let rep = feasible(&set, m, &ones, &q, tol::psd_rel()).unwrap();
            assert!(rep.feasible, "orthonormal n = {n}, m = {m}: λ_min = {}", rep.lambda_min);
        }
    }
    // Strictly nonorthogonal pairs are not.
    for _ in 0..10 {
        let s = 0.05 + 0.9 * rng.next_f64();
        let phase = 2.0 * std::f64::consts::PI * rng.next_f64();
        let set = pair_with_overlap(c(s * phase.cos(), s * phase.sin()));
        let ones = EfficiencyVector::uniform(2, 1.0).unwrap();
        let q = ProbeGram::all_ones(2);
        let rep = feasible(&set, CopyCount::Finite(2), &ones, &q, tol::psd_rel()).unwrap();
        assert!(!rep.feasible, "overlap modulus {s} passed at γ = 1");
    }
}

#[test]
fn dependent_sets_admit_no_positive_uniform_gamma() {
    let mut rng = SplitMix64::new(107);
    for _ in 0..20 {
        // Three states in a two-dimensional space are always dependent.
        let set = StateSet::new(2, (0..3).map(|_| random_state(2, &mut rng)).collect()).unwrap();
        for m in [CopyCount::Finite(2), CopyCount::Finite(3)] {
            for mode in [ProbeMode::Single, ProbeMode::PhaseAligned] {
                let q = make_probe_gram(&set, m, mode).unwrap().gram;
                let (g, _) = max_uniform_gamma(&set, m, &q, tol::psd_rel()).unwrap();
                assert!(g <= 1e-8, "dependent set got γ* = {g}");
            }
        }
        // The residual itself goes indefinite at any appreciable γ.
        let gamma = EfficiencyVector::uniform(3, 1e-3).unwrap();
        let q = ProbeGram::all_ones(3);
        let rep = feasible(&set, CopyCount::Finite(2), &gamma, &q, tol::psd_rel()).unwrap();
        assert!(
            rep.lambda_min < 0.0,
            "expected an indefinite residual, got λ_min = {}",
            rep.lambda_min
        );
    }
}

#[test]
fn more_copies_cost_efficiency() {
    let mut rng = SplitMix64::new(109);
    let schedule = [
        CopyCount::Finite(2),
        CopyCount::Finite(3),
        CopyCount::Finite(5),
        CopyCount::Infinite,
    ];
    for n in [2usize, 3] {
        for _ in 0..5 {
            let set = random_positive_set(3, n, &mut rng);
            let q = ProbeGram::all_ones(n);
            let stars: Vec<f64> = schedule
                .iter()
                .map(|&m| max_uniform_gamma(&set, m, &q, tol::psd_rel()).unwrap().0)
                .collect();
            for w in stars.windows(2) {
                assert!(
                    w[0] >= w[1] - 1e-9,
                    "nesting violated: {stars:?} for n = {n}"
                );
            }
        }
    }
}

#[test]
fn phase_aligned_probe_attains_the_two_state_bound() {
    let mut rng = SplitMix64::new(113);
    for _ in 0..20 {
        let s = 0.05 + 0.9 * rng.next_f64();
        let phase = 2.0 * std::f64::consts::PI * rng.next_f64();
        let t = c(s * phase.cos(), s * phase.sin());
        let set = pair_with_overlap(t);
        for m in [
            CopyCount::Finite(2),
            CopyCount::Finite(3),
            CopyCount::Finite(5),
            CopyCount::Infinite,
        ] {
            let q = make_probe_gram(&set, m, ProbeMode::PhaseAligned).unwrap();
            assert!(!q.fell_back_to_single);
            let (g, _) = max_uniform_gamma(&set, m, &q.gram, tol::psd_rel()).unwrap();
            let bound = two_state_bound(t, m).unwrap();
            assert!(
                (g - bound).abs() <= 1e-8,
                "s = {s}, m = {m}: bisection {g} vs closed form {bound}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Grid-scan oracle for the weighted optimizer. Every principal minor of
// X¹ − Γ containing the pivot index is affine in the pivot efficiency
// with slope −(complementary minor), so the pivot coordinate closes in
// closed form and only the remaining ones are gridded. Pure determinant
// arithmetic, no shared code with the barrier solver.
// ---------------------------------------------------------------------------

/// Brute-force maximum of w·γ over `X¹ − Γ ⪰ 0`, `0 ≤ γ ≤ 1` for n ≤ 3.
/// The pivot is the heaviest coordinate; the reported value undershoots
/// the optimum by at most `step · Σ_gridded w`.
fn grid_scan_objective(x1: &CMatrix<f64>, w: &[f64], step: f64) -> f64 {
    let n = w.len();
    let first = (0..n)
        .max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap())
        .unwrap();
    let others: Vec<usize> = (0..n).filter(|&i| i != first).collect();
    let steps = (1.0 / step).ceil() as usize;
    let tiny = 1e-12;
    let mut best = f64::NEG_INFINITY;
    match others.len() {
        0 => w[first], // single state: γ ≤ 1 always feasible
        1 => {
            let o1 = others[0];
            let xf1 = x1[(first, o1)].norm_sqr();
            for k in 0..=steps {
                let g1 = (k as f64 * step).min(1.0);
                let d1 = 1.0 - g1;
                // Slack PSD at pivot 0 requires d1 ≥ 0 and d1 ≥ |x|².
                if d1 < -tiny || d1 - xf1 < -tiny {
                    continue;
                }
                let gmax = if d1 > tiny {
                    (1.0 - xf1 / d1).clamp(0.0, 1.0)
                } else {
                    1.0 // d1 ≈ 0 forces |x| ≈ 0; the pivot is unconstrained
                };
                best = best.max(w[first] * gmax + w[o1] * g1);
            }
            best
        }
        2 => {
            let (o1, o2) = (others[0], others[1]);
            let xf1 = x1[(first, o1)];
            let xf2 = x1[(first, o2)];
            let x12 = x1[(o1, o2)];
            let (nf1, nf2, n12) = (xf1.norm_sqr(), xf2.norm_sqr(), x12.norm_sqr());
            let cross = 2.0 * (xf1 * x12 * xf2.conj()).re;
            for k1 in 0..=steps {
                let g1 = (k1 as f64 * step).min(1.0);
                let d1 = 1.0 - g1;
                if d1 - nf1 < -tiny {
                    continue; // {first, o1} minor already negative at pivot 0
                }
                for k2 in 0..=steps {
                    let g2 = (k2 as f64 * step).min(1.0);
                    let d2 = 1.0 - g2;
                    // Principal minors of the slack at pivot 0.
                    let a = d1 * d2 - n12;
                    let b = nf1 * d2 + nf2 * d1 - cross;
                    if d2 - nf2 < -tiny || a < -tiny || a - b < -tiny {
                        continue;
                    }
                    let mut gmax = 1.0f64;
                    if d1 > tiny {
                        gmax = gmax.min((d1 - nf1) / d1);
                    }
                    if d2 > tiny {
                        gmax = gmax.min((d2 - nf2) / d2);
                    }
                    if a > tiny {
                        gmax = gmax.min((a - b) / a);
                    }
                    let obj = w[first] * gmax.max(0.0) + w[o1] * g1 + w[o2] * g2;
                    best = best.max(obj);
                }
            }
            best
        }
        _ => unreachable!("oracle supports n ≤ 3"),
    }
}

#[test]
fn weighted_optimizer_matches_grid_scan_for_two_states() {
    let mut rng = SplitMix64::new(127);
    for _ in 0..5 {
        let s = 0.1 + 0.8 * rng.next_f64();
        let set = pair_with_overlap(c(s, 0.0));
        let w0 = 0.1 + 0.8 * rng.next_f64();
        let w = [w0, 1.0 - w0];
        let q = ProbeGram::all_ones(2);
        let (gamma, report) = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &w,
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(report.feasible);
        let obj: f64 = w.iter().zip(gamma.as_slice()).map(|(a, b)| a * b).sum();
        let grid = grid_scan_objective(gram(&set).as_matrix(), &w, 1e-4);
        assert!(
            (obj - grid).abs() <= 2e-4,
            "s = {s}, w = {w:?}: solver {obj} vs grid {grid}"
        );
    }
}

#[test]
fn weighted_optimizer_matches_grid_scan_for_three_states() {
    let mut rng = SplitMix64::new(131);
    for _ in 0..3 {
        let set = loop {
            let trial =
                StateSet::new(3, (0..3).map(|_| random_state(3, &mut rng)).collect()).unwrap();
            let (ok, lmin) = qclone_core::states::is_linearly_independent_default(&trial).unwrap();
            if ok && lmin > 0.05 {
                break trial;
            }
        };
        let raw = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let q = ProbeGram::all_ones(3);
        let (gamma, report) = optimize_weighted(
            &set,
            CopyCount::Infinite,
            &q,
            &w,
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(report.feasible);
        let obj: f64 = w.iter().zip(gamma.as_slice()).map(|(a, b)| a * b).sum();
        // Step chosen so the gridded weight mass times the step stays
        // within the comparison tolerance.
        let w_max = w.iter().cloned().fold(0.0, f64::max);
        let gridded = 1.0 - w_max;
        let step = (1.8e-4 / gridded.max(1e-3)).min(2e-3);
        let grid = grid_scan_objective(gram(&set).as_matrix(), &w, step);
        let upper = gridded * step + 1e-5;
        assert!(
            obj >= grid - 1e-5 && obj <= grid + upper,
            "w = {w:?}: solver {obj} vs grid {grid} (upper slack {upper})"
        );
    }
}
