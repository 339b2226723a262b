//! Exhaustive enumeration over all 2^n spin configurations.
//!
//! The scan runs in f64 with Gray-code incremental updates (one spin flip per
//! step, local-field bookkeeping), collecting every configuration within a
//! guard band of the running minimum; the candidates are then re-evaluated in
//! exact rational arithmetic, so the reported ground energy and the minimizer
//! set are exact.

use crate::formulation::IsingProblem;
use crate::rational::{to_f64, Coef};
use crate::solvers::{DenseIsing, SolveError, SpinConfiguration};

/// Default variable cap: 2^24 evaluations finish in seconds; larger problems
/// are refused rather than silently degrading.
pub const BRUTE_FORCE_CAP: usize = 24;

// Guard band for candidate collection; comfortably above the worst-case
// accumulated f64 drift of the incremental scan and below the energy
// resolution of rational-coefficient problems.
const CANDIDATE_TOLERANCE: f64 = 1e-4;

/// Exact minimum energy and the complete minimizer set, in lexicographic
/// order (spins compared entrywise with -1 before +1).
#[derive(Debug, Clone)]
pub struct GroundStates {
    pub energy: f64,
    pub energy_exact: Coef,
    pub configs: Vec<SpinConfiguration>,
}

/// [`brute_force_with_cap`] at the default cap of [`BRUTE_FORCE_CAP`].
pub fn brute_force(problem: &IsingProblem) -> Result<GroundStates, SolveError> {
    brute_force_with_cap(problem, BRUTE_FORCE_CAP)
}

pub fn brute_force_with_cap(
    problem: &IsingProblem,
    cap: usize,
) -> Result<GroundStates, SolveError> {
    let n = problem.n();
    if n > cap {
        return Err(SolveError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok(GroundStates {
            energy: to_f64(problem.offset()),
            energy_exact: *problem.offset(),
            configs: vec![SpinConfiguration::new(Vec::new()).expect("empty is valid")],
        });
    }

    let dense = DenseIsing::from_problem(problem);
    // Start from all spins down; local field f_i = h_i + sum_j J_ij sigma_j.
    let mut spins = vec![-1i8; n];
    let mut fields: Vec<f64> = (0..n)
        .map(|i| {
            dense.h[i]
                + dense.neighbors[i]
                    .iter()
                    .map(|&(j, w)| w * f64::from(spins[j]))
                    .sum::<f64>()
        })
        .collect();
    let mut current = dense.energy(&spins);

    let mut best = current;
    let mut candidates: Vec<u64> = vec![0];

    let total: u64 = 1 << n;
    for step in 1..total {
        // Gray code: flip the lowest set bit position of `step`.
        let i = step.trailing_zeros() as usize;
        let old = f64::from(spins[i]);
        current -= 2.0 * old * fields[i];
        spins[i] = -spins[i];
        let delta = f64::from(spins[i]) - old;
        for &(j, w) in &dense.neighbors[i] {
            fields[j] += w * delta;
        }

        if current < best - CANDIDATE_TOLERANCE {
            best = current;
            candidates.clear();
            candidates.push(spins_to_mask(&spins));
        } else if current <= best + CANDIDATE_TOLERANCE {
            if current < best {
                best = current;
            }
            candidates.push(spins_to_mask(&spins));
        }
    }

    // Exact pass over the candidates.
    let mut evaluated: Vec<(Coef, u64)> = candidates
        .into_iter()
        .map(|mask| {
            let spins = mask_to_spins(mask, n);
            (problem.energy(&spins), mask)
        })
        .collect();
    let min_exact = evaluated
        .iter()
        .map(|(e, _)| *e)
        .min()
        .expect("at least one candidate");
    evaluated.retain(|(e, _)| *e == min_exact);
    let mut masks: Vec<u64> = evaluated.into_iter().map(|(_, m)| m).collect();
    masks.sort_unstable();
    masks.dedup();
    let mut configs: Vec<SpinConfiguration> = masks
        .into_iter()
        .map(|mask| SpinConfiguration::new(mask_to_spins(mask, n)).expect("spins are +-1"))
        .collect();
    configs.sort();

    Ok(GroundStates {
        energy: to_f64(&min_exact),
        energy_exact: min_exact,
        configs,
    })
}

fn spins_to_mask(spins: &[i8]) -> u64 {
    spins
        .iter()
        .enumerate()
        .fold(0u64, |mask, (i, &s)| if s > 0 { mask | 1 << i } else { mask })
}

fn mask_to_spins(mask: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if (mask >> i) & 1 == 1 { 1 } else { -1 })
        .collect()
}
