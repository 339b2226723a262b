//! SimCIM: quantum-inspired annealing with continuous spin amplitudes.
//!
//! Each spin is relaxed to an amplitude `s_i` in `[-1, 1]`, starting at 0.
//! Every iteration computes the mean field acting on each spin, takes a
//! gradient step with Gaussian noise and a pump-controlled gain, and clips
//! the amplitudes back into the unit box:
//!
//! ```text
//! phi_i = -(h_i + sum_{j != i} J_ij s_j)
//! ds_i  = p_t s_i + zeta phi_i + N(0, sigma)
//! s_i  <- clip(s_i + ds_i)
//! ```
//!
//! The sign puts `phi` along the negative energy gradient, so following it
//! descends `H = sum h sigma + sum J sigma sigma`. After the final iteration
//! the discrete configuration is `sign(s)` (ties resolve to +1).

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::formulation::IsingProblem;
use crate::rational::to_f64;
use crate::rng::{derive_seed, seeded_rng};
use crate::solvers::{AttemptRecord, DenseIsing, SolveError, SolveResult, SpinConfiguration};

/// Linear pump ramp `p_t = start + (end - start) * t / iterations`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSchedule {
    pub start: f64,
    pub end: f64,
}

impl PumpSchedule {
    pub fn value(&self, step: usize, iterations: usize) -> f64 {
        self.start + (self.end - self.start) * step as f64 / iterations as f64
    }
}

impl Default for PumpSchedule {
    fn default() -> Self {
        // Below-to-above-threshold ramp.
        Self { start: -1.0, end: 1.0 }
    }
}

/// SimCIM control parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimCimParams {
    /// Update steps per attempt.
    pub iterations: usize,
    /// Independent restarts.
    pub attempts: usize,
    /// Coupling gain applied to the mean field.
    pub zeta: f64,
    /// Standard deviation of the per-spin, per-iteration Gaussian noise.
    pub noise_sigma: f64,
    pub pump: PumpSchedule,
    /// Master seed; per-attempt streams are derived from it.
    pub seed: u64,
}

impl Default for SimCimParams {
    fn default() -> Self {
        // Calibrated so that with 1000 attempts the solver reaches the exact
        // ground state across the whole synthetic corpus (QUBO sizes 9-64).
        Self {
            iterations: 1000,
            attempts: 1000,
            zeta: 0.8,
            noise_sigma: 0.05,
            pump: PumpSchedule::default(),
            seed: 0,
        }
    }
}

impl SimCimParams {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.iterations == 0 {
            return Err(SolveError::InvalidParams("iterations must be >= 1".into()));
        }
        if self.attempts == 0 {
            return Err(SolveError::InvalidParams("attempts must be >= 1".into()));
        }
        if !self.zeta.is_finite() || self.zeta <= 0.0 {
            return Err(SolveError::InvalidParams("zeta must be > 0".into()));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(SolveError::InvalidParams("noise_sigma must be >= 0".into()));
        }
        Ok(())
    }
}

fn check_normalized(problem: &IsingProblem) -> Result<(), SolveError> {
    let max = to_f64(&problem.max_abs_coefficient());
    if max > 1.0 + 1e-9 {
        return Err(SolveError::NotNormalized(max));
    }
    Ok(())
}

/// One annealing attempt; deterministic for a fixed `attempt_seed`.
/// Returns the configuration, its energy and the update-loop wall time.
pub fn simcim_attempt(
    problem: &IsingProblem,
    params: &SimCimParams,
    attempt_seed: u64,
) -> Result<(SpinConfiguration, f64, f64), SolveError> {
    params.validate()?;
    check_normalized(problem)?;
    let dense = DenseIsing::from_problem(problem);
    let (config, energy, wall_time_us) = run_attempt(&dense, params, attempt_seed);
    Ok((config, energy, wall_time_us))
}

fn run_attempt(
    dense: &DenseIsing,
    params: &SimCimParams,
    attempt_seed: u64,
) -> (SpinConfiguration, f64, f64) {
    let n = dense.n;
    let mut rng: ChaCha8Rng = seeded_rng(attempt_seed);
    let mut amplitudes = vec![0.0f64; n];
    let mut mean_field = vec![0.0f64; n];

    let start = Instant::now();
    for step in 0..params.iterations {
        let pump = params.pump.value(step, params.iterations);
        for (i, phi) in mean_field.iter_mut().enumerate() {
            let mut field = dense.h[i];
            for &(j, w) in &dense.neighbors[i] {
                field += w * amplitudes[j];
            }
            *phi = -field;
        }
        for (i, s) in amplitudes.iter_mut().enumerate() {
            let noise: f64 = rng.sample::<f64, _>(StandardNormal) * params.noise_sigma;
            let delta = pump * *s + params.zeta * mean_field[i] + noise;
            *s = (*s + delta).clamp(-1.0, 1.0);
        }
    }
    let wall_time_us = start.elapsed().as_secs_f64() * 1e6;

    let spins: Vec<i8> = amplitudes.iter().map(|&s| if s >= 0.0 { 1 } else { -1 }).collect();
    let energy = dense.energy(&spins);
    let config = SpinConfiguration::new(spins).expect("sign readout is +-1");
    (config, energy, wall_time_us)
}

/// Run `params.attempts` independent attempts with per-attempt seeds derived
/// from `params.seed`, aggregating into a [`SolveResult`]. When
/// `ground_energy_reference` is given, each attempt is marked as a ground
/// hit when its energy is within 1e-9 of the reference.
pub fn simcim_solve(
    problem: &IsingProblem,
    params: &SimCimParams,
    ground_energy_reference: Option<f64>,
) -> Result<SolveResult, SolveError> {
    params.validate()?;
    check_normalized(problem)?;
    let dense = DenseIsing::from_problem(problem);

    let outcomes: Vec<(SpinConfiguration, f64, f64)> = (0..params.attempts)
        .into_par_iter()
        .map(|attempt| {
            let seed = derive_seed(params.seed, "simcim-attempt", &[attempt as u64]);
            run_attempt(&dense, params, seed)
        })
        .collect();

    let best_index = outcomes
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("attempts >= 1");
    let best_config = outcomes[best_index].0.clone();
    let best_energy = outcomes[best_index].1;
    let attempts = outcomes
        .into_iter()
        .map(|(_, energy, wall_time_us)| AttemptRecord {
            energy,
            wall_time_us,
            hit_ground: ground_energy_reference.map(|g| energy <= g + 1e-9),
        })
        .collect();

    Ok(SolveResult {
        best_config,
        best_energy,
        attempts,
        ground_energy_reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::coef_int;
    use crate::solvers::brute_force;

    #[test]
    fn single_spin_aligns_with_the_field() {
        let mut m = IsingProblem::new(1);
        m.add_field(0, coef_int(-1));
        let params = SimCimParams { attempts: 1, ..Default::default() };
        let (config, energy, _) = simcim_attempt(&m, &params, 7).unwrap();
        assert_eq!(config.spins(), &[1]);
        assert_eq!(energy, -1.0);
    }

    #[test]
    fn zero_problem_without_noise_keeps_initial_signs() {
        // With h = 0, J = 0 and sigma = 0 the amplitudes stay at the initial
        // zero, and the sign readout resolves ties to +1.
        let m = IsingProblem::new(3);
        let params = SimCimParams {
            attempts: 1,
            noise_sigma: 0.0,
            ..Default::default()
        };
        let (config, energy, _) = simcim_attempt(&m, &params, 1).unwrap();
        assert_eq!(config.spins(), &[1, 1, 1]);
        assert_eq!(energy, 0.0);
    }

    #[test]
    fn rejects_unnormalized_problems() {
        let mut m = IsingProblem::new(1);
        m.add_field(0, coef_int(-2));
        let err = simcim_attempt(&m, &SimCimParams::default(), 0).unwrap_err();
        assert!(matches!(err, SolveError::NotNormalized(_)));
    }

    #[test]
    fn rejects_invalid_params() {
        let m = IsingProblem::new(1);
        let bad = SimCimParams { iterations: 0, ..Default::default() };
        assert!(matches!(
            simcim_attempt(&m, &bad, 0),
            Err(SolveError::InvalidParams(_))
        ));
        let bad = SimCimParams { zeta: 0.0, ..Default::default() };
        assert!(matches!(
            simcim_solve(&m, &bad, None),
            Err(SolveError::InvalidParams(_))
        ));
    }

    #[test]
    fn ferromagnetic_pair_reaches_ground_usually() {
        let mut m = IsingProblem::new(2);
        m.add_coupling(0, 1, coef_int(-1));
        let ground = brute_force(&m).unwrap();
        let params = SimCimParams { attempts: 1000, seed: 21, ..Default::default() };
        let result = simcim_solve(&m, &params, Some(ground.energy)).unwrap();
        let hits = result
            .attempts
            .iter()
            .filter(|a| a.hit_ground == Some(true))
            .count();
        assert!(hits >= 900, "only {hits}/1000 attempts reached the ground state");
        assert_eq!(result.best_energy, -1.0);
    }

    #[test]
    fn solve_aggregation_identity_for_one_attempt() {
        let mut m = IsingProblem::new(2);
        m.add_coupling(0, 1, coef_int(-1));
        let params = SimCimParams { attempts: 1, seed: 5, ..Default::default() };
        let result = simcim_solve(&m, &params, None).unwrap();
        assert_eq!(result.attempts.len(), 1);
        assert_eq!(result.best_energy, result.attempts[0].energy);
        let seed = derive_seed(5, "simcim-attempt", &[0]);
        let (config, energy, _) = simcim_attempt(&m, &params, seed).unwrap();
        assert_eq!(result.best_config, config);
        assert_eq!(result.best_energy, energy);
    }

    #[test]
    fn energies_are_deterministic_per_seed() {
        let mut m = IsingProblem::new(2);
        m.add_coupling(0, 1, coef_int(-1));
        let params = SimCimParams { attempts: 16, seed: 99, ..Default::default() };
        let a = simcim_solve(&m, &params, None).unwrap();
        let b = simcim_solve(&m, &params, None).unwrap();
        let ea: Vec<f64> = a.attempts.iter().map(|r| r.energy).collect();
        let eb: Vec<f64> = b.attempts.iter().map(|r| r.energy).collect();
        assert_eq!(ea, eb);
        assert_eq!(a.best_config, b.best_config);
    }

    #[test]
    fn amplitudes_stay_bounded() {
        // Indirect check: with an aggressive gain the readout is still valid
        // (+-1) and the energy finite, which requires clipping to have kept
        // the amplitudes in the unit box.
        let mut m = IsingProblem::new(4);
        for i in 0..4 {
            m.add_field(i, coef_int(1));
        }
        let params = SimCimParams {
            attempts: 4,
            zeta: 5.0,
            noise_sigma: 1.0,
            ..Default::default()
        };
        let result = simcim_solve(&m, &params, None).unwrap();
        assert!(result.best_energy.is_finite());
    }
}
