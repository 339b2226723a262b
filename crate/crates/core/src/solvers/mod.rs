//! Ising solvers: SimCIM quantum-inspired annealing and exhaustive
//! enumeration (the exactness oracle).

mod brute;
mod simcim;

pub use brute::{brute_force, brute_force_with_cap, GroundStates, BRUTE_FORCE_CAP};
pub use simcim::{simcim_attempt, simcim_solve, PumpSchedule, SimCimParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::IsingProblem;
use crate::rational::to_f64;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("configuration has {got} spins but the problem has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("spin values must be -1 or +1, found {0}")]
    InvalidSpin(i8),
    #[error(
        "problem has {n} variables, above the exhaustive-enumeration cap of {cap}; \
         use SimCIM for problems this large"
    )]
    TooLarge { n: usize, cap: usize },
    #[error("SimCIM requires normalized coefficients (max |h|, |J| <= 1), found {0}")]
    NotNormalized(f64),
    #[error("invalid solver parameter: {0}")]
    InvalidParams(String),
}

/// A classical spin assignment, every entry exactly -1 or +1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self, SolveError> {
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(SolveError::InvalidSpin(bad));
        }
        Ok(Self { spins })
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self {
            spins: bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect(),
        }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.spins.iter().map(|&s| u8::from(s > 0)).collect()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }
}

/// One SimCIM restart: final energy, update-loop wall time and (when a
/// reference energy was available) whether the ground state was reached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub energy: f64,
    pub wall_time_us: f64,
    pub hit_ground: Option<bool>,
}

/// Aggregated outcome of a multi-attempt solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_config: SpinConfiguration,
    pub best_energy: f64,
    pub attempts: Vec<AttemptRecord>,
    pub ground_energy_reference: Option<f64>,
}

impl SolveResult {
    /// Mean attempt wall time in microseconds.
    pub fn mean_attempt_time_us(&self) -> f64 {
        if self.attempts.is_empty() {
            return 0.0;
        }
        self.attempts.iter().map(|a| a.wall_time_us).sum::<f64>() / self.attempts.len() as f64
    }
}

/// Ising energy of a configuration (`offset + sum h sigma + sum J sigma sigma`).
pub fn energy(problem: &IsingProblem, config: &SpinConfiguration) -> Result<f64, SolveError> {
    if config.len() != problem.n() {
        return Err(SolveError::LengthMismatch {
            expected: problem.n(),
            got: config.len(),
        });
    }
    Ok(to_f64(&problem.energy(config.spins())))
}

/// Dense f64 view shared by the solver inner loops.
pub(crate) struct DenseIsing {
    pub n: usize,
    pub h: Vec<f64>,
    /// Symmetric neighbor lists: both `(j, J_ij)` under `i` and `(i, J_ij)`
    /// under `j` for every stored coupling.
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub offset: f64,
}

impl DenseIsing {
    pub fn from_problem(problem: &IsingProblem) -> Self {
        let n = problem.n();
        let mut h = vec![0.0; n];
        for (&i, c) in problem.h() {
            h[i] = to_f64(c);
        }
        let mut neighbors = vec![Vec::new(); n];
        for (&(i, j), c) in problem.j() {
            let w = to_f64(c);
            neighbors[i].push((j, w));
            neighbors[j].push((i, w));
        }
        Self {
            n,
            h,
            neighbors,
            offset: to_f64(problem.offset()),
        }
    }

    /// Energy with a fixed summation order (deterministic across calls).
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut total = self.offset;
        for (h, &s) in self.h.iter().zip(spins) {
            total += h * f64::from(s);
        }
        for i in 0..self.n {
            for &(j, w) in &self.neighbors[i] {
                if j > i {
                    total += w * f64::from(spins[i]) * f64::from(spins[j]);
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{coef, coef_int};

    #[test]
    fn spin_configuration_validates_entries() {
        assert!(SpinConfiguration::new(vec![1, -1, 1]).is_ok());
        assert!(matches!(
            SpinConfiguration::new(vec![1, 0]),
            Err(SolveError::InvalidSpin(0))
        ));
        let c = SpinConfiguration::from_bits(&[1, 0, 1]);
        assert_eq!(c.spins(), &[1, -1, 1]);
        assert_eq!(c.to_bits(), vec![1, 0, 1]);
    }

    #[test]
    fn energy_single_field() {
        let mut m = IsingProblem::new(1);
        m.add_field(0, coef_int(-1));
        let up = SpinConfiguration::new(vec![1]).unwrap();
        assert_eq!(energy(&m, &up).unwrap(), -1.0);
    }

    #[test]
    fn energy_ferromagnetic_pair() {
        let mut m = IsingProblem::new(2);
        m.add_coupling(0, 1, coef_int(-1));
        let aligned = SpinConfiguration::new(vec![1, 1]).unwrap();
        let opposed = SpinConfiguration::new(vec![1, -1]).unwrap();
        assert_eq!(energy(&m, &aligned).unwrap(), -1.0);
        assert_eq!(energy(&m, &opposed).unwrap(), 1.0);
    }

    #[test]
    fn energy_checks_length() {
        let m = IsingProblem::new(2);
        let c = SpinConfiguration::new(vec![1]).unwrap();
        assert!(matches!(
            energy(&m, &c),
            Err(SolveError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn energy_agrees_with_independent_evaluation() {
        // Double-entry check on a small random problem: rational evaluation
        // vs. a direct f64 loop over all terms.
        let mut rng = crate::rng::stream_rng(3, "energy-double-entry", &[]);
        use rand::Rng;
        for _ in 0..20 {
            let n = 3;
            let mut m = IsingProblem::new(n);
            let mut h = vec![0.0; n];
            let mut j = vec![vec![0.0; n]; n];
            for (i, field) in h.iter_mut().enumerate() {
                let c: i128 = rng.random_range(-8..=8);
                m.add_field(i, coef(c, 2));
                *field = c as f64 / 2.0;
            }
            for a in 0..n {
                for b in a + 1..n {
                    let c: i128 = rng.random_range(-8..=8);
                    m.add_coupling(a, b, coef(c, 2));
                    j[a][b] = c as f64 / 2.0;
                }
            }
            for mask in 0..1u8 << n {
                let spins: Vec<i8> =
                    (0..n).map(|i| if (mask >> i) & 1 == 1 { 1 } else { -1 }).collect();
                let config = SpinConfiguration::new(spins.clone()).unwrap();
                let mut direct = 0.0;
                for i in 0..n {
                    direct += h[i] * f64::from(spins[i]);
                }
                for a in 0..n {
                    for b in a + 1..n {
                        direct += j[a][b] * f64::from(spins[a]) * f64::from(spins[b]);
                    }
                }
                assert!((energy(&m, &config).unwrap() - direct).abs() < 1e-12);
            }
        }
    }
}
