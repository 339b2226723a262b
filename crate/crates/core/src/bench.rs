//! Benchmark campaigns: synthetic instance generation, solve runs, success
//! probability estimation and R99 / time-to-solution reporting.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{decode_edges, decode_positional, validate_hamiltonian_path};
use crate::formulation::{
    edge_qubo, normalize_ising, positional_qubo, qubo_to_ising, Encoding, FormulationError,
};
use crate::olc::{
    build_olc_graph, enumerate_hamiltonian_paths, shred_to_kmers, DirectedGraph, GraphError,
    InstanceSpec, OlcGraph,
};
use crate::rational::{to_f64, Coef};
use crate::rng::derive_seed;
use crate::sequence::NucleotideSequence;
use crate::solvers::{
    brute_force, simcim_solve, AttemptRecord, SimCimParams, SolveError, SolveResult,
    BRUTE_FORCE_CAP,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(
        "could not generate an acceptable instance for length {length}, slot {instance} \
         within {attempts} attempts"
    )]
    RegenerationExhausted {
        length: usize,
        instance: usize,
        attempts: usize,
    },
    #[error(
        "oracle disagrees with the enumerator-derived ground energy on length {length}, \
         slot {instance}: oracle {oracle}, expected {expected}"
    )]
    OracleMismatch {
        length: usize,
        instance: usize,
        oracle: f64,
        expected: f64,
    },
    #[error("invalid campaign spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Fraction of attempts that reached the reference ground energy
/// (within 1e-9).
pub fn estimate_theta(result: &SolveResult, ground_energy: f64) -> f64 {
    if result.attempts.is_empty() {
        return 0.0;
    }
    let hits = result
        .attempts
        .iter()
        .filter(|a| a.energy <= ground_energy + 1e-9)
        .count();
    hits as f64 / result.attempts.len() as f64
}

// Rationalize a short decimal: theta ~= num / 10^k for some k <= 12.
fn rationalize_decimal(theta: f64) -> Option<(f64, f64)> {
    let mut den = 1.0f64;
    for _ in 0..=12 {
        let scaled = theta * den;
        let rounded = scaled.round();
        if (scaled - rounded).abs() <= 1e-9 * den {
            return Some((rounded, den));
        }
        den *= 10.0;
    }
    None
}

/// Runs needed to hit the ground state at least once with probability 0.99:
/// `log(1 - 0.99) / log(1 - theta)`.
///
/// Returns `None` for `theta = 0` (the unsolved marker) and 1 for
/// `theta = 1`. Short-decimal theta values are evaluated through integer
/// logarithms so that identities like `r99(0.9) = 2` hold exactly.
pub fn r99(theta: f64) -> Option<f64> {
    assert!(
        (0.0..=1.0).contains(&theta),
        "theta must lie in [0, 1], got {theta}"
    );
    if theta == 0.0 {
        return None;
    }
    if theta == 1.0 {
        return Some(1.0);
    }
    if let Some((num, den)) = rationalize_decimal(theta) {
        // log(0.01) / log((den - num) / den), all through integer logs.
        // Degenerate snaps (theta within 1e-9 of 0 or 1) fall through.
        let remainder = den - num;
        if num >= 1.0 && remainder >= 1.0 {
            return Some(100f64.ln() / (den.ln() - remainder.ln()));
        }
    }
    Some(0.01f64.ln() / (-theta).ln_1p())
}

/// Time-to-solution: `t_a * r99(theta)`, in the unit of `t_a`.
pub fn tts(theta: f64, t_a_us: f64) -> Option<f64> {
    r99(theta).map(|runs| t_a_us * runs)
}

/// Success-probability and time-to-solution summary of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TtsReport {
    pub theta: f64,
    /// `None` when no attempt reached the ground state.
    pub r99: Option<f64>,
    pub tts_us: Option<f64>,
    pub t_a_us: f64,
    pub runs: usize,
    pub hits: usize,
}

pub fn tts_report(result: &SolveResult, ground_energy: f64, t_a_us: f64) -> TtsReport {
    let theta = estimate_theta(result, ground_energy);
    let hits = result
        .attempts
        .iter()
        .filter(|a| a.energy <= ground_energy + 1e-9)
        .count();
    TtsReport {
        theta,
        r99: r99(theta),
        tts_us: tts(theta, t_a_us),
        t_a_us,
        runs: result.attempts.len(),
        hits,
    }
}

/// Which per-run time feeds the TTS column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaPolicy {
    /// Mean measured attempt wall time.
    Measured,
    /// A fixed per-run time in microseconds (annealer convention, e.g. 20).
    Fixed(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignSpec {
    pub lengths: Vec<usize>,
    pub instances_per_length: usize,
    pub k: usize,
    /// Defaults to `k - 1` when absent.
    pub min_overlap: Option<usize>,
    pub encoding: Encoding,
    #[serde(serialize_with = "serialize_coef")]
    pub penalty: Coef,
    pub solver: SimCimParams,
    pub master_seed: u64,
    pub ta_policy: TaPolicy,
}

fn serialize_coef<S: serde::Serializer>(c: &Coef, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

impl Default for CampaignSpec {
    fn default() -> Self {
        Self {
            lengths: (5..=10).collect(),
            instances_per_length: 10,
            k: 3,
            min_overlap: None,
            encoding: Encoding::Positional,
            penalty: crate::rational::coef_int(1),
            solver: SimCimParams::default(),
            master_seed: 0,
            ta_policy: TaPolicy::Measured,
        }
    }
}

/// How the ground-energy reference of an instance was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certification {
    /// Exhaustive enumeration of the solved problem.
    Oracle,
    /// Hamiltonian-path enumerator on the overlap graph (the encoding's
    /// ground energy is then known in closed form).
    Enumerator,
}

/// Reasons an instance draw was rejected and regenerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegenReason {
    DuplicateKmers,
    DuplicateGraph,
    NoHamiltonianPath,
    TrivialChain,
    CyclicGraph,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub length: usize,
    pub instance: usize,
    pub seed: u64,
    pub encoding: Encoding,
    pub n_vars: usize,
    /// Ground energy in the QUBO objective's domain (0 positional, 2A edge).
    pub ground_energy: f64,
    /// The same reference in the solver's normalized-coefficient domain;
    /// theta is recomputable as the fraction of stored attempt energies
    /// within 1e-9 of this value.
    pub ground_energy_normalized: f64,
    pub certification: Certification,
    pub theta: f64,
    pub r99: Option<f64>,
    pub t_a_us: f64,
    pub tts_us: Option<f64>,
    pub valid_assembly: bool,
    pub sequence: String,
    pub reconstructed: Option<String>,
    pub hamiltonian_paths: usize,
    pub unique_path: bool,
    pub regenerations: Vec<RegenReason>,
    pub runs: usize,
    pub hits: usize,
    pub attempts: Vec<AttemptRecord>,
}

struct AcceptedInstance {
    length: usize,
    instance: usize,
    seed: u64,
    sequence: NucleotideSequence,
    graph: OlcGraph,
    path_count: usize,
    regenerations: Vec<RegenReason>,
}

const MAX_REGENERATIONS: usize = 10_000;

fn graph_key(g: &OlcGraph) -> String {
    let mut key = String::new();
    for f in g.fragments() {
        key.push_str(f.label.as_str());
        key.push(',');
    }
    key.push('|');
    for e in g.edges() {
        key.push_str(&format!("{}-{}-{};", e.from, e.to, e.overlap));
    }
    key
}

// Sequential generation pass: acceptance depends on previously accepted
// graphs (dedup), so this stage must not run concurrently.
fn generate_instances(spec: &CampaignSpec) -> Result<Vec<AcceptedInstance>, BenchError> {
    let min_overlap = spec.min_overlap.unwrap_or(spec.k.saturating_sub(1));
    if spec.instances_per_length == 0 || spec.lengths.is_empty() {
        return Err(BenchError::InvalidSpec(
            "campaign needs at least one length and one instance per length".into(),
        ));
    }

    let mut seen_graphs = std::collections::BTreeSet::new();
    let mut accepted = Vec::new();
    for &length in &spec.lengths {
        InstanceSpec {
            sequence_length: length,
            k: spec.k,
            min_overlap,
            seed: spec.master_seed,
        }
        .validate()?;
        for instance in 0..spec.instances_per_length {
            let mut regenerations = Vec::new();
            let mut found = None;
            for attempt in 0..MAX_REGENERATIONS {
                let seed = derive_seed(
                    spec.master_seed,
                    "instance",
                    &[length as u64, instance as u64, attempt as u64],
                );
                let sequence =
                    NucleotideSequence::generate(length, seed).expect("length >= k >= 1");
                let fragments = shred_to_kmers(&sequence, spec.k)?;
                if fragments.len() != length - spec.k + 1 {
                    regenerations.push(RegenReason::DuplicateKmers);
                    continue;
                }
                let graph = build_olc_graph(fragments, min_overlap)?;
                if seen_graphs.contains(&graph_key(&graph)) {
                    regenerations.push(RegenReason::DuplicateGraph);
                    continue;
                }
                let paths = enumerate_hamiltonian_paths(&graph);
                if paths.is_empty() {
                    regenerations.push(RegenReason::NoHamiltonianPath);
                    continue;
                }
                if graph.edge_count() == graph.vertex_count().saturating_sub(1) {
                    regenerations.push(RegenReason::TrivialChain);
                    continue;
                }
                if spec.encoding == Encoding::Edge && !graph.is_acyclic() {
                    regenerations.push(RegenReason::CyclicGraph);
                    continue;
                }
                seen_graphs.insert(graph_key(&graph));
                found = Some(AcceptedInstance {
                    length,
                    instance,
                    seed,
                    sequence,
                    graph,
                    path_count: paths.len(),
                    regenerations: std::mem::take(&mut regenerations),
                });
                break;
            }
            match found {
                Some(inst) => accepted.push(inst),
                None => {
                    return Err(BenchError::RegenerationExhausted {
                        length,
                        instance,
                        attempts: MAX_REGENERATIONS,
                    })
                }
            }
        }
    }
    Ok(accepted)
}

fn solve_instance(spec: &CampaignSpec, inst: &AcceptedInstance) -> Result<InstanceReport, BenchError> {
    let (qubo, map) = match spec.encoding {
        Encoding::Positional => positional_qubo(&inst.graph, &spec.penalty)?,
        Encoding::Edge => edge_qubo(&inst.graph, &spec.penalty)?,
    };
    let ising = qubo_to_ising(&qubo);
    let (normalized, scale) = normalize_ising(&ising);

    // The instance filter guarantees a Hamiltonian path, so the QUBO ground
    // energy is known in closed form: 0 for positional, 2A for edge.
    let qubo_ground: Coef = match spec.encoding {
        Encoding::Positional => crate::rational::coef_int(0),
        Encoding::Edge => spec.penalty * crate::rational::coef_int(2),
    };
    // Energy in the normalized domain: offset + (E - offset) / scale.
    let normalized_ground: Coef =
        normalized.offset() + (qubo_ground - normalized.offset()) / scale;
    let normalized_ground_f64 = to_f64(&normalized_ground);

    let certification = if normalized.n() <= BRUTE_FORCE_CAP {
        let oracle = brute_force(&normalized)?;
        if oracle.energy_exact != normalized_ground {
            return Err(BenchError::OracleMismatch {
                length: inst.length,
                instance: inst.instance,
                oracle: oracle.energy,
                expected: normalized_ground_f64,
            });
        }
        Certification::Oracle
    } else {
        Certification::Enumerator
    };

    let solver = SimCimParams {
        seed: derive_seed(
            spec.master_seed,
            "solve",
            &[inst.length as u64, inst.instance as u64],
        ),
        ..spec.solver.clone()
    };
    let result = simcim_solve(&normalized, &solver, Some(normalized_ground_f64))?;

    let t_a_us = match spec.ta_policy {
        TaPolicy::Measured => result.mean_attempt_time_us(),
        TaPolicy::Fixed(us) => us,
    };
    let report = tts_report(&result, normalized_ground_f64, t_a_us);

    let mut reconstructed = None;
    let mut valid_assembly = false;
    if result.best_energy <= normalized_ground_f64 + 1e-9 {
        let bits = result.best_config.to_bits();
        let decoded = match spec.encoding {
            Encoding::Positional => decode_positional(&bits, &map, &inst.graph),
            Encoding::Edge => decode_edges(&bits, &map, &inst.graph),
        };
        if let Ok(path) = decoded {
            if validate_hamiltonian_path(&inst.graph, &path) {
                if let Ok(sequence) = crate::assembly::reconstruct_sequence(&path, &inst.graph) {
                    valid_assembly = inst.path_count > 1 || sequence == inst.sequence;
                    reconstructed = Some(sequence.to_string());
                }
            }
        }
    }

    Ok(InstanceReport {
        length: inst.length,
        instance: inst.instance,
        seed: inst.seed,
        encoding: spec.encoding,
        n_vars: qubo.n(),
        ground_energy: to_f64(&qubo_ground),
        ground_energy_normalized: normalized_ground_f64,
        certification,
        theta: report.theta,
        r99: report.r99,
        t_a_us: report.t_a_us,
        tts_us: report.tts_us,
        valid_assembly,
        sequence: inst.sequence.to_string(),
        reconstructed,
        hamiltonian_paths: inst.path_count,
        unique_path: inst.path_count == 1,
        regenerations: inst.regenerations.clone(),
        runs: report.runs,
        hits: report.hits,
        attempts: result.attempts,
    })
}

/// Run a full campaign: generate filtered instances, solve each one and
/// report per-instance TTS. Reports are ordered by (length, instance index)
/// regardless of solve concurrency; all non-timing fields depend only on the
/// spec and master seed.
pub fn run_campaign(spec: &CampaignSpec) -> Result<Vec<InstanceReport>, BenchError> {
    let instances = generate_instances(spec)?;
    instances
        .par_iter()
        .map(|inst| solve_instance(spec, inst))
        .collect()
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "unsolved".to_string(),
    }
}

/// CSV rendering with `#`-prefixed metadata comment lines.
pub fn render_csv(reports: &[InstanceReport], metadata: &[String]) -> String {
    let mut out = String::new();
    for line in metadata {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(
        "length,instance,seed,encoding,n_vars,ground_energy,theta,r99,t_a_us,tts_us,valid_assembly\n",
    );
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.length,
            r.instance,
            r.seed,
            r.encoding,
            r.n_vars,
            r.ground_energy,
            r.theta,
            fmt_opt(r.r99),
            r.t_a_us,
            fmt_opt(r.tts_us),
            r.valid_assembly
        ));
    }
    out
}

/// TTS summary statistics over one group of reports.
#[derive(Debug, Clone, Serialize)]
pub struct TtsSummary {
    pub length: usize,
    pub solved: usize,
    pub total: usize,
    pub mean_us: f64,
    pub min_us: f64,
    pub max_us: f64,
    pub p90_us: f64,
}

/// Per-length mean / min / max / 90th-percentile TTS over solved instances.
pub fn summarize_tts(reports: &[InstanceReport]) -> Vec<TtsSummary> {
    let mut lengths: Vec<usize> = reports.iter().map(|r| r.length).collect();
    lengths.sort_unstable();
    lengths.dedup();
    lengths
        .into_iter()
        .map(|length| {
            let group: Vec<&InstanceReport> =
                reports.iter().filter(|r| r.length == length).collect();
            let mut values: Vec<f64> = group.iter().filter_map(|r| r.tts_us).collect();
            values.sort_by(f64::total_cmp);
            let solved = values.len();
            let (mean, min, max, p90) = if values.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            } else {
                let mean = values.iter().sum::<f64>() / solved as f64;
                // Nearest-rank 90th percentile.
                let rank = ((0.9 * solved as f64).ceil() as usize).clamp(1, solved);
                (mean, values[0], values[solved - 1], values[rank - 1])
            };
            TtsSummary {
                length,
                solved,
                total: group.len(),
                mean_us: mean,
                min_us: min,
                max_us: max,
                p90_us: p90,
            }
        })
        .collect()
}

/// Write a JSON report, gzip-compressing when it exceeds 10 MB. Returns the
/// path actually written (`.gz` appended when compressed).
pub fn write_json_report(path: &Path, value: &serde_json::Value) -> Result<PathBuf, BenchError> {
    let body = serde_json::to_vec_pretty(value).expect("report serialization cannot fail");
    if body.len() > 10 * 1024 * 1024 {
        let mut gz_path = path.as_os_str().to_owned();
        gz_path.push(".gz");
        let gz_path = PathBuf::from(gz_path);
        let file = std::fs::File::create(&gz_path)?;
        let mut encoder = flate2::write::GzEncoder::new(file, flate2::Compression::default());
        encoder.write_all(&body)?;
        encoder.finish()?;
        Ok(gz_path)
    } else {
        std::fs::write(path, &body)?;
        Ok(path.to_path_buf())
    }
}
