//! De novo sequence assembly via quadratic binary optimization.
//!
//! The pipeline mirrors the classic overlap-layout-consensus workflow, but the
//! layout step (finding a Hamiltonian path through the overlap graph) is
//! compiled into a QUBO/Ising problem and handed to an annealer:
//!
//! 1. [`olc`] — generate or ingest nucleotide sequences, shred them into
//!    k-mers, detect exact suffix–prefix overlaps and build the directed
//!    overlap graph; split large graphs at bridge edges.
//! 2. [`formulation`] — encode the Hamiltonian-path instance as a QUBO
//!    (positional `N²`-variable or edge-based `M`-variable form), convert
//!    between QUBO and Ising representations and normalize coefficients.
//! 3. [`solvers`] — minimize the Ising problem with the SimCIM
//!    quantum-inspired annealer, or exactly by exhaustive enumeration.
//! 4. [`assembly`] — decode solver output back into a graph path, validate
//!    it and reconstruct the assembled sequence; stitch partitioned solutions.
//! 5. [`bench`](mod@bench) — run seeded benchmark campaigns and report
//!    success probability, R99 and time-to-solution.
//!
//! All randomness flows from 64-bit seeds through ChaCha8 (see [`rng`]), so
//! every artifact except wall-clock timings is bit-reproducible.

pub mod assembly;
pub mod bench;
pub mod bridge;
pub mod fasta;
pub mod formulation;
pub mod olc;
pub mod qubo_format;
pub mod rational;
pub mod rng;
pub mod sequence;
pub mod solvers;

pub use assembly::GraphPath;
pub use formulation::{Encoding, IsingProblem, QuboProblem, VarKey, VariableMap};
pub use olc::{DirectedGraph, Edge, Fragment, InstanceSpec, OlcGraph, SimpleDigraph};
pub use sequence::NucleotideSequence;
pub use solvers::{SimCimParams, SolveResult, SpinConfiguration};
