//! Nucleotide sequences over the `{A, C, G, T}` alphabet.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::rng::seeded_rng;

const BASES: [u8; 4] = *b"ACGT";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("sequence must contain at least one base")]
    Empty,
    #[error("invalid base {found:?} at position {position} (expected one of A, C, G, T)")]
    InvalidBase { found: char, position: usize },
}

/// An immutable sequence of uppercase `A`/`C`/`G`/`T` bases.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NucleotideSequence {
    bases: Vec<u8>,
}

impl NucleotideSequence {
    /// Validate and wrap raw bases.
    pub fn new(bases: impl Into<Vec<u8>>) -> Result<Self, SequenceError> {
        let bases = bases.into();
        if bases.is_empty() {
            return Err(SequenceError::Empty);
        }
        for (position, &b) in bases.iter().enumerate() {
            if !BASES.contains(&b) {
                return Err(SequenceError::InvalidBase {
                    found: b as char,
                    position,
                });
            }
        }
        Ok(Self { bases })
    }

    pub fn parse(text: &str) -> Result<Self, SequenceError> {
        Self::new(text.as_bytes().to_vec())
    }

    /// Uniformly random sequence of exactly `length` bases; deterministic for
    /// a fixed seed (ChaCha8).
    pub fn generate(length: usize, seed: u64) -> Result<Self, SequenceError> {
        if length == 0 {
            return Err(SequenceError::Empty);
        }
        let mut rng = seeded_rng(seed);
        let bases = (0..length)
            .map(|_| BASES[rng.random_range(0..4)])
            .collect();
        Ok(Self { bases })
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bases
    }

    pub fn as_str(&self) -> &str {
        // Validated ASCII on construction.
        std::str::from_utf8(&self.bases).expect("sequence bases are ASCII")
    }

    /// The `k` sliding windows view used by k-mer shredding.
    pub fn windows(&self, k: usize) -> impl Iterator<Item = &[u8]> {
        self.bases.windows(k)
    }

    pub fn suffix(&self, len: usize) -> &[u8] {
        &self.bases[self.bases.len() - len..]
    }

    pub fn prefix(&self, len: usize) -> &[u8] {
        &self.bases[..len]
    }
}

impl fmt::Display for NucleotideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for NucleotideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NucleotideSequence({})", self.as_str())
    }
}
