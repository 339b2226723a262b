//! Directed overlap (OLC) graphs.
//!
//! Fragments (reads or k-mers) are vertices; a directed edge `u -> v` with
//! weight `L` records that the last `L` bases of `u` equal the first `L`
//! bases of `v`. Only the maximal qualifying overlap per ordered pair is
//! stored. Assembling the original sequence is finding a Hamiltonian path.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequence::{NucleotideSequence, SequenceError};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("k-mer length {k} exceeds sequence length {len}")]
    KmerTooLong { k: usize, len: usize },
    #[error("k-mer length must be at least 1")]
    KmerZero,
    #[error("fragment ids must be dense 0..{expected}, found id {found}")]
    NonDenseIds { expected: usize, found: usize },
    #[error("duplicate fragment label {label}")]
    DuplicateLabel { label: String },
    #[error("edge {from} -> {to}: {reason}")]
    InvalidEdge {
        from: usize,
        to: usize,
        reason: String,
    },
    #[error("graph is not weakly connected")]
    Disconnected,
    #[error("bridge structure does not form a chain: {reason}")]
    NotChain { reason: String },
    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),
    #[error("graph JSON: {0}")]
    Json(String),
}

/// A labeled vertex of the overlap graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub id: usize,
    pub label: NucleotideSequence,
}

/// A directed overlap edge: the last `overlap` bases of `from` equal the
/// first `overlap` bases of `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    #[serde(rename = "u")]
    pub from: usize,
    #[serde(rename = "v")]
    pub to: usize,
    pub overlap: usize,
}

/// Minimal read-only view of a directed graph, implemented both by
/// [`OlcGraph`] and by the label-free [`SimpleDigraph`] used in structural
/// tests and oracles.
pub trait DirectedGraph {
    fn vertex_count(&self) -> usize;
    /// `Some(overlap)` when the edge exists (structural graphs report 0).
    fn edge_overlap(&self, from: usize, to: usize) -> Option<usize>;
    /// All edges as `(from, to, overlap)`, sorted by `(from, to)`.
    fn edge_list(&self) -> Vec<(usize, usize, usize)>;

    fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edge_overlap(from, to).is_some()
    }

    fn edge_count(&self) -> usize {
        self.edge_list().len()
    }
}

/// Directed overlap graph with deduplicated, densely indexed fragments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OlcGraph {
    fragments: Vec<Fragment>,
    edges: Vec<Edge>, // sorted by (from, to)
}

impl OlcGraph {
    /// Build from parts, validating every structural invariant, including the
    /// suffix/prefix equality behind each stored overlap.
    pub fn from_parts(fragments: Vec<Fragment>, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        let n = fragments.len();
        let mut seen = BTreeSet::new();
        for (index, fragment) in fragments.iter().enumerate() {
            if fragment.id != index {
                return Err(GraphError::NonDenseIds {
                    expected: n,
                    found: fragment.id,
                });
            }
            if !seen.insert(fragment.label.clone()) {
                return Err(GraphError::DuplicateLabel {
                    label: fragment.label.to_string(),
                });
            }
        }
        edges.sort_unstable();
        let mut last: Option<(usize, usize)> = None;
        for edge in &edges {
            let invalid = |reason: &str| GraphError::InvalidEdge {
                from: edge.from,
                to: edge.to,
                reason: reason.to_string(),
            };
            if edge.from >= n || edge.to >= n {
                return Err(invalid("endpoint out of range"));
            }
            if edge.from == edge.to {
                return Err(invalid("self-loop"));
            }
            if last == Some((edge.from, edge.to)) {
                return Err(invalid("duplicate edge for ordered pair"));
            }
            last = Some((edge.from, edge.to));
            let a = &fragments[edge.from].label;
            let b = &fragments[edge.to].label;
            if edge.overlap == 0 || edge.overlap >= a.len().min(b.len()) {
                return Err(invalid("overlap length out of range"));
            }
            if a.suffix(edge.overlap) != b.prefix(edge.overlap) {
                return Err(invalid("suffix/prefix mismatch for stored overlap"));
            }
        }
        Ok(Self { fragments, edges })
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn fragment(&self, id: usize) -> &Fragment {
        &self.fragments[id]
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.edges
            .binary_search_by(|e| (e.from, e.to).cmp(&(from, to)))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn out_edges(&self, from: usize) -> impl Iterator<Item = &Edge> {
        let start = self.edges.partition_point(|e| e.from < from);
        self.edges[start..].iter().take_while(move |e| e.from == from)
    }

    /// A topological order, or `Err(cycle)` with one witness cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>, Vec<usize>> {
        let n = self.fragments.len();
        let mut succ = vec![Vec::new(); n];
        for e in &self.edges {
            succ[e.from].push(e.to);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        let mut stack_path = Vec::new();
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            // Iterative DFS keeping the current path for cycle extraction.
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            stack_path.push(root);
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < succ[v].len() {
                    let w = succ[v][*next];
                    *next += 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                            stack_path.push(w);
                        }
                        1 => {
                            let pos = stack_path.iter().position(|&x| x == w).unwrap();
                            return Err(stack_path[pos..].to_vec());
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                    stack.pop();
                    stack_path.pop();
                }
            }
        }
        order.reverse();
        Ok(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// Deterministic JSON rendering (`vertices` sorted by id, `edges` by
    /// `(u, v)`), with an optional metadata block.
    pub fn to_json(&self, metadata: Option<serde_json::Value>) -> String {
        let file = GraphFile {
            metadata,
            vertices: self
                .fragments
                .iter()
                .map(|f| VertexEntry {
                    id: f.id,
                    label: f.label.to_string(),
                })
                .collect(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
    }

    pub fn write_json<W: Write>(
        &self,
        mut writer: W,
        metadata: Option<serde_json::Value>,
    ) -> std::io::Result<()> {
        writer.write_all(self.to_json(metadata).as_bytes())?;
        writer.write_all(b"\n")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        let mut fragments = Vec::with_capacity(file.vertices.len());
        for v in file.vertices {
            fragments.push(Fragment {
                id: v.id,
                label: NucleotideSequence::parse(&v.label)?,
            });
        }
        Self::from_parts(fragments, file.edges)
    }
}

impl DirectedGraph for OlcGraph {
    fn vertex_count(&self) -> usize {
        self.fragments.len()
    }

    fn edge_overlap(&self, from: usize, to: usize) -> Option<usize> {
        self.edge(from, to).map(|e| e.overlap)
    }

    fn edge_list(&self) -> Vec<(usize, usize, usize)> {
        self.edges.iter().map(|e| (e.from, e.to, e.overlap)).collect()
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
    vertices: Vec<VertexEntry>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    id: usize,
    label: String,
}

/// Label-free digraph for structural algorithms and test corpora.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleDigraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SimpleDigraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .inspect(|&(u, v)| {
                assert!(u < n && v < n && u != v, "invalid edge ({u}, {v}) for n={n}")
            })
            .collect();
        Self { n, edges }
    }
}

impl DirectedGraph for SimpleDigraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn edge_overlap(&self, from: usize, to: usize) -> Option<usize> {
        self.edges.contains(&(from, to)).then_some(0)
    }

    fn edge_list(&self) -> Vec<(usize, usize, usize)> {
        self.edges.iter().map(|&(u, v)| (u, v, 0)).collect()
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Parameters of one synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub sequence_length: usize,
    pub k: usize,
    pub min_overlap: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.k == 0 || self.k > self.sequence_length {
            return Err(GraphError::InvalidSpec(format!(
                "require 1 <= k <= sequence_length, got k={}, sequence_length={}",
                self.k, self.sequence_length
            )));
        }
        if self.min_overlap == 0 || self.min_overlap > self.k - 1 {
            return Err(GraphError::InvalidSpec(format!(
                "require 1 <= min_overlap <= k-1, got min_overlap={}, k={}",
                self.min_overlap, self.k
            )));
        }
        Ok(())
    }
}

/// Sliding-window k-mers in order of first occurrence, deduplicated and
/// assigned dense ids.
pub fn shred_to_kmers(seq: &NucleotideSequence, k: usize) -> Result<Vec<Fragment>, GraphError> {
    if k == 0 {
        return Err(GraphError::KmerZero);
    }
    if k > seq.len() {
        return Err(GraphError::KmerTooLong { k, len: seq.len() });
    }
    let mut seen = BTreeSet::new();
    let mut fragments = Vec::new();
    for window in seq.windows(k) {
        if seen.insert(window.to_vec()) {
            fragments.push(Fragment {
                id: fragments.len(),
                label: NucleotideSequence::new(window.to_vec()).expect("window of valid sequence"),
            });
        }
    }
    Ok(fragments)
}

/// Largest `L` with `min_overlap <= L < min(len(a), len(b))` such that the
/// length-`L` suffix of `a` equals the length-`L` prefix of `b`.
pub fn detect_overlap(
    a: &NucleotideSequence,
    b: &NucleotideSequence,
    min_overlap: usize,
) -> Option<usize> {
    let max_len = a.len().min(b.len()).saturating_sub(1);
    let min_len = min_overlap.max(1);
    (min_len..=max_len)
        .rev()
        .find(|&len| a.suffix(len) == b.prefix(len))
}

/// All-against-all overlap detection over deduplicated fragments. Vertices
/// are preserved even when isolated.
pub fn build_olc_graph(
    fragments: Vec<Fragment>,
    min_overlap: usize,
) -> Result<OlcGraph, GraphError> {
    let n = fragments.len();
    let edges: Vec<Edge> = (0..n)
        .into_par_iter()
        .flat_map_iter(|from| {
            let fragments = &fragments;
            (0..n).filter_map(move |to| {
                if from == to {
                    return None;
                }
                detect_overlap(&fragments[from].label, &fragments[to].label, min_overlap)
                    .map(|overlap| Edge { from, to, overlap })
            })
        })
        .collect();
    OlcGraph::from_parts(fragments, edges)
}

/// Every Hamiltonian path of `g`, each as a vertex order, in lexicographic
/// order. Plain depth-first enumeration; independent of the QUBO machinery,
/// which it serves as an oracle for.
pub fn enumerate_hamiltonian_paths<G: DirectedGraph>(g: &G) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let mut succ = vec![Vec::new(); n];
    for (u, v, _) in g.edge_list() {
        succ[u].push(v);
    }
    let mut paths = Vec::new();
    let mut visited = vec![false; n];
    let mut path = Vec::with_capacity(n);
    for start in 0..n {
        visited[start] = true;
        path.push(start);
        extend_path(&succ, &mut visited, &mut path, &mut paths, n);
        path.pop();
        visited[start] = false;
    }
    paths
}

fn extend_path(
    succ: &[Vec<usize>],
    visited: &mut [bool],
    path: &mut Vec<usize>,
    paths: &mut Vec<Vec<usize>>,
    n: usize,
) {
    if path.len() == n {
        paths.push(path.clone());
        return;
    }
    let last = *path.last().unwrap();
    for &next in &succ[last] {
        if !visited[next] {
            visited[next] = true;
            path.push(next);
            extend_path(succ, visited, path, paths, n);
            path.pop();
            visited[next] = false;
        }
    }
}

/// Convenience: fragments keyed by label, used for dedup warnings upstream.
pub fn dedup_fragments(labels: Vec<NucleotideSequence>) -> (Vec<Fragment>, usize) {
    let mut seen = BTreeSet::new();
    let mut fragments = Vec::new();
    let mut duplicates = 0;
    for label in labels {
        if seen.insert(label.clone()) {
            fragments.push(Fragment {
                id: fragments.len(),
                label,
            });
        } else {
            duplicates += 1;
        }
    }
    (fragments, duplicates)
}
