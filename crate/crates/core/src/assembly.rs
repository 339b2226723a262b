//! Decoding solver output back into graph paths and sequences.
//!
//! Decoding is strict: configurations that are not exact encodings of a
//! Hamiltonian path are rejected with a diagnosis (row/column deficits,
//! degree violations, uncovered vertices) rather than repaired, since only
//! exact ground states have a valid assembly interpretation.

use thiserror::Error;

use crate::formulation::{Encoding, VariableMap, VarKey};
use crate::olc::{DirectedGraph, Edge, OlcGraph};
use crate::sequence::NucleotideSequence;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("configuration has {got} bits but the encoding needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("variable map encoding is {found} but {expected} was required")]
    WrongEncoding { expected: Encoding, found: Encoding },
    #[error("variable map ({map_len} vars) does not fit a graph with {vertex_count} vertices")]
    MapGraphMismatch { map_len: usize, vertex_count: usize },
    #[error(
        "configuration is not a permutation matrix: vertices with step-count != 1: {rows:?}, \
         steps with vertex-count != 1: {cols:?}"
    )]
    NotPermutation {
        rows: Vec<(usize, usize)>,
        cols: Vec<(usize, usize)>,
    },
    #[error("decoded path uses absent edge {from} -> {to}")]
    MissingEdge { from: usize, to: usize },
    #[error("vertex {vertex} has {incoming} incoming and {outgoing} outgoing selected edges")]
    DegreeViolation {
        vertex: usize,
        incoming: usize,
        outgoing: usize,
    },
    #[error("selected edges leave vertices uncovered: {missing:?}")]
    IncompleteCover { missing: Vec<usize> },
    #[error("selected edges form {components} separate path components")]
    MultipleComponents { components: usize },
    #[error("selected edges contain a cycle")]
    CycleInSelection,
    #[error("path edge {from} -> {to}: stored overlap {overlap} fails string equality")]
    CorruptOverlap {
        from: usize,
        to: usize,
        overlap: usize,
    },
    #[error("path does not follow its own edge list at position {position}")]
    InconsistentPath { position: usize },
    #[error(
        "bridge {from} -> {to} does not match part endpoints (previous part ends at \
         {part_end}, next part starts at {part_start})"
    )]
    EndpointMismatch {
        from: usize,
        to: usize,
        part_end: usize,
        part_start: usize,
    },
    #[error("partition list malformed: {0}")]
    BadPartition(String),
    #[error("merged parts repeat vertex {0}")]
    DuplicateVertex(usize),
}

/// A simple directed path: ordered vertices plus the edges joining them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPath {
    pub vertices: Vec<usize>,
    pub edges_used: Vec<Edge>,
}

/// Decode a positional (vertex-at-step) configuration. The bit matrix must
/// be a permutation matrix whose step order follows graph edges.
pub fn decode_positional<G: DirectedGraph>(
    bits: &[u8],
    map: &VariableMap,
    g: &G,
) -> Result<GraphPath, AssemblyError> {
    if map.encoding() != Encoding::Positional {
        return Err(AssemblyError::WrongEncoding {
            expected: Encoding::Positional,
            found: map.encoding(),
        });
    }
    if bits.len() != map.len() {
        return Err(AssemblyError::LengthMismatch {
            expected: map.len(),
            got: bits.len(),
        });
    }
    let n = g.vertex_count();
    if map.len() != n * n {
        return Err(AssemblyError::MapGraphMismatch {
            map_len: map.len(),
            vertex_count: n,
        });
    }
    let mut row_counts = vec![0usize; n];
    let mut col_counts = vec![0usize; n];
    let mut vertex_at_step = vec![usize::MAX; n];
    for (var, &bit) in bits.iter().enumerate() {
        if bit != 1 {
            continue;
        }
        let VarKey::Position { vertex, step } = map.key(var).expect("map covers all vars") else {
            unreachable!("positional map holds positional keys");
        };
        if *vertex >= n || *step >= n {
            return Err(AssemblyError::MapGraphMismatch {
                map_len: map.len(),
                vertex_count: n,
            });
        }
        row_counts[*vertex] += 1;
        col_counts[*step] += 1;
        vertex_at_step[*step] = *vertex;
    }
    let rows: Vec<(usize, usize)> = row_counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 1)
        .map(|(v, &c)| (v, c))
        .collect();
    let cols: Vec<(usize, usize)> = col_counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 1)
        .map(|(j, &c)| (j, c))
        .collect();
    if !rows.is_empty() || !cols.is_empty() {
        return Err(AssemblyError::NotPermutation { rows, cols });
    }

    let mut edges_used = Vec::with_capacity(n.saturating_sub(1));
    for pair in vertex_at_step.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        let overlap = g
            .edge_overlap(from, to)
            .ok_or(AssemblyError::MissingEdge { from, to })?;
        edges_used.push(Edge { from, to, overlap });
    }
    Ok(GraphPath {
        vertices: vertex_at_step,
        edges_used,
    })
}

/// Decode an edge-selection configuration: the selected edges must form a
/// single directed path covering every vertex.
pub fn decode_edges<G: DirectedGraph>(
    bits: &[u8],
    map: &VariableMap,
    g: &G,
) -> Result<GraphPath, AssemblyError> {
    if map.encoding() != Encoding::Edge {
        return Err(AssemblyError::WrongEncoding {
            expected: Encoding::Edge,
            found: map.encoding(),
        });
    }
    if bits.len() != map.len() {
        return Err(AssemblyError::LengthMismatch {
            expected: map.len(),
            got: bits.len(),
        });
    }
    let n = g.vertex_count();
    let mut selected = Vec::new();
    for (var, &bit) in bits.iter().enumerate() {
        if bit != 1 {
            continue;
        }
        let VarKey::Edge { from, to } = map.key(var).expect("map covers all vars") else {
            unreachable!("edge map holds edge keys");
        };
        if *from >= n || *to >= n {
            return Err(AssemblyError::MapGraphMismatch {
                map_len: map.len(),
                vertex_count: n,
            });
        }
        selected.push((*from, *to));
    }

    let mut out_count = vec![0usize; n];
    let mut in_count = vec![0usize; n];
    let mut successor = vec![usize::MAX; n];
    for &(from, to) in &selected {
        out_count[from] += 1;
        in_count[to] += 1;
        successor[from] = to;
    }
    for vertex in 0..n {
        if out_count[vertex] > 1 || in_count[vertex] > 1 {
            return Err(AssemblyError::DegreeViolation {
                vertex,
                incoming: in_count[vertex],
                outgoing: out_count[vertex],
            });
        }
    }
    if n == 1 {
        return Ok(GraphPath {
            vertices: vec![0],
            edges_used: Vec::new(),
        });
    }
    let missing: Vec<usize> = (0..n)
        .filter(|&v| out_count[v] == 0 && in_count[v] == 0)
        .collect();
    if !missing.is_empty() {
        return Err(AssemblyError::IncompleteCover { missing });
    }
    let starts: Vec<usize> = (0..n)
        .filter(|&v| out_count[v] == 1 && in_count[v] == 0)
        .collect();
    if starts.is_empty() {
        // Every touched vertex has an incoming edge: a cycle.
        return Err(AssemblyError::CycleInSelection);
    }
    if starts.len() > 1 {
        return Err(AssemblyError::MultipleComponents {
            components: starts.len(),
        });
    }

    let mut vertices = Vec::with_capacity(n);
    let mut current = starts[0];
    vertices.push(current);
    while successor[current] != usize::MAX && vertices.len() <= n {
        current = successor[current];
        vertices.push(current);
    }
    if vertices.len() != n {
        // Every vertex is touched and there is a single path start, so the
        // unreached vertices must sit on cycles.
        return Err(AssemblyError::CycleInSelection);
    }
    let mut edges_used = Vec::with_capacity(n - 1);
    for pair in vertices.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        let overlap = g
            .edge_overlap(from, to)
            .ok_or(AssemblyError::MissingEdge { from, to })?;
        edges_used.push(Edge { from, to, overlap });
    }
    Ok(GraphPath {
        vertices,
        edges_used,
    })
}

/// True iff `path` visits every vertex of `g` exactly once and consecutive
/// vertices are joined by graph edges.
pub fn validate_hamiltonian_path<G: DirectedGraph>(g: &G, path: &GraphPath) -> bool {
    let n = g.vertex_count();
    if path.vertices.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in &path.vertices {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    path.vertices
        .windows(2)
        .all(|pair| g.has_edge(pair[0], pair[1]))
}

/// Merge overlapping fragment labels along a path: the first label in full,
/// then each next label minus its overlap prefix. The stored overlaps are
/// re-checked by string comparison.
pub fn reconstruct_sequence(
    path: &GraphPath,
    g: &OlcGraph,
) -> Result<NucleotideSequence, AssemblyError> {
    if path.edges_used.len() + 1 != path.vertices.len() {
        return Err(AssemblyError::InconsistentPath { position: 0 });
    }
    let mut bases = g.fragment(path.vertices[0]).label.as_bytes().to_vec();
    for (position, edge) in path.edges_used.iter().enumerate() {
        if edge.from != path.vertices[position] || edge.to != path.vertices[position + 1] {
            return Err(AssemblyError::InconsistentPath { position });
        }
        let from_label = &g.fragment(edge.from).label;
        let to_label = &g.fragment(edge.to).label;
        if edge.overlap >= to_label.len()
            || edge.overlap > from_label.len()
            || from_label.suffix(edge.overlap) != to_label.prefix(edge.overlap)
        {
            return Err(AssemblyError::CorruptOverlap {
                from: edge.from,
                to: edge.to,
                overlap: edge.overlap,
            });
        }
        bases.extend_from_slice(&to_label.as_bytes()[edge.overlap..]);
    }
    Ok(NucleotideSequence::new(bases).expect("labels are valid sequences"))
}

/// Concatenate per-part paths through their connecting bridges into one path
/// over the original graph. Every part except the last must carry the bridge
/// to its successor, and bridge endpoints must match the part paths exactly.
pub fn merge_partition_paths(
    parts: &[(GraphPath, Option<Edge>)],
) -> Result<GraphPath, AssemblyError> {
    if parts.is_empty() {
        return Err(AssemblyError::BadPartition("no parts".into()));
    }
    for (index, (path, bridge)) in parts.iter().enumerate() {
        if path.vertices.is_empty() {
            return Err(AssemblyError::BadPartition(format!("part {index} is empty")));
        }
        let is_last = index + 1 == parts.len();
        if is_last && bridge.is_some() {
            return Err(AssemblyError::BadPartition(
                "final part carries a connecting edge".into(),
            ));
        }
        if !is_last && bridge.is_none() {
            return Err(AssemblyError::BadPartition(format!(
                "part {index} is missing its connecting edge"
            )));
        }
    }

    let mut vertices = Vec::new();
    let mut edges_used = Vec::new();
    for (index, (path, _)) in parts.iter().enumerate() {
        if index > 0 {
            let bridge = parts[index - 1].1.as_ref().expect("checked above");
            let part_end = *parts[index - 1].0.vertices.last().expect("non-empty");
            let part_start = path.vertices[0];
            if bridge.from != part_end || bridge.to != part_start {
                return Err(AssemblyError::EndpointMismatch {
                    from: bridge.from,
                    to: bridge.to,
                    part_end,
                    part_start,
                });
            }
            edges_used.push(*bridge);
        }
        vertices.extend_from_slice(&path.vertices);
        edges_used.extend_from_slice(&path.edges_used);
    }
    let mut seen = std::collections::BTreeSet::new();
    for &v in &vertices {
        if !seen.insert(v) {
            return Err(AssemblyError::DuplicateVertex(v));
        }
    }
    Ok(GraphPath {
        vertices,
        edges_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{edge_qubo, positional_qubo};
    use crate::olc::{build_olc_graph, Fragment, SimpleDigraph};
    use crate::rational::coef_int;

    fn seq(s: &str) -> NucleotideSequence {
        NucleotideSequence::parse(s).unwrap()
    }

    fn chain_graph() -> OlcGraph {
        let fragments = ["ATC", "TCG", "CGA"]
            .iter()
            .enumerate()
            .map(|(id, s)| Fragment { id, label: seq(s) })
            .collect();
        build_olc_graph(fragments, 2).unwrap()
    }

    #[test]
    fn decode_positional_identity_permutation() {
        let g = SimpleDigraph::new(2, [(0, 1)]);
        let (_, map) = positional_qubo(&g, &coef_int(1)).unwrap();
        // x_{0,0} = x_{1,1} = 1.
        let path = decode_positional(&[1, 0, 0, 1], &map, &g).unwrap();
        assert_eq!(path.vertices, vec![0, 1]);
    }

    #[test]
    fn decode_positional_rejects_absent_edge() {
        let g = SimpleDigraph::new(2, [(0, 1)]);
        let (_, map) = positional_qubo(&g, &coef_int(1)).unwrap();
        // Reversed path (1, 0) uses the absent edge 1 -> 0.
        let err = decode_positional(&[0, 1, 1, 0], &map, &g).unwrap_err();
        assert!(matches!(err, AssemblyError::MissingEdge { from: 1, to: 0 }));
    }

    #[test]
    fn decode_positional_reports_deficits() {
        let g = SimpleDigraph::new(2, [(0, 1)]);
        let (_, map) = positional_qubo(&g, &coef_int(1)).unwrap();
        let err = decode_positional(&[1, 1, 0, 0], &map, &g).unwrap_err();
        match err {
            AssemblyError::NotPermutation { rows, cols } => {
                assert_eq!(rows, vec![(0, 2), (1, 0)]);
                assert!(cols.is_empty());
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn decode_edges_walks_the_chain() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2)]);
        let (_, map) = edge_qubo(&g, &coef_int(1)).unwrap();
        let path = decode_edges(&[1, 1], &map, &g).unwrap();
        assert_eq!(path.vertices, vec![0, 1, 2]);
    }

    #[test]
    fn decode_edges_diagnoses_failures() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2)]);
        let (_, map) = edge_qubo(&g, &coef_int(1)).unwrap();
        // Only 0 -> 1 selected: vertex 2 is isolated.
        let err = decode_edges(&[1, 0], &map, &g).unwrap_err();
        assert!(matches!(
            err,
            AssemblyError::IncompleteCover { ref missing } if missing == &vec![2]
        ));

        // Fan-out: two selected edges out of vertex 0.
        let fan = SimpleDigraph::new(3, [(0, 1), (0, 2)]);
        let (_, fan_map) = edge_qubo(&fan, &coef_int(1)).unwrap();
        let err = decode_edges(&[1, 1], &fan_map, &fan).unwrap_err();
        assert!(matches!(
            err,
            AssemblyError::DegreeViolation { vertex: 0, outgoing: 2, .. }
        ));

        // Two disjoint chains.
        let two = SimpleDigraph::new(4, [(0, 1), (2, 3)]);
        let (_, two_map) = edge_qubo(&two, &coef_int(1)).unwrap();
        let err = decode_edges(&[1, 1], &two_map, &two).unwrap_err();
        assert!(matches!(err, AssemblyError::MultipleComponents { components: 2 }));
    }

    #[test]
    fn validate_checks_cover_and_edges() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2)]);
        let full = GraphPath {
            vertices: vec![0, 1, 2],
            edges_used: vec![
                Edge { from: 0, to: 1, overlap: 0 },
                Edge { from: 1, to: 2, overlap: 0 },
            ],
        };
        assert!(validate_hamiltonian_path(&g, &full));
        let partial = GraphPath {
            vertices: vec![0, 1],
            edges_used: vec![Edge { from: 0, to: 1, overlap: 0 }],
        };
        assert!(!validate_hamiltonian_path(&g, &partial));
        let wrong_order = GraphPath {
            vertices: vec![2, 1, 0],
            edges_used: vec![],
        };
        assert!(!validate_hamiltonian_path(&g, &wrong_order));
    }

    #[test]
    fn reconstruct_merges_overlaps() {
        let g = chain_graph();
        let path = GraphPath {
            vertices: vec![0, 1, 2],
            edges_used: g.edges().to_vec(),
        };
        let sequence = reconstruct_sequence(&path, &g).unwrap();
        assert_eq!(sequence.as_str(), "ATCGA");
    }

    #[test]
    fn reconstruct_single_vertex_is_identity() {
        let fragments = vec![Fragment { id: 0, label: seq("ATC") }];
        let g = build_olc_graph(fragments, 2).unwrap();
        let path = GraphPath { vertices: vec![0], edges_used: vec![] };
        assert_eq!(reconstruct_sequence(&path, &g).unwrap().as_str(), "ATC");
    }

    #[test]
    fn reconstruct_detects_corrupt_overlaps() {
        let g = chain_graph();
        let path = GraphPath {
            vertices: vec![0, 1, 2],
            edges_used: vec![
                Edge { from: 0, to: 1, overlap: 2 },
                Edge { from: 1, to: 2, overlap: 1 }, // stored overlap is 2; 1 fails equality
            ],
        };
        let err = reconstruct_sequence(&path, &g).unwrap_err();
        assert!(matches!(
            err,
            AssemblyError::CorruptOverlap { from: 1, to: 2, overlap: 1 }
        ));
    }

    #[test]
    fn reconstruction_length_identity() {
        let g = chain_graph();
        let path = GraphPath {
            vertices: vec![0, 1, 2],
            edges_used: g.edges().to_vec(),
        };
        let sequence = reconstruct_sequence(&path, &g).unwrap();
        let label_total: usize = path.vertices.iter().map(|&v| g.fragment(v).label.len()).sum();
        let overlap_total: usize = path.edges_used.iter().map(|e| e.overlap).sum();
        assert_eq!(sequence.len(), label_total - overlap_total);
    }

    #[test]
    fn merge_concatenates_through_bridges() {
        let bridge = Edge { from: 1, to: 2, overlap: 1 };
        let left = GraphPath { vertices: vec![0, 1], edges_used: vec![Edge { from: 0, to: 1, overlap: 1 }] };
        let right = GraphPath { vertices: vec![2, 3], edges_used: vec![Edge { from: 2, to: 3, overlap: 1 }] };
        let merged =
            merge_partition_paths(&[(left, Some(bridge)), (right, None)]).unwrap();
        assert_eq!(merged.vertices, vec![0, 1, 2, 3]);
        assert_eq!(merged.edges_used.len(), 3);
        assert_eq!(merged.edges_used[1], bridge);
    }

    #[test]
    fn merge_single_part_is_identity() {
        let only = GraphPath { vertices: vec![0, 1], edges_used: vec![Edge { from: 0, to: 1, overlap: 1 }] };
        let merged = merge_partition_paths(&[(only.clone(), None)]).unwrap();
        assert_eq!(merged, only);
    }

    #[test]
    fn merge_rejects_endpoint_mismatch() {
        let bridge = Edge { from: 9, to: 2, overlap: 1 };
        let left = GraphPath { vertices: vec![0, 1], edges_used: vec![Edge { from: 0, to: 1, overlap: 1 }] };
        let right = GraphPath { vertices: vec![2], edges_used: vec![] };
        let err = merge_partition_paths(&[(left, Some(bridge)), (right, None)]).unwrap_err();
        assert!(matches!(
            err,
            AssemblyError::EndpointMismatch { from: 9, to: 2, part_end: 1, part_start: 2 }
        ));
    }
}
