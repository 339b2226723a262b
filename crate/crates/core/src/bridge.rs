//! Bridge detection and chain decomposition.
//!
//! A bridge is a directed edge whose removal disconnects the underlying
//! undirected multigraph (antiparallel edge pairs count as parallel
//! undirected edges, so neither is a bridge). Splitting a graph at its
//! bridges yields sub-instances that can be solved independently and
//! stitched back through the bridges.

use std::collections::BTreeSet;

use crate::olc::{DirectedGraph, Edge, Fragment, GraphError, OlcGraph};

/// Structural decomposition component: original vertex ids plus the bridge
/// (as an `edge_list` triple) leading to the next component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralPart {
    pub vertices: Vec<usize>,
    pub bridge_to_next: Option<(usize, usize, usize)>,
}

/// One component of an overlap-graph decomposition, in chain order.
#[derive(Debug, Clone)]
pub struct GraphPart {
    /// Subgraph induced on this part, with dense local ids.
    pub graph: OlcGraph,
    /// Local id -> original vertex id.
    pub original_ids: Vec<usize>,
    /// The bridge joining this part to the next one (original ids);
    /// `None` for the final part.
    pub bridge_to_next: Option<Edge>,
}

impl GraphPart {
    pub fn to_original(&self, local: usize) -> usize {
        self.original_ids[local]
    }
}

// (neighbor, edge index) lists; each directed edge is one undirected instance.
fn undirected_adjacency(n: usize, edges: &[(usize, usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (idx, &(u, v, _)) in edges.iter().enumerate() {
        adj[u].push((v, idx));
        adj[v].push((u, idx));
    }
    adj
}

/// Whether the underlying undirected graph is connected.
pub fn is_weakly_connected<G: DirectedGraph>(g: &G) -> bool {
    let n = g.vertex_count();
    if n == 0 {
        return false;
    }
    let adj = undirected_adjacency(n, &g.edge_list());
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Indices into `g.edge_list()` of all bridges, via iterative low-link.
pub fn find_bridge_indices<G: DirectedGraph>(g: &G) -> Vec<usize> {
    let n = g.vertex_count();
    let edges = g.edge_list();
    let adj = undirected_adjacency(n, &edges);
    let mut visit_time = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut clock = 0usize;
    let mut bridges = Vec::new();

    for root in 0..n {
        if visit_time[root] != usize::MAX {
            continue;
        }
        // (vertex, incoming edge index, neighbor cursor)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        visit_time[root] = clock;
        low[root] = clock;
        clock += 1;
        while let Some(&mut (v, via, ref mut cursor)) = stack.last_mut() {
            if *cursor < adj[v].len() {
                let (w, edge_idx) = adj[v][*cursor];
                *cursor += 1;
                if edge_idx == via {
                    // Skip the tree edge instance we came through; a parallel
                    // edge has a different index and acts as a back edge.
                    continue;
                }
                if visit_time[w] == usize::MAX {
                    visit_time[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, edge_idx, 0));
                } else {
                    low[v] = low[v].min(visit_time[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (parent, _, _)) = stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > visit_time[parent] {
                        bridges.push(via);
                    }
                }
            }
        }
    }
    bridges.sort_unstable();
    bridges
}

/// All bridge edges of `g`, as `edge_list` triples.
pub fn find_bridges<G: DirectedGraph>(g: &G) -> Vec<(usize, usize, usize)> {
    let edges = g.edge_list();
    find_bridge_indices(g).into_iter().map(|i| edges[i]).collect()
}

/// Split a weakly connected graph at its bridges into an ordered chain of
/// components, each returned bridge pointing from its part to the successor.
///
/// Returns one part and no bridge when the graph has no bridges. Errors when
/// the graph is disconnected, or when the bridge structure is not a
/// consistently oriented chain (no Hamiltonian path can cross such cuts, so
/// the decomposition would be useless for assembly).
pub fn decompose_structure<G: DirectedGraph>(g: &G) -> Result<Vec<StructuralPart>, GraphError> {
    if !is_weakly_connected(g) {
        return Err(GraphError::Disconnected);
    }
    let n = g.vertex_count();
    let edges = g.edge_list();
    let bridge_indices: BTreeSet<usize> = find_bridge_indices(g).into_iter().collect();
    if bridge_indices.is_empty() {
        return Ok(vec![StructuralPart {
            vertices: (0..n).collect(),
            bridge_to_next: None,
        }]);
    }

    // Components once bridges are removed.
    let mut component = vec![usize::MAX; n];
    let mut component_count = 0;
    let adj = undirected_adjacency(n, &edges);
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = component_count;
        component_count += 1;
        let mut stack = vec![start];
        component[start] = id;
        while let Some(v) = stack.pop() {
            for &(w, edge_idx) in &adj[v] {
                if bridge_indices.contains(&edge_idx) || component[w] != usize::MAX {
                    continue;
                }
                component[w] = id;
                stack.push(w);
            }
        }
    }

    // The bridge quotient of a connected graph is a tree; require a path.
    let mut quotient_adj = vec![Vec::new(); component_count];
    let bridges: Vec<(usize, usize, usize)> =
        bridge_indices.iter().map(|&i| edges[i]).collect();
    for &(u, v, _) in &bridges {
        let (a, b) = (component[u], component[v]);
        quotient_adj[a].push(b);
        quotient_adj[b].push(a);
    }
    if quotient_adj.iter().any(|nbrs| nbrs.len() > 2) {
        return Err(GraphError::NotChain {
            reason: "a component touches more than two bridges".to_string(),
        });
    }
    let ends: Vec<usize> = (0..component_count)
        .filter(|&c| quotient_adj[c].len() == 1)
        .collect();
    if ends.len() != 2 {
        return Err(GraphError::NotChain {
            reason: format!("bridge tree has {} endpoints", ends.len()),
        });
    }

    // Walk the quotient path from each end; keep the orientation where every
    // bridge points forward.
    'end: for &start in &ends {
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut current = start;
        while let Some(&next) = quotient_adj[current].iter().find(|&&c| c != prev) {
            prev = current;
            current = next;
            order.push(current);
            if order.len() > component_count {
                break;
            }
        }
        if order.len() != component_count {
            continue;
        }
        let mut position = vec![0usize; component_count];
        for (i, &c) in order.iter().enumerate() {
            position[c] = i;
        }
        let mut bridge_after: Vec<Option<(usize, usize, usize)>> = vec![None; component_count];
        for &(u, v, overlap) in &bridges {
            let (a, b) = (component[u], component[v]);
            if position[b] != position[a] + 1 {
                continue 'end; // bridge points backward in this orientation
            }
            bridge_after[a] = Some((u, v, overlap));
        }
        return Ok(order
            .iter()
            .map(|&comp| StructuralPart {
                vertices: (0..n).filter(|&v| component[v] == comp).collect(),
                bridge_to_next: bridge_after[comp],
            })
            .collect());
    }
    Err(GraphError::NotChain {
        reason: "bridge directions do not chain head to tail".to_string(),
    })
}

/// [`decompose_structure`] lifted to overlap graphs: each part becomes an
/// induced [`OlcGraph`] with dense local ids.
pub fn bridge_decompose(g: &OlcGraph) -> Result<Vec<GraphPart>, GraphError> {
    let parts = decompose_structure(g)?;
    Ok(parts
        .into_iter()
        .map(|part| {
            let mut local = vec![usize::MAX; g.vertex_count()];
            for (i, &v) in part.vertices.iter().enumerate() {
                local[v] = i;
            }
            let fragments: Vec<Fragment> = part
                .vertices
                .iter()
                .enumerate()
                .map(|(i, &v)| Fragment {
                    id: i,
                    label: g.fragment(v).label.clone(),
                })
                .collect();
            let edges: Vec<Edge> = g
                .edges()
                .iter()
                .filter(|e| local[e.from] != usize::MAX && local[e.to] != usize::MAX)
                .map(|e| Edge {
                    from: local[e.from],
                    to: local[e.to],
                    overlap: e.overlap,
                })
                .collect();
            let graph = OlcGraph::from_parts(fragments, edges)
                .expect("induced subgraph preserves invariants");
            GraphPart {
                graph,
                original_ids: part.vertices,
                bridge_to_next: part.bridge_to_next.map(|(from, to, overlap)| Edge {
                    from,
                    to,
                    overlap,
                }),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::olc::{build_olc_graph, SimpleDigraph};
    use crate::sequence::NucleotideSequence;
    use rand::Rng;

    fn seq(s: &str) -> NucleotideSequence {
        NucleotideSequence::parse(s).unwrap()
    }

    fn kmer_graph(labels: &[&str], min_overlap: usize) -> OlcGraph {
        let fragments = labels
            .iter()
            .enumerate()
            .map(|(id, s)| Fragment { id, label: seq(s) })
            .collect();
        build_olc_graph(fragments, min_overlap).unwrap()
    }

    /// Oracle: an edge is a bridge iff removing it separates its endpoints
    /// in the underlying undirected graph.
    fn brute_force_bridges<G: DirectedGraph>(g: &G) -> Vec<(usize, usize, usize)> {
        let n = g.vertex_count();
        let edges = g.edge_list();
        let mut result = Vec::new();
        for skip in 0..edges.len() {
            let mut adj = vec![Vec::new(); n];
            for (idx, &(u, v, _)) in edges.iter().enumerate() {
                if idx != skip {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
            let (from, to, _) = edges[skip];
            let mut seen = vec![false; n];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            if !seen[to] {
                result.push(edges[skip]);
            }
        }
        result
    }

    #[test]
    fn chain_decomposes_into_singletons() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2)]);
        let parts = decompose_structure(&g).unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0].vertices, vec![0]);
        assert_eq!(parts[0].bridge_to_next, Some((0, 1, 0)));
        assert_eq!(parts[1].vertices, vec![1]);
        assert_eq!(parts[1].bridge_to_next, Some((1, 2, 0)));
        assert_eq!(parts[2].vertices, vec![2]);
        assert_eq!(parts[2].bridge_to_next, None);
    }

    #[test]
    fn complete_digraph_is_a_single_part() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        assert!(find_bridges(&g).is_empty());
        let parts = decompose_structure(&g).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].vertices, vec![0, 1, 2]);
        assert_eq!(parts[0].bridge_to_next, None);
    }

    #[test]
    fn two_triangles_joined_by_one_edge() {
        let g = SimpleDigraph::new(
            6,
            [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        );
        assert_eq!(find_bridges(&g), vec![(2, 3, 0)]);
        assert_eq!(find_bridges(&g), brute_force_bridges(&g));
        let parts = decompose_structure(&g).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].vertices, vec![0, 1, 2]);
        assert_eq!(parts[0].bridge_to_next, Some((2, 3, 0)));
        assert_eq!(parts[1].vertices, vec![3, 4, 5]);
        assert_eq!(parts[1].bridge_to_next, None);
    }

    #[test]
    fn antiparallel_pair_is_not_a_bridge() {
        let g = SimpleDigraph::new(2, [(0, 1), (1, 0)]);
        assert!(find_bridges(&g).is_empty());
        assert_eq!(find_bridges(&g), brute_force_bridges(&g));
    }

    #[test]
    fn star_of_bridges_is_rejected() {
        // Three leaves hanging off vertex 0: bridge tree is a star, and no
        // Hamiltonian path can cross all three cuts.
        let g = SimpleDigraph::new(4, [(0, 1), (0, 2), (0, 3)]);
        assert!(matches!(
            decompose_structure(&g),
            Err(GraphError::NotChain { .. })
        ));
    }

    #[test]
    fn backward_bridge_is_rejected() {
        // 0 -> 1 and 2 -> 1: both bridges, but they cannot be oriented into
        // a head-to-tail chain.
        let g = SimpleDigraph::new(3, [(0, 1), (2, 1)]);
        assert!(matches!(
            decompose_structure(&g),
            Err(GraphError::NotChain { .. })
        ));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = kmer_graph(&["AAA", "CCC"], 2);
        assert!(matches!(bridge_decompose(&g), Err(GraphError::Disconnected)));
    }

    #[test]
    fn bridges_match_oracle_on_random_digraphs() {
        let mut rng = crate::rng::stream_rng(11, "bridge-oracle", &[]);
        for _ in 0..200 {
            let n = rng.random_range(2..=7);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_range(0..100) < 30 {
                        edges.push((u, v));
                    }
                }
            }
            let g = SimpleDigraph::new(n, edges);
            let mut fast = find_bridges(&g);
            let mut oracle = brute_force_bridges(&g);
            fast.sort_unstable();
            oracle.sort_unstable();
            assert_eq!(fast, oracle);
        }
    }

    #[test]
    fn olc_chain_decomposition_keeps_labels_and_edges() {
        let g = kmer_graph(&["ATC", "TCG", "CGA"], 2);
        let parts = bridge_decompose(&g).unwrap();
        assert_eq!(parts.len(), 3);
        let labels: Vec<&str> = parts
            .iter()
            .map(|p| p.graph.fragment(0).label.as_str())
            .collect();
        assert_eq!(labels, ["ATC", "TCG", "CGA"]);
        assert_eq!(
            parts[0].bridge_to_next,
            Some(Edge { from: 0, to: 1, overlap: 2 })
        );

        // Recomposition invariant: parts plus bridges recover all vertices
        // and edges.
        let mut seen = vec![false; g.vertex_count()];
        for part in &parts {
            for &v in &part.original_ids {
                assert!(!seen[v]);
                seen[v] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        let bridge_count = parts.iter().filter(|p| p.bridge_to_next.is_some()).count();
        let internal: usize = parts.iter().map(|p| p.graph.edge_count()).sum();
        assert_eq!(internal + bridge_count, g.edge_count());
    }
}
