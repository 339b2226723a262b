//! Hamiltonian-path QUBO encodings and the QUBO/Ising transforms.
//!
//! Two encodings are supported:
//!
//! * positional — one binary variable per (vertex, step) pair, `N²` in total.
//!   The objective is zero exactly on permutation matrices that trace a
//!   Hamiltonian path, and at least the penalty `A` otherwise.
//! * edge — one binary variable per edge, valid for acyclic graphs only. The
//!   objective charges each vertex the squared deficit of selected outgoing
//!   and incoming edges from one; a Hamiltonian path costs exactly `2A`
//!   (the two endpoints are each short one edge).
//!
//! Coefficients are exact rationals so the spin/bit substitution
//! `w = (sigma + 1) / 2` and coefficient scaling are energy-preserving by
//! construction, not up to rounding.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::olc::DirectedGraph;
use crate::rational::{coef_int, is_zero, to_f64, Coef};

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error("penalty coefficient must be positive, got {0}")]
    NonPositivePenalty(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("edge encoding requires an acyclic graph; found cycle {cycle:?}")]
    NotAcyclic { cycle: Vec<usize> },
}

/// Semantic meaning of one optimization variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarKey {
    /// Path goes through `vertex` at `step` (both 0-based).
    Position { vertex: usize, step: usize },
    /// Edge `from -> to` is part of the path.
    Edge { from: usize, to: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Positional,
    Edge,
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Encoding::Positional => f.write_str("positional"),
            Encoding::Edge => f.write_str("edge"),
        }
    }
}

/// Bijection between variable indices and their semantic keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMap {
    encoding: Encoding,
    keys: Vec<VarKey>,
    forward: BTreeMap<VarKey, usize>,
}

impl VariableMap {
    pub fn new(encoding: Encoding, keys: Vec<VarKey>) -> Self {
        for key in &keys {
            let matches = match (encoding, key) {
                (Encoding::Positional, VarKey::Position { .. }) => true,
                (Encoding::Edge, VarKey::Edge { .. }) => true,
                _ => false,
            };
            assert!(matches, "key {key:?} does not fit the {encoding} encoding");
        }
        let forward = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let map = Self {
            encoding,
            keys,
            forward,
        };
        assert_eq!(
            map.keys.len(),
            map.forward.len(),
            "variable keys must be distinct"
        );
        map
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, var: usize) -> Option<&VarKey> {
        self.keys.get(var)
    }

    pub fn var(&self, key: &VarKey) -> Option<usize> {
        self.forward.get(key).copied()
    }

    pub fn keys(&self) -> &[VarKey] {
        &self.keys
    }
}

/// Quadratic binary objective
/// `offset + sum_i linear_i w_i + sum_{i<j} quadratic_ij w_i w_j` over
/// `w in {0,1}^n`. Diagonal terms are folded into the linear part
/// (`w² = w`) and zero coefficients are pruned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuboProblem {
    n: usize,
    linear: BTreeMap<usize, Coef>,
    quadratic: BTreeMap<(usize, usize), Coef>,
    offset: Coef,
    penalty: Option<Coef>,
}

impl QuboProblem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: coef_int(0),
            penalty: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &BTreeMap<usize, Coef> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), Coef> {
        &self.quadratic
    }

    pub fn offset(&self) -> &Coef {
        &self.offset
    }

    /// Penalty coefficient used at construction, when known.
    pub fn penalty(&self) -> Option<&Coef> {
        self.penalty.as_ref()
    }

    pub fn set_penalty(&mut self, penalty: Coef) {
        self.penalty = Some(penalty);
    }

    pub fn add_offset(&mut self, value: Coef) {
        self.offset += value;
    }

    pub fn add_linear(&mut self, var: usize, value: Coef) {
        assert!(var < self.n, "variable {var} out of range 0..{}", self.n);
        let entry = self.linear.entry(var).or_insert_with(|| coef_int(0));
        *entry += value;
        if is_zero(entry) {
            self.linear.remove(&var);
        }
    }

    /// Add a quadratic term; `i == j` folds into the linear part.
    pub fn add_quadratic(&mut self, i: usize, j: usize, value: Coef) {
        assert!(i < self.n && j < self.n, "variables out of range");
        if i == j {
            self.add_linear(i, value);
            return;
        }
        let key = (i.min(j), i.max(j));
        let entry = self.quadratic.entry(key).or_insert_with(|| coef_int(0));
        *entry += value;
        if is_zero(entry) {
            self.quadratic.remove(&key);
        }
    }

    /// Exact objective value of a bit configuration.
    pub fn objective(&self, bits: &[u8]) -> Coef {
        assert_eq!(bits.len(), self.n, "configuration length mismatch");
        let mut total = self.offset;
        for (&i, c) in &self.linear {
            if bits[i] == 1 {
                total += *c;
            }
        }
        for (&(i, j), c) in &self.quadratic {
            if bits[i] == 1 && bits[j] == 1 {
                total += *c;
            }
        }
        total
    }

    pub fn objective_f64(&self, bits: &[u8]) -> f64 {
        to_f64(&self.objective(bits))
    }
}

/// Spin objective
/// `offset + sum_i h_i sigma_i + sum_{i<j} J_ij sigma_i sigma_j` over
/// `sigma in {-1,+1}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsingProblem {
    n: usize,
    h: BTreeMap<usize, Coef>,
    j: BTreeMap<(usize, usize), Coef>,
    offset: Coef,
}

impl IsingProblem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            h: BTreeMap::new(),
            j: BTreeMap::new(),
            offset: coef_int(0),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &BTreeMap<usize, Coef> {
        &self.h
    }

    pub fn j(&self) -> &BTreeMap<(usize, usize), Coef> {
        &self.j
    }

    pub fn offset(&self) -> &Coef {
        &self.offset
    }

    pub fn add_offset(&mut self, value: Coef) {
        self.offset += value;
    }

    pub fn add_field(&mut self, spin: usize, value: Coef) {
        assert!(spin < self.n, "spin {spin} out of range 0..{}", self.n);
        let entry = self.h.entry(spin).or_insert_with(|| coef_int(0));
        *entry += value;
        if is_zero(entry) {
            self.h.remove(&spin);
        }
    }

    /// Add a coupling; `i == j` folds into the offset (`sigma² = 1`).
    pub fn add_coupling(&mut self, i: usize, j: usize, value: Coef) {
        assert!(i < self.n && j < self.n, "spins out of range");
        if i == j {
            self.offset += value;
            return;
        }
        let key = (i.min(j), i.max(j));
        let entry = self.j.entry(key).or_insert_with(|| coef_int(0));
        *entry += value;
        if is_zero(entry) {
            self.j.remove(&key);
        }
    }

    /// Exact energy of a spin configuration.
    pub fn energy(&self, spins: &[i8]) -> Coef {
        assert_eq!(spins.len(), self.n, "configuration length mismatch");
        let mut total = self.offset;
        for (&i, c) in &self.h {
            if spins[i] > 0 {
                total += *c;
            } else {
                total -= *c;
            }
        }
        for (&(i, j), c) in &self.j {
            if spins[i] == spins[j] {
                total += *c;
            } else {
                total -= *c;
            }
        }
        total
    }

    pub fn energy_f64(&self, spins: &[i8]) -> f64 {
        to_f64(&self.energy(spins))
    }

    /// Largest coefficient magnitude among fields and couplings.
    pub fn max_abs_coefficient(&self) -> Coef {
        let mut max = coef_int(0);
        for c in self.h.values().chain(self.j.values()) {
            let a = c.abs();
            if a > max {
                max = a;
            }
        }
        max
    }
}

/// Positional Hamiltonian-path QUBO over `N²` variables `x_{v,j}`:
/// per-vertex and per-step one-hot constraints plus a penalty on consecutive
/// steps assigned to non-adjacent vertex pairs.
pub fn positional_qubo<G: DirectedGraph>(
    g: &G,
    penalty: &Coef,
) -> Result<(QuboProblem, VariableMap), FormulationError> {
    validate_penalty(penalty)?;
    let n = g.vertex_count();
    if n == 0 {
        return Err(FormulationError::EmptyGraph);
    }
    let var = |vertex: usize, step: usize| vertex * n + step;
    let mut qubo = QuboProblem::new(n * n);
    qubo.set_penalty(*penalty);
    let two_a = penalty * coef_int(2);

    // Row constraints: each vertex appears at exactly one step.
    // (1 - sum_j x_{v,j})^2 = 1 - sum_j x_{v,j} + 2 sum_{j<j'} x_{v,j} x_{v,j'}
    for vertex in 0..n {
        qubo.add_offset(*penalty);
        for step in 0..n {
            qubo.add_linear(var(vertex, step), -*penalty);
        }
        for step_a in 0..n {
            for step_b in step_a + 1..n {
                qubo.add_quadratic(var(vertex, step_a), var(vertex, step_b), two_a);
            }
        }
    }
    // Column constraints: each step holds exactly one vertex.
    for step in 0..n {
        qubo.add_offset(*penalty);
        for vertex in 0..n {
            qubo.add_linear(var(vertex, step), -*penalty);
        }
        for vertex_a in 0..n {
            for vertex_b in vertex_a + 1..n {
                qubo.add_quadratic(var(vertex_a, step), var(vertex_b, step), two_a);
            }
        }
    }
    // Adjacency penalty: consecutive steps must follow a graph edge.
    for u in 0..n {
        for v in 0..n {
            if u == v || g.has_edge(u, v) {
                continue;
            }
            for step in 0..n.saturating_sub(1) {
                qubo.add_quadratic(var(u, step), var(v, step + 1), *penalty);
            }
        }
    }

    let keys = (0..n)
        .flat_map(|vertex| (0..n).map(move |step| VarKey::Position { vertex, step }))
        .collect();
    Ok((qubo, VariableMap::new(Encoding::Positional, keys)))
}

/// Edge-based Hamiltonian-path QUBO over `M` variables `x_{u,v}` for acyclic
/// graphs: each vertex pays the squared deficit of its selected outgoing and
/// incoming edge counts from one.
pub fn edge_qubo<G: DirectedGraph>(
    g: &G,
    penalty: &Coef,
) -> Result<(QuboProblem, VariableMap), FormulationError> {
    validate_penalty(penalty)?;
    let n = g.vertex_count();
    if n == 0 {
        return Err(FormulationError::EmptyGraph);
    }
    if let Some(cycle) = find_cycle(g) {
        return Err(FormulationError::NotAcyclic { cycle });
    }
    let edges = g.edge_list();
    let mut qubo = QuboProblem::new(edges.len());
    qubo.set_penalty(*penalty);
    let keys: Vec<VarKey> = edges
        .iter()
        .map(|&(from, to, _)| VarKey::Edge { from, to })
        .collect();

    let mut outgoing = vec![Vec::new(); n];
    let mut incoming = vec![Vec::new(); n];
    for (idx, &(from, to, _)) in edges.iter().enumerate() {
        outgoing[from].push(idx);
        incoming[to].push(idx);
    }
    for group in outgoing.iter().chain(incoming.iter()) {
        add_one_hot_deficit(&mut qubo, group, penalty);
    }
    Ok((qubo, VariableMap::new(Encoding::Edge, keys)))
}

// (1 - sum x)^2 expanded with x^2 = x.
fn add_one_hot_deficit(qubo: &mut QuboProblem, vars: &[usize], penalty: &Coef) {
    let two_a = penalty * coef_int(2);
    qubo.add_offset(*penalty);
    for &v in vars {
        qubo.add_linear(v, -*penalty);
    }
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            qubo.add_quadratic(a, b, two_a);
        }
    }
}

fn validate_penalty(penalty: &Coef) -> Result<(), FormulationError> {
    if *penalty <= coef_int(0) {
        return Err(FormulationError::NonPositivePenalty(penalty.to_string()));
    }
    Ok(())
}

fn find_cycle<G: DirectedGraph>(g: &G) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut succ = vec![Vec::new(); n];
    for (u, v, _) in g.edge_list() {
        succ[u].push(v);
    }
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on path, 2 done
    let mut path = Vec::new();
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        path.push(root);
        while let Some(&mut (v, ref mut cursor)) = stack.last_mut() {
            if *cursor < succ[v].len() {
                let w = succ[v][*cursor];
                *cursor += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                        path.push(w);
                    }
                    1 => {
                        let pos = path.iter().position(|&x| x == w).unwrap();
                        return Some(path[pos..].to_vec());
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
                path.pop();
            }
        }
    }
    None
}

/// Substitute `w_i = (sigma_i + 1) / 2`; energies agree exactly on every
/// configuration under the bit/spin bijection.
pub fn qubo_to_ising(qubo: &QuboProblem) -> IsingProblem {
    let mut ising = IsingProblem::new(qubo.n());
    ising.add_offset(*qubo.offset());
    let half = Coef::new(1, 2);
    let quarter = Coef::new(1, 4);
    for (&i, c) in qubo.linear() {
        // c w = c/2 sigma + c/2
        ising.add_field(i, c * half);
        ising.add_offset(c * half);
    }
    for (&(i, j), c) in qubo.quadratic() {
        // c w_i w_j = c/4 (sigma_i sigma_j + sigma_i + sigma_j + 1)
        let q = c * quarter;
        ising.add_coupling(i, j, q);
        ising.add_field(i, q);
        ising.add_field(j, q);
        ising.add_offset(q);
    }
    ising
}

/// Substitute `sigma_i = 2 w_i - 1`; exact inverse of [`qubo_to_ising`] up to
/// pruning of zero coefficients.
pub fn ising_to_qubo(ising: &IsingProblem) -> QuboProblem {
    let mut qubo = QuboProblem::new(ising.n());
    qubo.add_offset(*ising.offset());
    let two = coef_int(2);
    let four = coef_int(4);
    for (&i, c) in ising.h() {
        // c sigma = 2c w - c
        qubo.add_linear(i, c * two);
        qubo.add_offset(-*c);
    }
    for (&(i, j), c) in ising.j() {
        // c sigma_i sigma_j = 4c w_i w_j - 2c w_i - 2c w_j + c
        qubo.add_quadratic(i, j, c * four);
        qubo.add_linear(i, -(c * two));
        qubo.add_linear(j, -(c * two));
        qubo.add_offset(*c);
    }
    qubo
}

/// Divide all fields and couplings (not the offset) by the largest
/// coefficient magnitude, returning the scaled problem and the scale factor.
/// The minimizing configurations are unchanged. All-zero problems are
/// returned unchanged with scale 1.
pub fn normalize_ising(ising: &IsingProblem) -> (IsingProblem, Coef) {
    let scale = ising.max_abs_coefficient();
    if is_zero(&scale) {
        return (ising.clone(), coef_int(1));
    }
    let mut scaled = IsingProblem::new(ising.n());
    scaled.add_offset(*ising.offset());
    for (&i, c) in ising.h() {
        scaled.add_field(i, c / scale);
    }
    for (&(i, j), c) in ising.j() {
        scaled.add_coupling(i, j, c / scale);
    }
    (scaled, scale)
}

/// Clique-embedding chain-length estimate of physical qubits needed for an
/// `n`-variable QUBO: `n * (ceil(n / 4) + 1)`. A size estimate only; no
/// embedding is constructed.
pub fn estimate_physical_qubits(n: usize) -> usize {
    n * (n.div_ceil(4) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::olc::SimpleDigraph;
    use crate::rational::coef;

    fn all_bit_configs(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0..1u64 << n).map(move |mask| (0..n).map(|i| ((mask >> i) & 1) as u8).collect())
    }

    fn bits_to_spins(bits: &[u8]) -> Vec<i8> {
        bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect()
    }

    #[test]
    fn positional_single_vertex() {
        let g = SimpleDigraph::new(1, []);
        let (qubo, map) = positional_qubo(&g, &coef_int(1)).unwrap();
        assert_eq!(qubo.n(), 1);
        assert_eq!(map.len(), 1);
        assert_eq!(qubo.objective(&[1]), coef_int(0));
        assert_eq!(qubo.objective(&[0]), coef_int(2));
    }

    #[test]
    fn positional_two_vertices_single_edge() {
        // Direct evaluator used as the independent route: penalty times
        // (row deficits^2 + column deficits^2 + illegal adjacencies).
        fn direct(bits: &[u8], n: usize, edges: &[(usize, usize)]) -> i64 {
            let x = |v: usize, j: usize| i64::from(bits[v * n + j]);
            let mut total = 0;
            for v in 0..n {
                let row: i64 = (0..n).map(|j| x(v, j)).sum();
                total += (1 - row) * (1 - row);
            }
            for j in 0..n {
                let col: i64 = (0..n).map(|v| x(v, j)).sum();
                total += (1 - col) * (1 - col);
            }
            for u in 0..n {
                for v in 0..n {
                    if u == v || edges.contains(&(u, v)) {
                        continue;
                    }
                    for j in 0..n - 1 {
                        total += x(u, j) * x(v, j + 1);
                    }
                }
            }
            total
        }

        let g = SimpleDigraph::new(2, [(0, 1)]);
        let (qubo, map) = positional_qubo(&g, &coef_int(1)).unwrap();
        assert_eq!(qubo.n(), 4);
        assert_eq!(map.len(), 4);

        for bits in all_bit_configs(4) {
            let expected = coef_int(direct(&bits, 2, &[(0, 1)]) as i128);
            assert_eq!(qubo.objective(&bits), expected, "config {bits:?}");
        }

        // Path (0, 1): x_{0,0} = x_{1,1} = 1.
        let forward = [1, 0, 0, 1];
        assert_eq!(qubo.objective(&forward), coef_int(0));
        // Reversed path uses the absent edge 1 -> 0.
        let reversed = [0, 1, 1, 0];
        assert!(qubo.objective(&reversed) >= coef_int(1));
    }

    #[test]
    fn positional_sizes_match_vertex_count_squared() {
        for n in [3usize, 8] {
            let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            let g = SimpleDigraph::new(n, edges);
            let (qubo, map) = positional_qubo(&g, &coef_int(1)).unwrap();
            assert_eq!(qubo.n(), n * n);
            assert_eq!(map.len(), n * n);
        }
    }

    #[test]
    fn edge_qubo_chain() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2)]);
        let (qubo, map) = edge_qubo(&g, &coef_int(1)).unwrap();
        assert_eq!(qubo.n(), 2);
        assert_eq!(map.len(), 2);
        // Enumerate all four configurations; the full chain is minimal at 2A.
        assert_eq!(qubo.objective(&[1, 1]), coef_int(2));
        assert_eq!(qubo.objective(&[0, 0]), coef_int(6));
        assert!(qubo.objective(&[1, 0]) > coef_int(2));
        assert!(qubo.objective(&[0, 1]) > coef_int(2));
    }

    #[test]
    fn edge_qubo_single_vertex_is_constant() {
        let g = SimpleDigraph::new(1, []);
        let (qubo, map) = edge_qubo(&g, &coef_int(1)).unwrap();
        assert_eq!(qubo.n(), 0);
        assert_eq!(map.len(), 0);
        assert_eq!(qubo.objective(&[]), coef_int(2));
    }

    #[test]
    fn edge_qubo_rejects_cycles_with_witness() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2), (2, 0)]);
        match edge_qubo(&g, &coef_int(1)) {
            Err(FormulationError::NotAcyclic { cycle }) => {
                assert!(cycle.len() >= 2);
                for w in cycle.windows(2) {
                    assert!(g.has_edge(w[0], w[1]));
                }
                assert!(g.has_edge(*cycle.last().unwrap(), cycle[0]));
            }
            other => panic!("expected NotAcyclic, got {other:?}"),
        }
    }

    #[test]
    fn penalty_must_be_positive() {
        let g = SimpleDigraph::new(2, [(0, 1)]);
        assert!(matches!(
            positional_qubo(&g, &coef_int(0)),
            Err(FormulationError::NonPositivePenalty(_))
        ));
        assert!(matches!(
            edge_qubo(&g, &coef_int(-1)),
            Err(FormulationError::NonPositivePenalty(_))
        ));
    }

    #[test]
    fn qubo_to_ising_known_expansions() {
        // f(w) = c w1 -> h1 = c/2, offset = c/2.
        let mut q = QuboProblem::new(1);
        q.add_linear(0, coef_int(3));
        let ising = qubo_to_ising(&q);
        assert_eq!(ising.h().get(&0), Some(&coef(3, 2)));
        assert_eq!(*ising.offset(), coef(3, 2));
        assert!(ising.j().is_empty());

        // f(w) = w1 w2 -> J12 = 1/4, h1 = h2 = 1/4, offset = 1/4.
        let mut q = QuboProblem::new(2);
        q.add_quadratic(0, 1, coef_int(1));
        let ising = qubo_to_ising(&q);
        assert_eq!(ising.j().get(&(0, 1)), Some(&coef(1, 4)));
        assert_eq!(ising.h().get(&0), Some(&coef(1, 4)));
        assert_eq!(ising.h().get(&1), Some(&coef(1, 4)));
        assert_eq!(*ising.offset(), coef(1, 4));
    }

    #[test]
    fn ising_to_qubo_known_expansions() {
        // h1 = 1/2, offset = 1/2 -> f(w) = w1.
        let mut m = IsingProblem::new(1);
        m.add_field(0, coef(1, 2));
        m.add_offset(coef(1, 2));
        let q = ising_to_qubo(&m);
        assert_eq!(q.linear().get(&0), Some(&coef_int(1)));
        assert!(is_zero(q.offset()));
        assert!(q.quadratic().is_empty());
    }

    #[test]
    fn transforms_preserve_energy_exactly() {
        let g = SimpleDigraph::new(2, [(0, 1)]);
        let (qubo, _) = positional_qubo(&g, &coef_int(1)).unwrap();
        let ising = qubo_to_ising(&qubo);
        for bits in all_bit_configs(4) {
            let spins = bits_to_spins(&bits);
            assert_eq!(qubo.objective(&bits), ising.energy(&spins));
        }
        // Round trip restores the coefficients.
        let back = ising_to_qubo(&ising);
        assert_eq!(back.linear(), qubo.linear());
        assert_eq!(back.quadratic(), qubo.quadratic());
        assert_eq!(back.offset(), qubo.offset());
    }

    #[test]
    fn normalize_divides_by_max_magnitude() {
        let mut m = IsingProblem::new(2);
        m.add_field(0, coef_int(2));
        m.add_field(1, coef_int(-4));
        let (scaled, scale) = normalize_ising(&m);
        assert_eq!(scale, coef_int(4));
        assert_eq!(scaled.h().get(&0), Some(&coef(1, 2)));
        assert_eq!(scaled.h().get(&1), Some(&coef_int(-1)));

        // Idempotent at the fixpoint.
        let (again, scale2) = normalize_ising(&scaled);
        assert_eq!(scale2, coef_int(1));
        assert_eq!(again, scaled);
    }

    #[test]
    fn normalize_handles_all_zero_problems() {
        let m = IsingProblem::new(3);
        let (scaled, scale) = normalize_ising(&m);
        assert_eq!(scale, coef_int(1));
        assert_eq!(scaled, m);
    }

    #[test]
    fn normalize_preserves_argmin_set() {
        let mut rng = crate::rng::stream_rng(5, "normalize-argmin", &[]);
        use rand::Rng;
        for _ in 0..50 {
            let n = 4;
            let mut m = IsingProblem::new(n);
            for i in 0..n {
                m.add_field(i, coef(rng.random_range(-16..=16), 4));
            }
            for i in 0..n {
                for j in i + 1..n {
                    m.add_coupling(i, j, coef(rng.random_range(-16..=16), 4));
                }
            }
            let (scaled, _) = normalize_ising(&m);
            let argmin = |p: &IsingProblem| -> Vec<Vec<i8>> {
                let mut best = None;
                let mut mins = Vec::new();
                for mask in 0..1u64 << n {
                    let spins: Vec<i8> =
                        (0..n).map(|i| if (mask >> i) & 1 == 1 { 1 } else { -1 }).collect();
                    let e = p.energy(&spins);
                    match &best {
                        None => {
                            best = Some(e);
                            mins = vec![spins];
                        }
                        Some(b) if e < *b => {
                            best = Some(e);
                            mins = vec![spins];
                        }
                        Some(b) if e == *b => mins.push(spins),
                        _ => {}
                    }
                }
                mins
            };
            assert_eq!(argmin(&m), argmin(&scaled));
        }
    }

    #[test]
    fn physical_qubit_estimate_matches_known_sizes() {
        let expected = [(9, 36), (16, 80), (25, 200), (36, 360), (49, 686), (64, 1088)];
        for (n, qubits) in expected {
            assert_eq!(estimate_physical_qubits(n), qubits);
        }
    }

    #[test]
    fn variable_map_is_a_bijection() {
        let g = SimpleDigraph::new(3, [(0, 1), (1, 2)]);
        let (_, map) = positional_qubo(&g, &coef_int(1)).unwrap();
        assert_eq!(map.len(), 9);
        for var in 0..map.len() {
            let key = *map.key(var).unwrap();
            assert_eq!(map.var(&key), Some(var));
        }
        let (_, map) = edge_qubo(&g, &coef_int(1)).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.var(&VarKey::Edge { from: 0, to: 1 }), Some(0));
        assert_eq!(map.var(&VarKey::Edge { from: 1, to: 2 }), Some(1));
    }
}
