//! Property tests for the structural invariants of the pipeline.

use proptest::prelude::*;

use quasm::formulation::{ising_to_qubo, normalize_ising, qubo_to_ising, QuboProblem};
use quasm::olc::{build_olc_graph, detect_overlap, shred_to_kmers, DirectedGraph, Fragment};
use quasm::qubo_format::{qubo_to_string, read_qubo};
use quasm::rational::{coef, is_zero, to_f64};
use quasm::sequence::NucleotideSequence;
use quasm::solvers::SpinConfiguration;

fn sequence_strategy(max_len: usize) -> impl Strategy<Value = NucleotideSequence> {
    proptest::collection::vec(prop_oneof![Just(b'A'), Just(b'C'), Just(b'G'), Just(b'T')], 1..max_len)
        .prop_map(|bases| NucleotideSequence::new(bases).expect("valid bases"))
}

fn qubo_strategy(max_vars: usize) -> impl Strategy<Value = QuboProblem> {
    (1..=max_vars).prop_flat_map(|n| {
        let linear = proptest::collection::vec(-20i128..=20, n);
        let quadratic = proptest::collection::vec(-20i128..=20, n * n);
        let offset = -20i128..=20;
        (Just(n), linear, quadratic, offset).prop_map(|(n, linear, quadratic, offset)| {
            let mut qubo = QuboProblem::new(n);
            qubo.add_offset(coef(offset, 4));
            for (i, &c) in linear.iter().enumerate() {
                qubo.add_linear(i, coef(c, 4));
            }
            for i in 0..n {
                for j in i + 1..n {
                    qubo.add_quadratic(i, j, coef(quadratic[i * n + j], 4));
                }
            }
            qubo
        })
    })
}

fn bits_strategy(n: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..=1, n)
}

proptest! {
    #[test]
    fn shred_count_is_window_count_iff_distinct(seq in sequence_strategy(24), k in 1usize..6) {
        prop_assume!(k <= seq.len());
        let fragments = shred_to_kmers(&seq, k).unwrap();
        let window_count = seq.len() - k + 1;
        prop_assert!(fragments.len() <= window_count);
        let windows: Vec<&[u8]> = seq.windows(k).collect();
        let mut sorted = windows.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(fragments.len(), sorted.len());
        // equality iff all windows distinct
        prop_assert_eq!(fragments.len() == window_count, sorted.len() == windows.len());
        // dense ids in first-occurrence order
        for (i, f) in fragments.iter().enumerate() {
            prop_assert_eq!(f.id, i);
        }
        let first_seen: Vec<usize> = fragments
            .iter()
            .map(|f| windows.iter().position(|w| *w == f.label.as_bytes()).unwrap())
            .collect();
        prop_assert!(first_seen.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn detect_overlap_matches_direct_scan(
        a in sequence_strategy(12),
        b in sequence_strategy(12),
        min_overlap in 1usize..4,
    ) {
        prop_assume!(a != b);
        // Direct scan over every admissible length.
        let mut expected = None;
        for len in 1..a.len().min(b.len()) {
            if len >= min_overlap && a.suffix(len) == b.prefix(len) {
                expected = Some(len);
            }
        }
        prop_assert_eq!(detect_overlap(&a, &b, min_overlap), expected);
    }

    #[test]
    fn built_graphs_satisfy_overlap_invariants(seq in sequence_strategy(16), k in 2usize..5) {
        prop_assume!(k <= seq.len());
        let fragments = shred_to_kmers(&seq, k).unwrap();
        let g = build_olc_graph(fragments, k - 1).unwrap();
        for e in g.edges() {
            let a = &g.fragment(e.from).label;
            let b = &g.fragment(e.to).label;
            prop_assert!(e.overlap >= 1 && e.overlap < a.len().min(b.len()));
            prop_assert_eq!(a.suffix(e.overlap), b.prefix(e.overlap));
            // Stored overlap is maximal.
            for len in e.overlap + 1..a.len().min(b.len()) {
                prop_assert_ne!(a.suffix(len), b.prefix(len));
            }
        }
    }

    #[test]
    fn read_path_is_a_subgraph_when_windows_distinct(seq in sequence_strategy(16), k in 2usize..5) {
        prop_assume!(k <= seq.len());
        let fragments = shred_to_kmers(&seq, k).unwrap();
        prop_assume!(fragments.len() == seq.len() - k + 1);
        let windows: Vec<Vec<u8>> = seq.windows(k).map(|w| w.to_vec()).collect();
        let g = build_olc_graph(fragments, k - 1).unwrap();
        let id_of = |w: &[u8]| {
            g.fragments()
                .iter()
                .find(|f| f.label.as_bytes() == w)
                .unwrap()
                .id
        };
        for pair in windows.windows(2) {
            prop_assert!(g.has_edge(id_of(&pair[0]), id_of(&pair[1])));
        }
    }

    #[test]
    fn generate_is_deterministic(length in 1usize..40, seed in any::<u64>()) {
        let a = NucleotideSequence::generate(length, seed).unwrap();
        let b = NucleotideSequence::generate(length, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn qubo_and_ising_energies_agree_everywhere(qubo in qubo_strategy(8)) {
        let ising = qubo_to_ising(&qubo);
        let n = qubo.n();
        for mask in 0..1u64 << n {
            let bits: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
            let spins = SpinConfiguration::from_bits(&bits);
            // Exact in rationals, and within 1e-9 in floating point.
            prop_assert_eq!(qubo.objective(&bits), ising.energy(spins.spins()));
            prop_assert!((qubo.objective_f64(&bits) - ising.energy_f64(spins.spins())).abs() < 1e-9);
        }
        // Round trip restores coefficients exactly.
        let back = ising_to_qubo(&ising);
        prop_assert_eq!(back.linear(), qubo.linear());
        prop_assert_eq!(back.quadratic(), qubo.quadratic());
        prop_assert_eq!(back.offset(), qubo.offset());
    }

    #[test]
    fn normalization_bounds_and_argmin(qubo in qubo_strategy(4)) {
        let ising = qubo_to_ising(&qubo);
        let (scaled, scale) = normalize_ising(&ising);
        let max = scaled.max_abs_coefficient();
        if is_zero(&max) {
            prop_assert_eq!(to_f64(&scale), 1.0);
        } else {
            prop_assert_eq!(to_f64(&max), 1.0, "max |coefficient| must be exactly 1");
        }
        let n = ising.n();
        let argmin = |p: &quasm::formulation::IsingProblem| -> Vec<u64> {
            let mut best = None;
            let mut mins = Vec::new();
            for mask in 0..1u64 << n {
                let spins: Vec<i8> = (0..n).map(|i| if (mask >> i) & 1 == 1 { 1 } else { -1 }).collect();
                let e = p.energy(&spins);
                match &best {
                    None => { best = Some(e); mins = vec![mask]; }
                    Some(b) if e < *b => { best = Some(e); mins = vec![mask]; }
                    Some(b) if e == *b => mins.push(mask),
                    _ => {}
                }
            }
            mins
        };
        prop_assert_eq!(argmin(&ising), argmin(&scaled));
    }

    #[test]
    fn qubo_text_round_trip(qubo in qubo_strategy(6)) {
        let text = qubo_to_string(&qubo);
        let parsed = read_qubo(text.as_bytes()).unwrap();
        prop_assert_eq!(parsed.n(), qubo.n());
        prop_assert_eq!(parsed.linear(), qubo.linear());
        prop_assert_eq!(parsed.quadratic(), qubo.quadratic());
        prop_assert_eq!(parsed.offset(), qubo.offset());
    }

    #[test]
    fn spin_bits_round_trip(bits in bits_strategy(12)) {
        let config = SpinConfiguration::from_bits(&bits);
        prop_assert_eq!(config.to_bits(), bits);
    }
}

#[test]
fn identical_spec_and_seed_give_identical_graphs() {
    use quasm::olc::InstanceSpec;
    let spec = InstanceSpec { sequence_length: 8, k: 3, min_overlap: 2, seed: 4242 };
    spec.validate().unwrap();
    let build = || {
        let seq = NucleotideSequence::generate(spec.sequence_length, spec.seed).unwrap();
        let frags = shred_to_kmers(&seq, spec.k).unwrap();
        build_olc_graph(frags, spec.min_overlap).unwrap()
    };
    let a = build();
    let b = build();
    assert_eq!(a, b);
    assert_eq!(a.to_json(None), b.to_json(None), "bit-identical serialization");
}

#[test]
fn fragments_dedupe_counts() {
    let labels = vec![
        NucleotideSequence::parse("ATC").unwrap(),
        NucleotideSequence::parse("TCG").unwrap(),
        NucleotideSequence::parse("ATC").unwrap(),
    ];
    let (fragments, duplicates) = quasm::olc::dedup_fragments(labels);
    assert_eq!(fragments.len(), 2);
    assert_eq!(duplicates, 1);
    assert_eq!(
        fragments.iter().map(|f: &Fragment| f.id).collect::<Vec<_>>(),
        vec![0, 1]
    );
}
