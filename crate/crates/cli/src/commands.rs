//! Subcommand implementations. Every output artifact embeds a metadata block
//! with the tool version, the fully resolved configuration, the master seed
//! and the PRNG identifier.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use quasm::assembly::{
    decode_edges, decode_positional, merge_partition_paths, reconstruct_sequence,
    validate_hamiltonian_path, GraphPath,
};
use quasm::bench::{run_campaign, summarize_tts, write_json_report, CampaignSpec, TaPolicy};
use quasm::bridge::bridge_decompose;
use quasm::fasta::{read_fasta, write_fasta, FastaRecord};
use quasm::formulation::{
    edge_qubo, normalize_ising, positional_qubo, qubo_to_ising, Encoding, VariableMap, VarKey,
};
use quasm::olc::{build_olc_graph, dedup_fragments, DirectedGraph, OlcGraph};
use quasm::qubo_format::{qubo_to_string, read_qubo, variable_map_from_json, variable_map_to_json};
use quasm::rational::{parse_coef, to_f64, Coef};
use quasm::rng::{derive_seed, PRNG_ALGORITHM};
use quasm::sequence::NucleotideSequence;
use quasm::solvers::{brute_force, simcim_solve, SimCimParams, SpinConfiguration};

use crate::{
    AssembleArgs, BenchArgs, GenerateArgs, GraphArgs, PipelineArgs, QuboArgs, SolveArgs,
    SolverArg, SolverOpts,
};

fn metadata(seed: Option<u64>, config: serde_json::Value) -> serde_json::Value {
    json!({
        "tool": "quasm",
        "version": env!("CARGO_PKG_VERSION"),
        "prng": PRNG_ALGORITHM,
        "seed": seed,
        "config": config,
    })
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, contents)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            if !contents.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn parse_penalty(text: &str) -> Result<Coef> {
    let penalty = parse_coef(text).with_context(|| format!("invalid penalty `{text}`"))?;
    if penalty <= quasm::rational::coef_int(0) {
        bail!("penalty must be positive, got {text}");
    }
    Ok(penalty)
}

fn load_graph(path: &Path) -> Result<OlcGraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    OlcGraph::from_json(&text).with_context(|| format!("parsing graph {}", path.display()))
}

fn resolve_solver_params(opts: &SolverOpts, seed: Option<u64>) -> Result<SimCimParams> {
    let config_path = opts
        .config
        .clone()
        .or_else(|| std::env::var_os("QUASM_SOLVER_CONFIG").map(PathBuf::from));
    let mut params = match config_path {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .with_context(|| format!("reading solver config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing solver config {}", path.display()))?
        }
        None => SimCimParams::default(),
    };
    if let Some(v) = opts.attempts {
        params.attempts = v;
    }
    if let Some(v) = opts.iterations {
        params.iterations = v;
    }
    if let Some(v) = opts.zeta {
        params.zeta = v;
    }
    if let Some(v) = opts.noise_sigma {
        params.noise_sigma = v;
    }
    if let Some(v) = opts.pump_start {
        params.pump.start = v;
    }
    if let Some(v) = opts.pump_end {
        params.pump.end = v;
    }
    if let Some(v) = seed {
        params.seed = v;
    }
    Ok(params)
}

pub(crate) fn generate(args: GenerateArgs) -> Result<()> {
    let records: Vec<FastaRecord> = (0..args.count)
        .map(|index| {
            let record_seed = derive_seed(args.seed, "generate", &[index]);
            let sequence = NucleotideSequence::generate(args.length as usize, record_seed)
                .expect("length >= 1 enforced by clap");
            FastaRecord {
                id: format!("seq_{index}"),
                sequence,
            }
        })
        .collect();
    let comments = vec![
        format!("tool=quasm version={}", env!("CARGO_PKG_VERSION")),
        format!(
            "prng={PRNG_ALGORITHM} seed={} length={} count={}",
            args.seed, args.length, args.count
        ),
    ];
    let mut buf = Vec::new();
    write_fasta(&mut buf, &records, &comments)?;
    write_output(args.output.as_deref(), &String::from_utf8(buf)?)
}

pub(crate) fn graph(args: GraphArgs) -> Result<()> {
    let file = fs::File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))?;
    let records = read_fasta(std::io::BufReader::new(file))
        .with_context(|| format!("parsing FASTA {}", args.input.display()))?;

    let labels: Vec<NucleotideSequence> = match args.k {
        Some(k) => {
            let mut labels = Vec::new();
            for record in &records {
                for fragment in quasm::olc::shred_to_kmers(&record.sequence, k)
                    .with_context(|| format!("shredding record {}", record.id))?
                {
                    labels.push(fragment.label);
                }
            }
            labels
        }
        None => records.iter().map(|r| r.sequence.clone()).collect(),
    };
    let (fragments, duplicates) = dedup_fragments(labels);
    if duplicates > 0 {
        eprintln!("warning: merged {duplicates} duplicate fragment(s)");
    }
    let min_overlap = args
        .min_overlap
        .unwrap_or_else(|| args.k.map_or(1, |k| k.saturating_sub(1).max(1)));
    let graph = build_olc_graph(fragments, min_overlap)?;

    let meta = metadata(
        None,
        json!({
            "input": args.input.display().to_string(),
            "k": args.k,
            "min_overlap": min_overlap,
            "records": records.len(),
            "duplicates_merged": duplicates,
        }),
    );
    write_output(args.output.as_deref(), &graph.to_json(Some(meta)))
}

pub(crate) fn qubo(args: QuboArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let penalty = parse_penalty(&args.penalty)?;
    let encoding: Encoding = args.encoding.into();
    let (qubo, map) = match encoding {
        Encoding::Positional => positional_qubo(&graph, &penalty)?,
        Encoding::Edge => edge_qubo(&graph, &penalty)?,
    };

    fs::write(&args.output, qubo_to_string(&qubo))
        .with_context(|| format!("writing {}", args.output.display()))?;

    let varmap_path = args
        .varmap
        .clone()
        .unwrap_or_else(|| args.output.with_extension("varmap.json"));
    let meta = metadata(
        None,
        json!({
            "graph": args.graph.display().to_string(),
            "encoding": encoding.to_string(),
            "penalty": penalty.to_string(),
            "n_vars": qubo.n(),
            "qubo_file": args.output.display().to_string(),
        }),
    );
    fs::write(&varmap_path, variable_map_to_json(&map, Some(meta)))
        .with_context(|| format!("writing {}", varmap_path.display()))?;
    Ok(())
}

/// On-disk schema of `solve` results, consumed by `assemble`.
#[derive(Serialize, Deserialize)]
pub(crate) struct SolveOutput {
    pub metadata: serde_json::Value,
    pub solver: String,
    pub n_vars: usize,
    pub best: BestConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_energy_reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attempts: Option<Vec<quasm::solvers::AttemptRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground: Option<GroundSection>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct BestConfig {
    pub bits: Vec<u8>,
    pub spins: Vec<i8>,
    pub energy_qubo: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_normalized: Option<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct GroundSection {
    pub energy_qubo: f64,
    pub minimizer_count: usize,
    /// At most 64 minimizers are listed.
    pub minimizers_bits: Vec<Vec<u8>>,
}

pub(crate) fn solve(args: SolveArgs) -> Result<()> {
    let text =
        fs::read_to_string(&args.qubo).with_context(|| format!("reading {}", args.qubo.display()))?;
    let qubo = read_qubo(text.as_bytes())
        .with_context(|| format!("parsing QUBO {}", args.qubo.display()))?;
    let ising = qubo_to_ising(&qubo);

    let output = match args.solver {
        SolverArg::Brute => {
            let ground = brute_force(&ising)?;
            let best = ground.configs.first().expect("ground set is non-empty");
            let meta = metadata(
                None,
                json!({
                    "qubo": args.qubo.display().to_string(),
                    "solver": "brute",
                    "n_vars": qubo.n(),
                }),
            );
            SolveOutput {
                metadata: meta,
                solver: "brute".into(),
                n_vars: qubo.n(),
                best: BestConfig {
                    bits: best.to_bits(),
                    spins: best.spins().to_vec(),
                    energy_qubo: ground.energy,
                    energy_normalized: None,
                },
                normalization_scale: None,
                ground_energy_reference: Some(ground.energy),
                attempts: None,
                ground: Some(GroundSection {
                    energy_qubo: ground.energy,
                    minimizer_count: ground.configs.len(),
                    minimizers_bits: ground
                        .configs
                        .iter()
                        .take(64)
                        .map(SpinConfiguration::to_bits)
                        .collect(),
                }),
            }
        }
        SolverArg::Simcim => {
            let (normalized, scale) = normalize_ising(&ising);
            let params = resolve_solver_params(&args.solver_opts, args.seed)?;
            // Translate a QUBO-domain reference into the normalized domain:
            // E_norm = offset + (E - offset) / scale.
            let offset = to_f64(normalized.offset());
            let scale_f = to_f64(&scale);
            let reference_norm = args.reference.map(|r| offset + (r - offset) / scale_f);
            let result = simcim_solve(&normalized, &params, reference_norm)?;
            let bits = result.best_config.to_bits();
            let energy_qubo = qubo.objective_f64(&bits);
            let meta = metadata(
                Some(params.seed),
                json!({
                    "qubo": args.qubo.display().to_string(),
                    "solver": "simcim",
                    "n_vars": qubo.n(),
                    "params": serde_json::to_value(&params)?,
                    "reference_qubo": args.reference,
                }),
            );
            SolveOutput {
                metadata: meta,
                solver: "simcim".into(),
                n_vars: qubo.n(),
                best: BestConfig {
                    bits,
                    spins: result.best_config.spins().to_vec(),
                    energy_qubo,
                    energy_normalized: Some(result.best_energy),
                },
                normalization_scale: Some(scale_f),
                ground_energy_reference: reference_norm,
                attempts: Some(result.attempts),
                ground: None,
            }
        }
    };

    fs::write(&args.output, serde_json::to_string_pretty(&output)?)
        .with_context(|| format!("writing {}", args.output.display()))?;
    Ok(())
}

fn decode_with(
    encoding: Encoding,
    bits: &[u8],
    map: &VariableMap,
    graph: &OlcGraph,
) -> std::result::Result<GraphPath, quasm::assembly::AssemblyError> {
    match encoding {
        Encoding::Positional => decode_positional(bits, map, graph),
        Encoding::Edge => decode_edges(bits, map, graph),
    }
}

pub(crate) fn assemble(args: AssembleArgs) -> Result<()> {
    if args.partition {
        return assemble_partition(args);
    }
    let graph = load_graph(&args.graph)?;
    let varmap_path = args.varmap.as_ref().expect("required by clap");
    let result_path = args.result.as_ref().expect("required by clap");
    let map = variable_map_from_json(
        &fs::read_to_string(varmap_path)
            .with_context(|| format!("reading {}", varmap_path.display()))?,
    )
    .with_context(|| format!("parsing variable map {}", varmap_path.display()))?;
    let result: SolveOutput = serde_json::from_str(
        &fs::read_to_string(result_path)
            .with_context(|| format!("reading {}", result_path.display()))?,
    )
    .with_context(|| format!("parsing result {}", result_path.display()))?;

    let meta = metadata(
        None,
        json!({
            "graph": args.graph.display().to_string(),
            "varmap": varmap_path.display().to_string(),
            "result": result_path.display().to_string(),
            "encoding": map.encoding().to_string(),
        }),
    );

    match decode_with(map.encoding(), &result.best.bits, &map, &graph) {
        Ok(path) => {
            let valid = validate_hamiltonian_path(&graph, &path);
            let sequence = reconstruct_sequence(&path, &graph)?;
            let report = json!({
                "metadata": meta,
                "valid": valid,
                "path": path.vertices,
                "sequence": sequence.to_string(),
                "energy_qubo": result.best.energy_qubo,
            });
            write_output(args.output.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            if !valid {
                bail!("decoded path does not cover the graph");
            }
            Ok(())
        }
        Err(err) => {
            let report = json!({
                "metadata": meta,
                "valid": false,
                "error": err.to_string(),
                "energy_qubo": result.best.energy_qubo,
            });
            write_output(args.output.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            Err(err).context("configuration does not decode to a Hamiltonian path")
        }
    }
}

/// Encode a path as a bit configuration of the given whole-graph encoding.
fn path_to_bits(path: &GraphPath, map: &VariableMap) -> Vec<u8> {
    let mut bits = vec![0u8; map.len()];
    match map.encoding() {
        Encoding::Positional => {
            for (step, &vertex) in path.vertices.iter().enumerate() {
                let var = map
                    .var(&VarKey::Position { vertex, step })
                    .expect("path fits the map");
                bits[var] = 1;
            }
        }
        Encoding::Edge => {
            for edge in &path.edges_used {
                let var = map
                    .var(&VarKey::Edge { from: edge.from, to: edge.to })
                    .expect("path edge exists in the map");
                bits[var] = 1;
            }
        }
    }
    bits
}

fn assemble_partition(args: AssembleArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let penalty = parse_penalty(&args.penalty)?;
    let encoding: Encoding = args.encoding.into();
    let parts = bridge_decompose(&graph)?;

    let mut stitched: Vec<(GraphPath, Option<quasm::olc::Edge>)> = Vec::new();
    for (index, part) in parts.iter().enumerate() {
        let required_start = if index == 0 {
            None
        } else {
            parts[index - 1].bridge_to_next.map(|b| b.to)
        };
        let required_end = part.bridge_to_next.map(|b| b.from);

        let (part_qubo, part_map) = match encoding {
            Encoding::Positional => positional_qubo(&part.graph, &penalty)?,
            Encoding::Edge => edge_qubo(&part.graph, &penalty)?,
        };
        let part_ising = qubo_to_ising(&part_qubo);

        let lift = |bits: &[u8]| -> Option<GraphPath> {
            let local = decode_with(encoding, bits, &part_map, &part.graph).ok()?;
            let vertices: Vec<usize> =
                local.vertices.iter().map(|&v| part.to_original(v)).collect();
            let edges_used = vertices
                .windows(2)
                .map(|p| *graph.edge(p[0], p[1]).expect("part edges exist in the graph"))
                .collect();
            let path = GraphPath { vertices, edges_used };
            let fits = required_start.is_none_or(|s| path.vertices.first() == Some(&s))
                && required_end.is_none_or(|e| path.vertices.last() == Some(&e));
            fits.then_some(path)
        };

        let chosen = match args.solver {
            SolverArg::Brute => brute_force(&part_ising)?
                .configs
                .iter()
                .find_map(|config| lift(&config.to_bits())),
            SolverArg::Simcim => {
                // Reseed a few times in case the best configuration's
                // endpoints do not line up with the bridges.
                let base = resolve_solver_params(&args.solver_opts, args.seed)?;
                let (normalized, _) = normalize_ising(&part_ising);
                (0..8u64).find_map(|retry| {
                    let params = SimCimParams {
                        seed: derive_seed(base.seed, "assemble-part", &[index as u64, retry]),
                        ..base.clone()
                    };
                    let result = simcim_solve(&normalized, &params, None).ok()?;
                    lift(&result.best_config.to_bits())
                })
            }
        };
        let Some(chosen) = chosen else {
            bail!(
                "part {index} ({} vertices) has no minimal solution compatible with its \
                 bridge endpoints",
                part.graph.vertex_count(),
            );
        };
        stitched.push((chosen, part.bridge_to_next));
    }

    let merged = merge_partition_paths(&stitched)?;
    let valid = validate_hamiltonian_path(&graph, &merged);
    let sequence = reconstruct_sequence(&merged, &graph)?;

    // Cross-check: the stitched path's energy under the whole-graph encoding.
    let (whole_qubo, whole_map) = match encoding {
        Encoding::Positional => positional_qubo(&graph, &penalty)?,
        Encoding::Edge => edge_qubo(&graph, &penalty)?,
    };
    let energy_qubo = whole_qubo.objective_f64(&path_to_bits(&merged, &whole_map));

    let report = json!({
        "metadata": metadata(args.seed, json!({
            "graph": args.graph.display().to_string(),
            "partition": true,
            "encoding": encoding.to_string(),
            "penalty": penalty.to_string(),
            "parts": parts.len(),
        })),
        "valid": valid,
        "path": merged.vertices,
        "sequence": sequence.to_string(),
        "energy_qubo": energy_qubo,
        "parts": parts.iter().map(|p| json!({
            "vertices": p.original_ids,
            "bridge_to_next": p.bridge_to_next.map(|b| json!({
                "u": b.from, "v": b.to, "overlap": b.overlap,
            })),
        })).collect::<Vec<_>>(),
    });
    write_output(args.output.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    if !valid {
        bail!("stitched path does not cover the graph");
    }
    Ok(())
}

fn parse_ta_policy(text: &str) -> Result<TaPolicy> {
    if text == "measured" {
        return Ok(TaPolicy::Measured);
    }
    if let Some(value) = text.strip_prefix("fixed:") {
        let us: f64 = value
            .parse()
            .with_context(|| format!("invalid fixed t_a `{value}`"))?;
        if us <= 0.0 {
            bail!("fixed t_a must be positive, got {us}");
        }
        return Ok(TaPolicy::Fixed(us));
    }
    bail!("--ta must be `measured` or `fixed:<microseconds>`, got `{text}`")
}

pub(crate) fn bench(args: BenchArgs) -> Result<()> {
    let penalty = parse_penalty(&args.penalty)?;
    let solver = resolve_solver_params(&args.solver_opts, Some(args.seed))?;
    let ta_policy = parse_ta_policy(&args.ta)?;
    let spec = CampaignSpec {
        lengths: args.lengths.clone(),
        instances_per_length: args.instances as usize,
        k: args.k,
        min_overlap: args.min_overlap,
        encoding: args.encoding.into(),
        penalty,
        solver,
        master_seed: args.seed,
        ta_policy,
    };
    let reports = run_campaign(&spec)?;
    let summaries = summarize_tts(&reports);

    let config = serde_json::to_value(&spec)?;
    let comment_lines = vec![
        format!("tool=quasm version={}", env!("CARGO_PKG_VERSION")),
        format!("prng={PRNG_ALGORITHM} seed={}", args.seed),
        format!(
            "lengths={:?} instances={} k={} encoding={} ta={}",
            spec.lengths, spec.instances_per_length, spec.k, spec.encoding, args.ta
        ),
    ];
    if let Some(csv_path) = &args.csv {
        fs::write(csv_path, quasm::bench::render_csv(&reports, &comment_lines))
            .with_context(|| format!("writing {}", csv_path.display()))?;
    }
    if let Some(json_path) = &args.json {
        let report = json!({
            "metadata": metadata(Some(args.seed), config.clone()),
            "summaries": summaries,
            "instances": reports,
        });
        let written = write_json_report(json_path, &report)?;
        eprintln!("wrote {}", written.display());
    }

    for s in &summaries {
        println!(
            "length {:>2}: solved {}/{}  TTS us mean {:.1}  min {:.1}  max {:.1}  p90 {:.1}",
            s.length, s.solved, s.total, s.mean_us, s.min_us, s.max_us, s.p90_us
        );
    }
    Ok(())
}

pub(crate) fn pipeline(args: PipelineArgs) -> Result<()> {
    fs::create_dir_all(&args.outdir)
        .with_context(|| format!("creating {}", args.outdir.display()))?;
    let reads = args.outdir.join("reads.fasta");
    let graph_path = args.outdir.join("graph.json");
    let qubo_path = args.outdir.join("problem.qubo");
    let varmap_path = args.outdir.join("problem.varmap.json");
    let solve_path = args.outdir.join("solve.json");
    let assembly_path = args.outdir.join("assembly.json");

    generate(GenerateArgs {
        length: args.length,
        count: 1,
        seed: args.seed,
        output: Some(reads.clone()),
    })?;
    graph(GraphArgs {
        input: reads,
        k: Some(args.k),
        min_overlap: args.min_overlap,
        output: Some(graph_path.clone()),
    })?;
    qubo(QuboArgs {
        graph: graph_path.clone(),
        encoding: args.encoding,
        penalty: args.penalty.clone(),
        output: qubo_path.clone(),
        varmap: Some(varmap_path.clone()),
    })?;
    solve(SolveArgs {
        qubo: qubo_path,
        solver: args.solver,
        seed: Some(derive_seed(args.seed, "solve", &[0])),
        reference: None,
        solver_opts: args.solver_opts.clone(),
        output: solve_path.clone(),
    })?;
    assemble(AssembleArgs {
        graph: graph_path,
        varmap: Some(varmap_path),
        result: Some(solve_path),
        partition: false,
        encoding: args.encoding,
        penalty: args.penalty.clone(),
        solver: args.solver,
        seed: Some(args.seed),
        solver_opts: args.solver_opts,
        output: Some(assembly_path.clone()),
    })?;

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&assembly_path)?)?;
    println!(
        "assembled: {} (valid={})",
        report["sequence"].as_str().unwrap_or("?"),
        report["valid"]
    );
    Ok(())
}
