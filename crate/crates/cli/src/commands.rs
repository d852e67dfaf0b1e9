use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::Context;

use cubical::construct::{
    build_induced_nonlayered, build_nonlayered, Construction, ConstructionError, ConstructionTrace,
};
use cubical::embedding::{is_induced, labelling_to_embedding, layered_embedding};
use cubical::graph::girth;
use cubical::io::{
    read_graph, read_json, to_dot, write_json, EmbeddingDocument, GraphFile, LoadedGraph,
};
use cubical::labelling::{verify_cubical, verify_layered, EdgeLabelling};
use cubical::reproduce;
use cubical::solver::{
    certify_not_layered, decide, verify_separating_condition_ii, Budget, Certification, Outcome,
    Property, SolverError,
};

use crate::{
    BudgetArgs, CheckProperty, Command, Failure, SearchProperty, Variant, EXIT_BUDGET, EXIT_OK,
    EXIT_REFUTED,
};

pub fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Construct {
            k,
            variant,
            out,
            trace,
            emit_witness,
        } => construct(k, variant, out.as_deref(), trace.as_deref(), emit_witness),
        Command::Verify { input, property } => verify(&input, property),
        Command::Embed {
            input,
            property,
            anchor,
            out,
        } => embed(&input, property, anchor, out.as_deref()),
        Command::Girth { input } => {
            let loaded = read_graph(&input)?;
            match girth(&loaded.graph) {
                Some(g) => println!("girth {g}"),
                None => println!("girth infinite (acyclic)"),
            }
            Ok(EXIT_OK)
        }
        Command::Decide {
            input,
            property,
            budget,
            out,
        } => decide_cmd(&input, property, budget, out.as_deref()),
        Command::Separating { input, t, budget } => separating(&input, t, budget),
        Command::Certify {
            input,
            trace,
            k,
            variant,
            budget,
        } => certify(input.as_deref(), trace.as_deref(), k, variant, budget),
        Command::Reproduce {
            seed,
            include_stretch,
            out,
        } => reproduce_cmd(seed, include_stretch, out.as_deref()),
        Command::ExportDot { input, out } => export_dot(&input, out.as_deref()),
    }
}

fn budget(args: BudgetArgs) -> Result<Budget, Failure> {
    let mut b = Budget {
        max_nodes: args.max_nodes,
        max_time: None,
    };
    if let Some(s) = args.max_seconds {
        if !(s.is_finite() && s > 0.0) {
            return Err(Failure::Usage(format!(
                "--max-seconds must be positive, got {s}"
            )));
        }
        b.max_time = Some(Duration::from_secs_f64(s));
    }
    Ok(b)
}

fn build(k: usize, variant: Variant) -> Result<Construction, Failure> {
    let built = match variant {
        Variant::Plain => build_nonlayered(k),
        Variant::Induced => build_induced_nonlayered(k),
    };
    built.map_err(|e| match e {
        ConstructionError::InvalidK { .. } => Failure::Usage(e.to_string()),
        other => Failure::Input(other.into()),
    })
}

fn construct(
    k: usize,
    variant: Variant,
    out: Option<&Path>,
    trace_path: Option<&Path>,
    emit_witness: bool,
) -> Result<u8, Failure> {
    let c = build(k, variant)?;
    let g = c.graph();
    let trace = c.trace(emit_witness);
    println!("vertices {}", g.vertex_count());
    println!("edges {}", g.edge_count());
    match girth(g) {
        Some(x) => println!("girth {x}"),
        None => println!("girth infinite"),
    }
    println!("dimension {}", c.labelling().universe().len());
    println!("stages {}", c.stages.len());
    for s in &trace.stages {
        println!(
            "  round {}: t {}, tree {} vertices / {} edges, {} pairs, witness dimension {}",
            s.round, s.t, s.vertices, s.edges, s.pairs, s.dimension
        );
    }
    println!(
        "spindles {} x {} paths of length {}",
        trace.pairs.len(),
        trace.path_count,
        trace.k
    );
    if let Some(path) = out {
        let file = GraphFile {
            vertex_count: g.vertex_count(),
            edges: g.edges().to_vec(),
            pairs: Some(trace.pairs.clone()),
            labels: Some(c.labelling().labels().to_vec()),
        };
        write_json(path, &file)?;
    }
    if let Some(path) = trace_path {
        write_json(path, &trace)?;
    }
    Ok(EXIT_OK)
}

fn labelled(loaded: &LoadedGraph) -> Result<&EdgeLabelling, Failure> {
    loaded
        .labelling
        .as_ref()
        .ok_or_else(|| Failure::Input(anyhow::anyhow!("graph file has no labels")))
}

fn verify(input: &Path, property: CheckProperty) -> Result<u8, Failure> {
    let loaded = read_graph(input)?;
    let chi = labelled(&loaded)?;
    let g = &loaded.graph;
    let verdict = match property {
        CheckProperty::Cubical => verify_cubical(g, chi).map_err(|v| v.to_string()),
        CheckProperty::Layered => verify_layered(g, chi).map_err(|v| v.to_string()),
        CheckProperty::Induced => match verify_cubical(g, chi) {
            Err(v) => Err(format!("not cubical: {v}")),
            Ok(()) => {
                let f = labelling_to_embedding(g, chi, 0).context("building the embedding")?;
                is_induced(g, &f).map_err(|w| {
                    format!(
                        "vertices {} and {} are adjacent in the cube but not in the graph",
                        w.0, w.1
                    )
                })
            }
        },
    };
    match verdict {
        Ok(()) => {
            println!("holds");
            Ok(EXIT_OK)
        }
        Err(witness) => {
            println!("fails: {witness}");
            Ok(EXIT_REFUTED)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn embed(
    input: &Path,
    property: SearchProperty,
    anchor: usize,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let loaded = read_graph(input)?;
    let chi = labelled(&loaded)?;
    let g = &loaded.graph;
    if anchor >= g.vertex_count() {
        return Err(Failure::Usage(format!("anchor {anchor} out of range")));
    }
    let verdict = match property {
        SearchProperty::Cubical => verify_cubical(g, chi),
        SearchProperty::Layered => verify_layered(g, chi),
    };
    if let Err(v) = verdict {
        println!("fails: {v}");
        return Ok(EXIT_REFUTED);
    }
    let doc = match property {
        SearchProperty::Cubical => {
            EmbeddingDocument::from(&labelling_to_embedding(g, chi, anchor).context("embedding")?)
        }
        SearchProperty::Layered => {
            let lay = layered_embedding(g, chi, anchor).context("layer embedding")?;
            eprintln!("layer {}", lay.layer);
            EmbeddingDocument::from(&lay.cube)
        }
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(&text, out)?;
    Ok(EXIT_OK)
}

fn print_stats(nodes: u64, depth: usize, elapsed: Duration) {
    println!("nodes {nodes}");
    println!("max depth {depth}");
    println!("elapsed {:.3}s", elapsed.as_secs_f64());
}

fn decide_cmd(
    input: &Path,
    property: SearchProperty,
    args: BudgetArgs,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let b = budget(args)?;
    let loaded = read_graph(input)?;
    let g = &loaded.graph;
    let p = match property {
        SearchProperty::Cubical => Property::Cubical,
        SearchProperty::Layered => Property::Layered,
    };
    let r = decide(g, p, b);
    let code = match &r.outcome {
        Outcome::Witness(chi) => {
            println!("witness {:?}", chi.labels());
            if let Some(path) = out {
                write_json(path, &GraphFile::new(g, loaded.pairs.as_ref(), Some(chi)))?;
            }
            EXIT_OK
        }
        Outcome::Refuted => {
            println!("refuted");
            EXIT_REFUTED
        }
        Outcome::BudgetExhausted => {
            println!("budget exhausted");
            EXIT_BUDGET
        }
    };
    print_stats(r.stats.nodes, r.stats.max_depth, r.stats.elapsed);
    Ok(code)
}

fn separating(input: &Path, t: usize, args: BudgetArgs) -> Result<u8, Failure> {
    let b = budget(args)?;
    let loaded = read_graph(input)?;
    let pairs = loaded
        .pairs
        .ok_or_else(|| Failure::Input(anyhow::anyhow!("graph file has no pairs")))?;
    match verify_separating_condition_ii(&loaded.graph, &pairs, t, b) {
        Ok(r) => {
            println!("labellings {}", r.labellings);
            for (d, n) in &r.max_distance_histogram {
                println!("  largest pair distance {d}: {n} labellings");
            }
            print_stats(r.stats.nodes, r.stats.max_depth, r.stats.elapsed);
            match r.counterexample {
                None => {
                    println!("holds");
                    Ok(EXIT_OK)
                }
                Some(chi) => {
                    println!(
                        "fails: labelling {:?} keeps every pair below {}",
                        chi.labels(),
                        t + 2
                    );
                    Ok(EXIT_REFUTED)
                }
            }
        }
        Err(SolverError::BudgetExhausted(stats)) => {
            println!("budget exhausted");
            print_stats(stats.nodes, stats.max_depth, stats.elapsed);
            Ok(EXIT_BUDGET)
        }
        Err(SolverError::NotATree) => {
            Err(Failure::Input(anyhow::anyhow!("input graph is not a tree")))
        }
        Err(e) => Err(e.into()),
    }
}

fn certify(
    input: Option<&Path>,
    trace: Option<&Path>,
    k: Option<usize>,
    variant: Variant,
    args: BudgetArgs,
) -> Result<u8, Failure> {
    let b = budget(args)?;
    let (graph, trace) = match (input, trace, k) {
        (Some(i), Some(t), _) => (read_graph(i)?.graph, read_json::<ConstructionTrace>(t)?),
        (None, None, Some(k)) => {
            let c = build(k, variant)?;
            (c.graph().clone(), c.trace(false))
        }
        _ => {
            return Err(Failure::Usage(
                "give either --in with --trace, or --k".into(),
            ))
        }
    };
    match certify_not_layered(&graph, Some(&trace), b) {
        Certification::Certified(d) => {
            println!("certified: no layer embedding");
            println!(
                "  {} pairs, {} layered tree labellings checked, at least {} disjoint paths of length {} per pair",
                d.pairs, d.labellings_checked, d.paths_per_pair, d.spindle_length
            );
            Ok(EXIT_OK)
        }
        Certification::NotApplicable(why) => {
            println!("not applicable: {why}");
            Ok(EXIT_REFUTED)
        }
        Certification::BudgetExhausted(stats) => {
            println!("budget exhausted");
            print_stats(stats.nodes, stats.max_depth, stats.elapsed);
            Ok(EXIT_BUDGET)
        }
    }
}

fn reproduce_cmd(seed: u64, include_stretch: bool, out: Option<&Path>) -> Result<u8, Failure> {
    let mut results = Vec::new();
    for id in reproduce::criteria_ids(include_stretch) {
        let r = reproduce::run(id, seed);
        println!("{}", r.line());
        results.push(r);
    }
    let gating_ok = results.iter().filter(|r| r.gating).all(|r| r.ok());
    let passed = results.iter().filter(|r| r.ok()).count();
    println!("{passed}/{} criteria passed", results.len());
    if let Some(path) = out {
        write_json(path, &results)?;
    }
    Ok(if gating_ok { EXIT_OK } else { EXIT_REFUTED })
}

fn export_dot(input: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let loaded = read_graph(input)?;
    let g = &loaded.graph;
    let chi = loaded.labelling.as_ref();
    let coords = chi
        .filter(|chi| verify_cubical(g, chi).is_ok())
        .and_then(|chi| labelling_to_embedding(g, chi, 0).ok());
    emit(&to_dot(g, chi, coords.as_ref()), out)?;
    Ok(EXIT_OK)
}
