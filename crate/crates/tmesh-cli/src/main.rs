//! `tmesh`: exact spline-space analysis over T-meshes.
//!
//! A thin presentation layer over the `tmesh-spline` library: every command
//! reads JSON inputs (file paths or `fixture:<name>` built-ins), runs one
//! library pipeline, and prints either a human summary or, with `--json`,
//! the serialized report.
//!
//! Exit codes: 0 success, 2 read/parse/validation failure, 3 inconclusive
//! witness search, 4 similarity budget exceeded.

mod input;
mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use tmesh_spline::analysis::{analyze, AnalysisReport, BlockReport};
use tmesh_spline::conformality::{build_matrix, rank_identity_check, RankIdentity};
use tmesh_spline::exact::Rational;
use tmesh_spline::mesh::{random_mesh, RandomMeshParams, TMesh};
use tmesh_spline::partition::complete_partition;
use tmesh_spline::stability::{
    sample_similar, structurally_isomorphic, structurally_similar, witness_search, StabilityError,
    StructuralMap, WitnessMethod, WitnessReport, DEFAULT_SIMILARITY_BUDGET,
    DEFAULT_WITNESS_SAMPLES,
};

const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tmesh",
    version,
    about = "Exact spline-space analysis over T-meshes",
    long_about = "Analyzes polynomial spline spaces of highest-order smoothness over \
                  T-meshes through the smoothing-cofactor conformality matrix: exact \
                  dimensions, complete partitions, structural maps, and rank-stability \
                  witnesses.\n\nInputs are JSON files; `fixture:<name>` (for example \
                  `fixture:pinwheel`) names a built-in example mesh."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a mesh document and report structural validity.
    Validate {
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Full analysis: stats, conformality rank, partition, dimensions.
    Analyze {
        input: String,
        #[arg(short = 'd', long = "degree")]
        degree: usize,
        #[arg(long)]
        json: bool,
        /// Also emit the conformality matrix entries.
        #[arg(long)]
        dump_matrix: bool,
    },
    /// Spline-space dimension only.
    Dimension {
        input: String,
        #[arg(short = 'd', long = "degree")]
        degree: usize,
        #[arg(long)]
        json: bool,
    },
    /// Complete partition of the component: core and elimination order.
    Partition {
        /// Mesh or component document.
        input: String,
        #[arg(short = 'd', long = "degree")]
        degree: usize,
        #[arg(long)]
        json: bool,
    },
    /// Structural isomorphism between two meshes.
    Isomorphic {
        a: String,
        b: String,
        #[arg(long)]
        json: bool,
    },
    /// Structural similarity between two components.
    Similar {
        /// Mesh or component document.
        a: String,
        /// Mesh or component document.
        b: String,
        /// Search-node budget for the backtracking matcher.
        #[arg(long, default_value_t = DEFAULT_SIMILARITY_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Search for a placement witnessing conformality rank instability.
    Witness {
        /// Mesh or component document.
        input: String,
        #[arg(short = 'd', long = "degree")]
        degree: usize,
        /// Seed for the sampling fallback.
        #[arg(long)]
        seed: u64,
        /// Maximum sampled placements after the closed form is exhausted.
        #[arg(long, default_value_t = DEFAULT_WITNESS_SAMPLES)]
        budget: u32,
        #[arg(long)]
        json: bool,
    },
    /// Rank histogram over random members of the similar class.
    Sample {
        /// Mesh or component document.
        input: String,
        #[arg(short = 'd', long = "degree")]
        degree: usize,
        #[arg(long)]
        seed: u64,
        /// Number of random placements to draw.
        #[arg(long, default_value_t = 50)]
        draws: u32,
        #[arg(long)]
        json: bool,
    },
    /// Generate a seeded random T-mesh document.
    GenRandom {
        #[arg(long)]
        seed: u64,
        /// Number of refinement insertions after the initial grid.
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Degree floor: generated t-edges keep at least degree + 2 vertices.
        #[arg(short = 'd', long = "degree", default_value_t = 3)]
        degree: usize,
        /// Output path (stdout when omitted).
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Render a mesh to SVG (component highlighted, associated edges dashed).
    Render {
        input: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    // The Rust runtime ignores SIGPIPE, turning writes into `tmesh ... |
    // head` into EPIPE panics; restore the default so closed pipes end the
    // process quietly like any other command-line tool.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { input, json } => cmd_validate(&input, json),
        Command::Analyze { input, degree, json, dump_matrix } => {
            cmd_analyze(&input, degree, json, dump_matrix)
        }
        Command::Dimension { input, degree, json } => cmd_dimension(&input, degree, json),
        Command::Partition { input, degree, json } => cmd_partition(&input, degree, json),
        Command::Isomorphic { a, b, json } => cmd_isomorphic(&a, &b, json),
        Command::Similar { a, b, budget, json } => cmd_similar(&a, &b, budget, json),
        Command::Witness { input, degree, seed, budget, json } => {
            cmd_witness(&input, degree, seed, budget, json)
        }
        Command::Sample { input, degree, seed, draws, json } => {
            cmd_sample(&input, degree, seed, draws, json)
        }
        Command::GenRandom { seed, steps, degree, out } => cmd_gen_random(seed, steps, degree, out),
        Command::Render { input, out } => cmd_render(&input, &out),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    issues: Vec<String>,
}

fn cmd_validate(path: &str, json: bool) -> Result<ExitCode, String> {
    let text = input::load_text(path)?;
    let (_, report) = TMesh::parse_with_report(&text).map_err(|e| format!("`{path}`: {e}"))?;
    let valid = report.is_valid();
    if json {
        print_json(&ValidateOutput { valid, issues: report.messages() })?;
    } else if valid {
        println!("valid");
    } else {
        println!("{report}");
    }
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    #[serde(flatten)]
    report: &'a AnalysisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<MatrixDump>,
}

/// The conformality matrix with its row and column maps: which component
/// edge owns each row block, and which vertex position each column indexes.
#[derive(Serialize)]
struct MatrixDump {
    rows: Vec<Vec<Rational>>,
    row_blocks: Vec<RowBlockDump>,
    columns: Vec<(Rational, Rational)>,
}

#[derive(Serialize)]
struct RowBlockDump {
    edge: usize,
    row_start: usize,
    row_end: usize,
}

fn block_line(index: usize, b: &BlockReport) -> String {
    let mut line =
        format!("block {index}: edges {:?}, rank {}, cvs {}", b.edges, b.rank, b.cvs_dimension);
    if b.diagonalizable {
        line.push_str(&format!(", diagonalizable (elimination order {:?})", b.elimination_order));
    } else {
        line.push_str(&format!(", core {:?}", b.core_edges));
        if !b.elimination_order.is_empty() {
            line.push_str(&format!(", eliminated {:?}", b.elimination_order));
        }
        match &b.key_cycle {
            Some(kc) => line.push_str(&format!(", key cycle {:?}", kc.edges)),
            None => line.push_str(", no key cycle"),
        }
    }
    line
}

fn cmd_analyze(path: &str, d: usize, json: bool, dump: bool) -> Result<ExitCode, String> {
    let mesh = input::load_mesh(path)?;
    let report = analyze(&mesh, d).map_err(|e| e.to_string())?;
    let matrix = if dump {
        let gt = tmesh_spline::mesh::to_generalized(&tmesh_spline::mesh::t_component(&mesh));
        let cm = build_matrix(&gt, d).map_err(|e| e.to_string())?;
        Some(MatrixDump {
            rows: (0..cm.matrix.rows()).map(|r| cm.matrix.row(r).to_vec()).collect(),
            row_blocks: cm
                .row_blocks
                .iter()
                .map(|(edge, range)| RowBlockDump {
                    edge: *edge,
                    row_start: range.start,
                    row_end: range.end,
                })
                .collect(),
            columns: cm.columns.clone(),
        })
    } else {
        None
    };
    if json {
        print_json(&AnalyzeOutput { report: &report, matrix })?;
        return Ok(ExitCode::SUCCESS);
    }

    println!("degree: {}", report.degree);
    println!(
        "mesh: {} cross-cuts, {} rays, {} t-edges, {} interior vertices",
        report.stats.c, report.stats.rays, report.stats.t, report.stats.n_v
    );
    for e in &report.component_edges {
        println!("  edge {}: {} at {} ({} vertices)", e.index, e.orient, e.line, e.vertex_count);
    }
    println!("conformality rank: {}", report.rank);
    println!("conformality vector space dimension: {}", report.cvs_dimension);
    println!("diagonalizable: {}", if report.diagonalizable { "yes" } else { "no" });
    println!("dimension: {}", report.dimension);
    match report.dimension_diagonalizable {
        Some(v) => println!("dimension (diagonalizable closed form): {v}"),
        None => println!("dimension (diagonalizable closed form): not applicable"),
    }
    println!("dimension (via core reduction): {}", report.dimension_via_core);
    for (i, b) in report.blocks.iter().enumerate() {
        println!("{}", block_line(i, b));
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if let Some(dump) = matrix {
        println!(
            "conformality matrix ({} x {}):",
            dump.rows.len(),
            dump.rows.first().map_or(0, Vec::len)
        );
        for row in &dump.rows {
            let cells: Vec<String> = row.iter().map(Rational::to_string).collect();
            println!("  {}", cells.join(" "));
        }
        for rb in &dump.row_blocks {
            println!("rows {}..{}: edge {}", rb.row_start, rb.row_end, rb.edge);
        }
        let cols: Vec<String> = dump.columns.iter().map(|(x, y)| format!("({x}, {y})")).collect();
        println!("columns: {}", cols.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct DimensionOutput {
    degree: usize,
    dimension: usize,
}

fn cmd_dimension(path: &str, d: usize, json: bool) -> Result<ExitCode, String> {
    let mesh = input::load_mesh(path)?;
    let dimension = tmesh_spline::conformality::spline_dim(&mesh, d).map_err(|e| e.to_string())?;
    if json {
        print_json(&DimensionOutput { degree: d, dimension })?;
    } else {
        println!("{dimension}");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PartitionOutput {
    degree: usize,
    core: Vec<usize>,
    /// Core size `s`.
    core_size: usize,
    /// Component edge count `t`.
    edge_count: usize,
    elimination_order: Vec<usize>,
    diagonalizable: bool,
    /// Both sides of `rank(M) = (t - s)(d + 1) + rank(M_core)`, recomputed
    /// from scratch as a self-check of the partition.
    rank_identity: RankIdentity,
}

fn cmd_partition(path: &str, d: usize, json: bool) -> Result<ExitCode, String> {
    if d == 0 {
        return Err("spline degree must be at least 1, got 0".into());
    }
    let gt = input::load_component(path)?;
    let cp = complete_partition(&gt, d);
    let rank_identity = rank_identity_check(&gt, d).map_err(|e| e.to_string())?;
    let out = PartitionOutput {
        degree: d,
        core_size: cp.s(),
        edge_count: gt.edges().len(),
        diagonalizable: cp.is_diagonalizable(),
        core: cp.cndc,
        elimination_order: cp.diagonalizable_order,
        rank_identity,
    };
    if json {
        print_json(&out)?;
    } else {
        println!("core: {:?} ({} of {} edge(s))", out.core, out.core_size, out.edge_count);
        println!("elimination order: {:?}", out.elimination_order);
        println!("diagonalizable: {}", if out.diagonalizable { "yes" } else { "no" });
        println!(
            "rank identity: rank(M) = {} vs (t - s)(d + 1) + rank(M_core) = {} ({})",
            out.rank_identity.lhs,
            out.rank_identity.rhs,
            if out.rank_identity.holds { "holds" } else { "VIOLATED" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct IsomorphicOutput<'a> {
    isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<&'a StructuralMap>,
}

fn cmd_isomorphic(a: &str, b: &str, json: bool) -> Result<ExitCode, String> {
    let mesh_a = input::load_mesh(a)?;
    let mesh_b = input::load_mesh(b)?;
    let map = structurally_isomorphic(&mesh_a, &mesh_b);
    if json {
        print_json(&IsomorphicOutput { isomorphic: map.is_some(), map: map.as_ref() })?;
    } else {
        match &map {
            Some(m) => {
                println!("isomorphic after {} counterclockwise quarter turn(s)", m.quarter_turns);
                println!("edge map: {:?}", m.edge_map);
            }
            None => println!("not isomorphic"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SimilarOutput {
    similar: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<Vec<usize>>,
}

fn cmd_similar(a: &str, b: &str, budget: u64, json: bool) -> Result<ExitCode, String> {
    let gt_a = input::load_component(a)?;
    let gt_b = input::load_component(b)?;
    match structurally_similar(&gt_a, &gt_b, budget) {
        Ok(map) => {
            if json {
                print_json(&SimilarOutput { similar: map.is_some(), map: map.clone() })?;
            } else {
                match &map {
                    Some(m) => {
                        println!("similar");
                        println!("edge map: {m:?}");
                    }
                    None => println!("not similar"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(StabilityError::SearchBudgetExceeded { budget }) => {
            eprintln!("budget exceeded: similarity search used more than {budget} nodes");
            Ok(ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn method_name(method: WitnessMethod) -> &'static str {
    match method {
        WitnessMethod::StableByDiagonalizability => "stable-by-diagonalizability",
        WitnessMethod::ClosedForm => "closed-form",
        WitnessMethod::Sampled => "sampled",
        WitnessMethod::Inconclusive => "inconclusive",
    }
}

fn print_witness_human(report: &WitnessReport) {
    println!("method: {}", method_name(report.method));
    match report.rank_after {
        Some(after) => println!("rank: {} -> {}", report.rank_before, after),
        None => println!("rank: {}", report.rank_before),
    }
    if let Some(before) = report.key_rank_before {
        match report.key_rank_after {
            Some(after) => println!("key-cycle rank: {before} -> {after}"),
            None => println!("key-cycle rank: {before}"),
        }
    }
    if let (Some(target), Some(coord)) = (&report.target, &report.witness_coord) {
        println!(
            "target: edge {}, vertex {} (coordinate {}) -> {}",
            target.edge, target.vertex, target.original, coord
        );
    }
    println!("note: {}", report.note);
}

fn cmd_witness(
    path: &str,
    d: usize,
    seed: u64,
    budget: u32,
    json: bool,
) -> Result<ExitCode, String> {
    let gt = input::load_component(path)?;
    let report = witness_search(&gt, d, seed, budget).map_err(|e| e.to_string())?;
    if json {
        print_json(&report)?;
    } else {
        print_witness_human(&report);
    }
    Ok(if report.method == WitnessMethod::Inconclusive {
        ExitCode::from(EXIT_INCONCLUSIVE)
    } else {
        ExitCode::SUCCESS
    })
}

#[derive(Serialize)]
struct SampleOutput {
    degree: usize,
    draws: u32,
    seed: u64,
    histogram: std::collections::BTreeMap<usize, u64>,
}

fn cmd_sample(path: &str, d: usize, seed: u64, draws: u32, json: bool) -> Result<ExitCode, String> {
    let gt = input::load_component(path)?;
    let histogram = sample_similar(&gt, d, draws, seed).map_err(|e| e.to_string())?;
    if json {
        print_json(&SampleOutput { degree: d, draws, seed, histogram })?;
    } else {
        for (rank, count) in &histogram {
            println!("rank {rank}: {count} draw(s)");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_random(
    seed: u64,
    steps: usize,
    degree: usize,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let params = RandomMeshParams { refine_steps: steps, degree_floor: degree };
    let mesh = random_mesh(seed, &params);
    let text = mesh.to_json();
    match out {
        Some(path) => fs::write(&path, text.as_bytes())
            .map_err(|e| format!("cannot write `{}`: {e}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(path: &str, out: &PathBuf) -> Result<ExitCode, String> {
    let mesh = input::load_mesh(path)?;
    let svg = render::render_svg(&mesh);
    fs::write(out, svg.as_bytes()).map_err(|e| format!("cannot write `{}`: {e}", out.display()))?;
    Ok(ExitCode::SUCCESS)
}
