//! The `triadic` command line: argument parsing and the four subcommands.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use triadic::clean::{CleanConfig, CleanMode};
use triadic::decompose::{decompose_with, ledger_check, ClusterEdges, DecomposeConfig, Decomposition};
use triadic::metrics::{all_cluster_metrics, summarize, ClusterMetrics};
use triadic::report::{self, FORMAT_VERSION};
use triadic::spectral::{self, NormalizedAdjacency, DEFAULT_DENSE_LIMIT};
use triadic::triangles::{degeneracy_order, enumerate_triangles, read_triangle_dump, write_triangle_dump};
use triadic::weights::compute_tau;
use triadic::{Error, Graph, IngestOptions, Triangle, TriangleIndex};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_EMPTY: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "triadic",
    version,
    about = "Spectral transitivity and spectral triadic decomposition"
)]
pub struct Cli {
    /// Worker threads for triangle enumeration and metrics (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print n, m, triangle count, total weights and tau as JSON.
    Tau(InputArgs),
    /// Enumerate and count triangles, optionally writing a binary dump.
    Triangles(TrianglesArgs),
    /// Run the decomposition and write cluster and metric files.
    Decompose(DecomposeArgs),
    /// Run the decomposition and every runtime check; exit 3 on any failure.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Edge list: whitespace-separated vertex pairs, '#' or '%' comments, optionally gzipped.
    #[arg(long)]
    input: PathBuf,
    /// Reject vertex tokens that are not non-negative integers.
    #[arg(long)]
    integer_labels: bool,
    /// Binary triangle dump: read if present, otherwise written after enumeration.
    #[arg(long)]
    triangles_cache: Option<PathBuf>,
}

#[derive(Args)]
struct TrianglesArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Passes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EdgesArg {
    Live,
    #[value(name = "g-induced")]
    GInduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyLevel {
    Off,
    Ledger,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Cleaning threshold in (0, 1), or "auto" for tau/6.
    #[arg(long, default_value = "0.1")]
    epsilon: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    clean_mode: ModeArg,
    /// Sweep budget per cleaning step in passes mode.
    #[arg(long, default_value_t = 3)]
    max_passes: usize,
    /// Internal edges of a cluster: live at extraction, or all edges of G inside it.
    #[arg(long, value_enum, default_value_t = EdgesArg::Live)]
    cluster_edges: EdgesArg,
    /// Largest matrix handed to the dense eigensolver.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Format::Json, Format::Csv])]
    formats: Vec<Format>,
    #[arg(long, value_enum, default_value_t = VerifyLevel::Ledger)]
    verify_level: VerifyLevel,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value_t = VerifyLevel::Full)]
    verify_level: VerifyLevel,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptyInput | Error::UndefinedTau => EXIT_EMPTY,
            Error::CorruptInput(_) => EXIT_VERIFY,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CmdResult = Result<u8, Failure>;

/// Parses `args` (program name first) and runs them; usage errors give exit
/// code 1.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            eprintln!("{e}");
            EXIT_INPUT
        }
    }
}

/// Runs one parsed invocation and returns the process exit code. Errors are
/// reported on stderr.
pub fn run(cli: Cli) -> u8 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return EXIT_INPUT;
        }
    }
    let result = match cli.command {
        Command::Tau(args) => cmd_tau(&args),
        Command::Triangles(args) => cmd_triangles(&args),
        Command::Decompose(args) => cmd_decompose(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load(args: &InputArgs) -> Result<Graph, Failure> {
    let options = IngestOptions {
        integer_labels: args.integer_labels,
    };
    let (graph, report) = triadic::load_edge_list_file(&args.input, &options).map_err(|e| match e {
        Error::Io(io) => Failure {
            code: EXIT_INPUT,
            message: format!("cannot read {}: {io}", args.input.display()),
        },
        other => other.into(),
    })?;
    info!(
        "loaded {}: n={} m={} ({} pair lines, {} self-loops and {} duplicates dropped)",
        args.input.display(),
        graph.vertex_count(),
        graph.edge_count(),
        report.pair_lines,
        report.self_loops_dropped,
        report.duplicate_edges_dropped
    );
    Ok(graph)
}

/// Triangles from the cache when it exists, otherwise enumerated (and cached).
fn triangles_for(graph: &Graph, args: &InputArgs) -> Result<Vec<Triangle>, Failure> {
    if let Some(path) = &args.triangles_cache {
        if path.exists() {
            info!("reading triangle cache {}", path.display());
            let file = fs::File::open(path)?;
            return Ok(read_triangle_dump(graph, io::BufReader::new(file))?);
        }
        let triangles = enumerate_triangles(graph);
        let mut buf = Vec::new();
        write_triangle_dump(graph, &triangles, &mut buf)?;
        write_atomically(path, &buf)?;
        info!("wrote triangle cache {}", path.display());
        return Ok(triangles);
    }
    Ok(enumerate_triangles(graph))
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_tau(args: &InputArgs) -> CmdResult {
    let graph = load(args)?;
    let triangles = triangles_for(&graph, args)?;
    let tau = compute_tau(&graph, &triangles)?;
    print_json(&json!({
        "format_version": FORMAT_VERSION,
        "n": graph.vertex_count(),
        "m": graph.edge_count(),
        "triangles": triangles.len(),
        "edge_weight_total": tau.total_edge_weight,
        "triangle_weight_total": tau.total_triangle_weight,
        "tau": tau.tau,
    }))?;
    Ok(0)
}

fn cmd_triangles(args: &TrianglesArgs) -> CmdResult {
    let graph = load(&args.input)?;
    let triangles = triangles_for(&graph, &args.input)?;
    // Validates a cached list against the graph.
    TriangleIndex::build(&graph, triangles.clone())?;
    print_json(&json!({
        "format_version": FORMAT_VERSION,
        "n": graph.vertex_count(),
        "m": graph.edge_count(),
        "triangles": triangles.len(),
        "degeneracy": degeneracy_order(&graph).degeneracy,
    }))?;
    Ok(0)
}

fn decompose_config(run: &RunArgs, graph: &Graph, triangles: &[Triangle]) -> Result<DecomposeConfig, Failure> {
    let epsilon = if run.epsilon == "auto" {
        let tau = compute_tau(graph, triangles)?.tau;
        info!("epsilon = tau/6 = {}", tau / 6.0);
        tau / 6.0
    } else {
        run.epsilon.parse::<f64>().map_err(|_| Failure {
            code: EXIT_INPUT,
            message: format!("--epsilon expects a number or \"auto\", got {:?}", run.epsilon),
        })?
    };
    let clean = CleanConfig {
        epsilon,
        mode: match run.clean_mode {
            ModeArg::Exact => CleanMode::Exact,
            ModeArg::Passes => CleanMode::Passes,
        },
        max_passes: run.max_passes,
    };
    clean.validate()?;
    Ok(DecomposeConfig {
        clean,
        cluster_edges: match run.cluster_edges {
            EdgesArg::Live => ClusterEdges::Live,
            EdgesArg::GInduced => ClusterEdges::Induced,
        },
    })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: serde_json::Value,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: serde_json::Value) -> Self {
        Check { name, passed, detail }
    }
}

/// Runtime checks at `level` for a finished decomposition.
fn run_checks(
    graph: &Graph,
    triangles: &[Triangle],
    d: &Decomposition,
    metrics: &[ClusterMetrics],
    level: VerifyLevel,
    dense_limit: usize,
) -> Result<Vec<Check>, Failure> {
    let mut checks = Vec::new();
    if level == VerifyLevel::Off {
        return Ok(checks);
    }
    let ledger = ledger_check(d, graph, triangles);
    checks.push(Check::new("triangle_partition", ledger.partition_holds, json!(ledger)));
    checks.push(Check::new("cleaning_budget", ledger.clean_budget_holds, json!(ledger)));
    let bound_failures: Vec<usize> = metrics
        .iter()
        .filter(|m| !m.triangle_bound_holds)
        .map(|m| m.cluster_id)
        .collect();
    checks.push(Check::new(
        "cluster_triangle_bound",
        bound_failures.is_empty(),
        json!({ "failing_clusters": bound_failures }),
    ));
    if level != VerifyLevel::Full {
        return Ok(checks);
    }

    // The guarantee is only promised when H was clean at extraction.
    let mut checked = 0;
    let mut failing = Vec::new();
    let mut worst: Option<f64> = None;
    for (i, c) in d.clusters.iter().enumerate() {
        let g = &c.extraction.guarantee;
        if !c.extraction.subgraph_clean {
            continue;
        }
        checked += 1;
        if let Some(r) = g.ratio {
            worst = Some(worst.map_or(r, |w: f64| w.min(r)));
        }
        if !g.holds {
            failing.push(i);
        }
    }
    checks.push(Check::new(
        "extraction_guarantee",
        failing.is_empty(),
        json!({
            "required_fraction": triadic::extract::guarantee_fraction(d.config.clean.epsilon),
            "extractions_checked": checked,
            "extractions_skipped_unclean": d.clusters.len() - checked,
            "worst_ratio": worst,
            "failing_clusters": failing,
        }),
    ));

    let mut spectral_failures = Vec::new();
    let mut skipped = 0;
    for (i, c) in d.clusters.iter().enumerate() {
        if c.size() > dense_limit {
            skipped += 1;
            continue;
        }
        let matrix = NormalizedAdjacency::from_edges(graph, &c.vertices, &c.internal_edges, dense_limit)?;
        let spectrum = spectral::eigenvalues(&matrix)?;
        let sq = spectrum.power_sum(2);
        let cube = spectrum.power_sum(3);
        let live_weights_match =
            d.config.cluster_edges == ClusterEdges::Induced || spectral::close(cube, 6.0 * c.internal_triangle_weight);
        let ok = spectral::close(sq, c.frobenius_weight())
            && live_weights_match
            && c.internal_triangle_weight <= sq / 6.0 * (1.0 + 1e-12);
        if !ok {
            spectral_failures.push(json!({ "cluster_id": i, "sum_sq": sq, "sum_cube": cube }));
        }
    }
    checks.push(Check::new(
        "cluster_spectral_identities",
        spectral_failures.is_empty(),
        json!({ "clusters_skipped_over_limit": skipped, "failures": spectral_failures }),
    ));

    if graph.vertex_count() <= dense_limit {
        let report = spectral::verify_identities(graph, None, dense_limit)?;
        let matrix = NormalizedAdjacency::build(graph, None, dense_limit)?;
        let spectral_tau = spectral::eigenvalues(&matrix)?.tau();
        let tau_ok = match (spectral_tau, d.tau) {
            (Some(s), Some(t)) => (s - t.tau).abs() <= 1e-8,
            (None, None) => true,
            _ => false,
        };
        checks.push(Check::new(
            "graph_spectral_identities",
            report.holds() && tau_ok,
            json!({ "identities": report, "spectral_tau": spectral_tau }),
        ));
    } else {
        warn!(
            "graph has {} vertices, above the dense limit {}; skipping whole-graph spectral checks",
            graph.vertex_count(),
            dense_limit
        );
    }
    Ok(checks)
}

struct Outputs {
    files: Vec<(&'static str, Vec<u8>)>,
}

fn render_outputs(
    graph: &Graph,
    d: &Decomposition,
    metrics: &[ClusterMetrics],
    summary: &triadic::DecompositionSummary,
    formats: &[Format],
) -> Result<Outputs, Failure> {
    let mut files = Vec::new();
    if formats.contains(&Format::Json) {
        let mut buf = Vec::new();
        report::write_clusters_json(graph, d, &mut buf)?;
        files.push(("clusters.json", buf));
        let mut buf = Vec::new();
        report::write_summary_json(d, summary, &mut buf)?;
        files.push(("summary.json", buf));
    }
    if formats.contains(&Format::Csv) {
        let mut buf = Vec::new();
        report::write_clusters_csv(graph, d, &mut buf)?;
        files.push(("clusters.csv", buf));
        let mut buf = Vec::new();
        report::write_metrics_csv(metrics, &mut buf)?;
        files.push(("metrics.csv", buf));
    }
    Ok(Outputs { files })
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Writes every file or none: on the first failure, removes what this call
/// already wrote.
fn write_outputs(dir: &Path, outputs: &Outputs) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, bytes) in &outputs.files {
        let path = dir.join(name);
        if let Err(e) = write_atomically(&path, bytes) {
            for p in written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(())
}

fn run_decomposition(run: &RunArgs) -> Result<(Graph, Vec<Triangle>, Decomposition), Failure> {
    let graph = load(&run.input)?;
    let triangles = triangles_for(&graph, &run.input)?;
    let config = decompose_config(run, &graph, &triangles)?;
    if graph.edge_count() == 0 {
        return Err(Error::UndefinedTau.into());
    }
    let d = decompose_with(&graph, triangles.clone(), &config)?;
    Ok((graph, triangles, d))
}

fn cmd_decompose(args: &DecomposeArgs) -> CmdResult {
    let (graph, triangles, d) = run_decomposition(&args.run)?;
    let metrics = all_cluster_metrics(&graph, &d);
    let summary = summarize(&d, &metrics);
    let checks = run_checks(
        &graph,
        &triangles,
        &d,
        &metrics,
        args.verify_level,
        args.run.dense_limit,
    )?;
    let outputs = render_outputs(&graph, &d, &metrics, &summary, &args.formats)?;
    write_outputs(&args.out, &outputs).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot write outputs to {}: {e}", args.out.display()),
    })?;
    print!("{}", report::summary_table(&summary));
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("verification failed: {}", failed.join(", "));
        Ok(EXIT_VERIFY)
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let outcome = run_decomposition(&args.run);
    let (graph, triangles, d) = match outcome {
        Ok(x) => x,
        Err(f) if f.code == EXIT_VERIFY => {
            print_json(&json!({
                "format_version": FORMAT_VERSION,
                "passed": false,
                "checks": [{ "name": "triangle_data", "passed": false, "detail": { "corrupt_input": f.message } }],
            }))?;
            return Err(f);
        }
        Err(f) => return Err(f),
    };
    let metrics = all_cluster_metrics(&graph, &d);
    let mut checks = run_checks(
        &graph,
        &triangles,
        &d,
        &metrics,
        args.verify_level,
        args.run.dense_limit,
    )?;
    if args.verify_level == VerifyLevel::Full {
        checks.push(index_check(&graph, triangles, d.config.clean.epsilon)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    print_json(&json!({
        "format_version": FORMAT_VERSION,
        "passed": passed,
        "clusters": d.clusters.len(),
        "checks": checks,
    }))?;
    Ok(if passed { 0 } else { EXIT_VERIFY })
}

/// Cleans a fresh index to its fixpoint, then compares it with an index
/// rebuilt from scratch on the surviving edges.
fn index_check(graph: &Graph, triangles: Vec<Triangle>, epsilon: f64) -> Result<Check, Failure> {
    let mut index = TriangleIndex::build(graph, triangles.clone())?;
    let mut ledger = triadic::CleanLedger::default();
    triadic::clean::clean_exact(&mut index, &CleanConfig::exact(epsilon), &mut ledger);
    let consistency = index.check_consistency();
    let drift = index.max_drift();
    let unclean = triadic::clean::unclean_edges_exact(&index, epsilon).len();
    let live: Vec<_> = index.live_edges().collect();
    let rebuilt = TriangleIndex::build_on_subgraph(graph, triangles, &live)?;
    index.recompute_all();
    let mismatched = live
        .iter()
        .filter(|&&e| index.tri_weight(e) != rebuilt.tri_weight(e))
        .count();
    Ok(Check::new(
        "triangle_index",
        consistency.is_ok() && drift <= 1e-12 && unclean == 0 && mismatched == 0,
        json!({
            "consistency_error": consistency.err(),
            "edges_removed": ledger.edges_removed(),
            "max_drift": drift,
            "unclean_after_cleaning": unclean,
            "rebuild_mismatches": mismatched,
        }),
    ))
}
