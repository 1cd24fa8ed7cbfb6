//! Command-line front end.
//!
//! Exit codes: 0 when every check passed, 1 when at least one report has
//! `passed = false`, 2 for usage errors, 3 for invalid input or I/O errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::generators::{grid, kary_tree, log_path, random_connected, GridWeights, WeightLaw};
use crate::graph::{EdgeSet, WeightedGraph};
use crate::io::{graph_to_string, load_graph, write_csv, write_reports, VerificationReport};
use crate::poincare::{estimate_sharp_constant, theoretical_constant, AscentConfig, GradientMode};
use crate::suite::{
    decomp_suite, hardy_suite, local_suite, poincare_suite, Case, RatioSample, DEFAULT_HARDY_Q,
    DEFAULT_LOCAL_P, DEFAULT_POINCARE_P, RATIO_CSV_HEADER,
};
use crate::tree::{
    build_spanning_tree, optimize_tree, shadow_summary, RootedTree, SearchMode, Strategy,
    TreeSearch,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "graph-poincare",
    version,
    about = "John constants, Hardy bounds and Poincaré inequalities on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph and write it as JSON.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Output file (stdout if omitted).
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Build or optimize a rooted spanning tree and store it with the graph.
    Tree {
        graph: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        /// Search for a tree with small John constant instead of a plain traversal.
        #[arg(long, value_enum)]
        optimize: Option<OptimizeMode>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, env = "GRAPH_POINCARE_SEED", default_value_t = 0)]
        seed: u64,
        /// Output file (the input file is overwritten if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the John constant, tree degree bound and total measure.
    John {
        graph: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        /// Growth warnings are issued only above this John constant.
        #[arg(long, default_value_t = 10.0)]
        threshold: f64,
    },
    /// Run a randomized verification suite and emit JSON-lines reports.
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
        graph: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Exponents for the poincare and local suites.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        p: Vec<f64>,
        /// Exponents for the hardy and decomp suites.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        q: Vec<f64>,
        /// Write per-trial Poincaré ratios here (poincare suite only).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Estimate the best Poincaré constant by projected subgradient ascent.
    Sharp {
        graph: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, env = "GRAPH_POINCARE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum GenFamily {
    /// Complete k-ary tree with μ = α^depth.
    Kary {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        alpha: f64,
    },
    /// Path labelled 2..=last with μ(n) = 1/(n log^γ n).
    LogPath {
        #[arg(long)]
        last: usize,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
    },
    /// Random connected graph.
    Random {
        #[arg(long)]
        n: usize,
        /// Probability of each extra edge beyond a random spanning tree.
        #[arg(long, default_value_t = 0.1)]
        edge_probability: f64,
        #[arg(long, default_value_t = 0.1)]
        low: f64,
        #[arg(long, default_value_t = 1.0)]
        high: f64,
        /// Use μ = exp(−rate·depth) instead of uniform weights.
        #[arg(long)]
        depth_rate: Option<f64>,
        #[arg(long, env = "GRAPH_POINCARE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// nx × ny grid with constant weight.
    Grid {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
    },
}

#[derive(Debug, Args)]
struct TreeArgs {
    /// Root used when the file has no tree or --rebuild is given.
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Bfs)]
    strategy: StrategyArg,
    /// Ignore a tree stored in the file.
    #[arg(long)]
    rebuild: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, env = "GRAPH_POINCARE_SEED", default_value_t = 0)]
    seed: u64,
    /// Record wall-clock time in runtime_ms (otherwise 0).
    #[arg(long)]
    timing: bool,
    /// Report file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Bfs,
    Dfs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OptimizeMode {
    Greedy,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteName {
    Hardy,
    Decomp,
    Poincare,
    Local,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Tree,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Bfs => Strategy::BreadthFirst,
            StrategyArg::Dfs => Strategy::DepthFirst,
        }
    }
}

/// Parses `argv` (including the program name) and runs the command against
/// the process's stdout and stderr.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_streams(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run_command`], writing to the given streams.
pub fn run_with_streams<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen { family, out: path } => {
            let (g, tree) = generate(family)?;
            emit(path.as_deref(), out, &graph_to_string(&g, tree.as_ref()))?;
            Ok(EXIT_OK)
        }
        Command::Tree {
            graph,
            tree,
            optimize,
            budget,
            seed,
            out: path,
        } => {
            let (g, _) = load_graph(&graph)?;
            let t = match optimize {
                None => build_spanning_tree(&g, tree.root, tree.strategy.into())?,
                Some(mode) => {
                    let search = TreeSearch {
                        mode: match mode {
                            OptimizeMode::Greedy => SearchMode::GreedyLocal,
                            OptimizeMode::Exhaustive => SearchMode::Exhaustive,
                        },
                        budget,
                        seed,
                        ..TreeSearch::default()
                    };
                    optimize_tree(&g, &search)?.0
                }
            };
            let summary = shadow_summary(&g, &t)?;
            let text = graph_to_string(&g, Some(&t));
            std::fs::write(path.as_deref().unwrap_or(&graph), text)?;
            writeln!(out, "root = {}", t.root())?;
            writeln!(out, "c = {}", summary.john_constant)?;
            writeln!(out, "M = {}", summary.tree_degree_bound)?;
            Ok(EXIT_OK)
        }
        Command::John {
            graph,
            tree,
            threshold,
        } => {
            let (g, t) = load_with_tree(&graph, &tree)?;
            john(&g, &t, threshold, out, err)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            graph,
            tree,
            run,
            p,
            q,
            csv,
        } => {
            let (g, t) = load_with_tree(&graph, &tree)?;
            if csv.is_some() && !matches!(suite, SuiteName::Poincare) {
                return Err(Error::InvalidParameter(
                    "--csv applies to the poincare suite only".into(),
                ));
            }
            let cases = [Case::new(g, t)?];
            let start = Instant::now();
            let mut samples: Vec<RatioSample> = Vec::new();
            let mut reports = match suite {
                SuiteName::Hardy => hardy_suite(
                    &cases,
                    run.trials,
                    run.seed,
                    or_default(&q, &DEFAULT_HARDY_Q),
                )?,
                SuiteName::Decomp => decomp_suite(
                    &cases,
                    run.trials,
                    run.seed,
                    or_default(&q, &DEFAULT_HARDY_Q),
                )?,
                SuiteName::Poincare => {
                    let (reports, s) = poincare_suite(
                        &cases,
                        run.trials,
                        run.seed,
                        or_default(&p, &DEFAULT_POINCARE_P),
                    )?;
                    samples = s;
                    reports
                }
                SuiteName::Local => local_suite(
                    &cases,
                    run.trials,
                    run.seed,
                    or_default(&p, &DEFAULT_LOCAL_P),
                )?,
            };
            if run.timing {
                let ms = start.elapsed().as_millis() as u64;
                reports.iter_mut().for_each(|r| r.runtime_ms = ms);
            }
            if let Some(path) = csv {
                let rows: Vec<Vec<String>> = samples.iter().map(RatioSample::csv_row).collect();
                let mut file = BufWriter::new(File::create(path)?);
                write_csv(&mut file, &RATIO_CSV_HEADER, &rows)?;
                file.flush()?;
            }
            emit_reports(run.out.as_deref(), out, &reports)
        }
        Command::Sharp {
            graph,
            tree,
            p,
            restarts,
            iters,
            seed,
            mode,
            timing,
            out: path,
        } => {
            let (g, t) = load_with_tree(&graph, &tree)?;
            let summary = shadow_summary(&g, &t)?;
            let edges = match mode {
                ModeArg::Full => EdgeSet::Full,
                ModeArg::Tree => EdgeSet::Tree(&t),
            };
            let start = Instant::now();
            let estimate = estimate_sharp_constant(
                &g,
                edges,
                p,
                &AscentConfig {
                    restarts,
                    iters,
                    seed,
                },
            )?;
            let theoretical =
                theoretical_constant(summary.john_constant, summary.tree_degree_bound, p)?;
            let mode_name = match mode {
                ModeArg::Full => GradientMode::Full.name(),
                ModeArg::Tree => GradientMode::TreeRestricted.name(),
            };
            let report = VerificationReport {
                check_name: "sharp-constant".into(),
                parameters: [
                    ("p".to_string(), p.into()),
                    ("mode".to_string(), mode_name.into()),
                    ("restarts".to_string(), (restarts as u64).into()),
                    ("iters".to_string(), (iters as u64).into()),
                ]
                .into_iter()
                .collect(),
                measured: estimate.ratio,
                theoretical,
                passed: estimate.ratio <= theoretical,
                seed,
                runtime_ms: if timing {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                },
            };
            emit_reports(path.as_deref(), out, &[report])
        }
    }
}

fn or_default<'a>(given: &'a [f64], default: &'a [f64]) -> &'a [f64] {
    if given.is_empty() {
        default
    } else {
        given
    }
}

fn generate(family: GenFamily) -> Result<(WeightedGraph, Option<RootedTree>)> {
    Ok(match family {
        GenFamily::Kary { k, depth, alpha } => {
            let (g, t) = kary_tree(k, depth, alpha)?;
            (g, Some(t))
        }
        GenFamily::LogPath { last, gamma } => {
            let (g, t) = log_path(last, gamma)?;
            (g, Some(t))
        }
        GenFamily::Random {
            n,
            edge_probability,
            low,
            high,
            depth_rate,
            seed,
        } => {
            let law = match depth_rate {
                Some(rate) => WeightLaw::ExponentialOfDepth { rate },
                None => WeightLaw::Uniform { low, high },
            };
            (random_connected(n, edge_probability, law, seed)?, None)
        }
        GenFamily::Grid { nx, ny, mu } => (grid(nx, ny, GridWeights::Constant(mu))?, None),
    })
}

fn load_with_tree(path: &Path, args: &TreeArgs) -> Result<(WeightedGraph, RootedTree)> {
    let (g, stored) = load_graph(path)?;
    let tree = match stored {
        Some(t) if !args.rebuild => t,
        _ => build_spanning_tree(&g, args.root, args.strategy.into())?,
    };
    Ok((g, tree))
}

fn emit(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_reports(
    path: Option<&Path>,
    out: &mut dyn Write,
    reports: &[VerificationReport],
) -> Result<i32> {
    match path {
        Some(p) => {
            let mut file = BufWriter::new(File::create(p)?);
            write_reports(&mut file, reports)?;
            file.flush()?;
        }
        None => write_reports(out, reports)?,
    }
    Ok(if reports.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// John constant of the tree truncated at `depth`, with shadows and μ
/// restricted to vertices of depth at most `depth`.
pub fn truncated_john_constant(g: &WeightedGraph, tree: &RootedTree, depth: usize) -> f64 {
    let mut level = vec![0usize; tree.len()];
    for &t in tree.topo_order() {
        if let Some(p) = tree.parent(t) {
            level[t] = level[p] + 1;
        }
    }
    let mut mass: Vec<f64> = (0..g.len())
        .map(|t| if level[t] <= depth { g.weight(t) } else { 0.0 })
        .collect();
    let mut c: f64 = 1.0;
    for &t in tree.topo_order().iter().rev() {
        if level[t] > depth {
            continue;
        }
        c = c.max(mass[t] / g.weight(t));
        if let Some(p) = tree.parent(t) {
            mass[p] += mass[t];
        }
    }
    c
}

fn john(
    g: &WeightedGraph,
    tree: &RootedTree,
    threshold: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let s = shadow_summary(g, tree)?;
    let worst = match g.labels() {
        Some(l) => l[s.worst_vertex].clone(),
        None => s.worst_vertex.to_string(),
    };
    writeln!(out, "c = {}", s.john_constant)?;
    writeln!(out, "M = {}", s.tree_degree_bound)?;
    writeln!(out, "mu(V) = {}", g.total_measure())?;
    writeln!(out, "root = {}", tree.root())?;
    writeln!(out, "worst vertex = {worst}")?;

    let depth = tree
        .topo_order()
        .iter()
        .fold(vec![0usize; tree.len()], |mut level, &t| {
            if let Some(p) = tree.parent(t) {
                level[t] = level[p] + 1;
            }
            level
        })
        .into_iter()
        .max()
        .unwrap_or(0);
    if depth >= 4 {
        let trend: Vec<(usize, f64)> = [depth / 4, depth / 2, depth]
            .into_iter()
            .map(|d| (d, truncated_john_constant(g, tree, d)))
            .collect();
        let growing = trend.windows(2).all(|w| w[1].1 > w[0].1);
        if growing && s.john_constant > threshold {
            let shown: Vec<String> = trend
                .iter()
                .map(|(d, c)| format!("c(depth {d}) = {c}"))
                .collect();
            writeln!(
                err,
                "warning: not uniformly John: c keeps growing with tree depth ({})",
                shown.join(", ")
            )?;
        }
    }
    Ok(())
}
