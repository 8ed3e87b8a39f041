use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

#[derive(Parser)]
#[command(name = "cfguard", version, about = "Conflict-free coloring and terrain guarding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tree-decomposition solver on a graph file
    Solve(SolveArgs),
    /// Run the brute-force oracle on a graph file
    Oracle(SolveArgs),
    /// Terrain visibility, peeling and guarding
    Terrain(TerrainArgs),
    /// Generate a random instance
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Check a coloring or a guarding
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Cfc,
    Scfc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Cf,
    Strong,
}

#[derive(Args)]
struct Output {
    /// Report format on stdout
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the main artifact (witness, instance, guards) here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["k", "min"]))]
struct SolveArgs {
    #[arg(value_enum)]
    problem: ProblemArg,
    graph: PathBuf,
    /// Decide a fixed number of colors
    #[arg(long)]
    k: Option<usize>,
    /// Search for the minimum number of colors
    #[arg(long)]
    min: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TerrainOp {
    VisGraph,
    Peel,
    StrongGuard,
    CfGuard,
    Pipeline,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["terrain", "reference"]))]
struct TerrainArgs {
    #[arg(value_enum)]
    op: TerrainOp,
    terrain: Option<PathBuf>,
    /// Use the bundled reference terrain
    #[arg(long)]
    reference: bool,
    /// Problem solved by `pipeline`
    #[arg(long, value_enum, default_value = "scfc")]
    problem: ProblemArg,
    /// Write an SVG drawing
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the visibility graph as Graphviz source
    #[arg(long)]
    dot: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum GenKind {
    /// G(n, p) random graph in the `p n m` / `e u v` format
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Terrain with x = 0..n and uniform random heights
    Terrain {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        y_min: i64,
        #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
        y_max: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Check a per-vertex color file against a graph file
    Coloring {
        graph: PathBuf,
        colors: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        output: Output,
    },
    /// Check a guard file against a terrain file
    Guarding {
        terrain: PathBuf,
        guards: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
