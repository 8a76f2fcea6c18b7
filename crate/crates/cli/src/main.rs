//! `sparsecut`: command-line front end.
//!
//! Results go to stdout as `key<TAB>value` lines (TSV tables for `curve`,
//! `walk` and the per-step part of `certify`); diagnostics go to stderr.
//! Exit status is 0 on success, 2 on usage or parameter errors, 1 on
//! runtime failures.

mod commands;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sparsecut",
    version,
    about = "Small sparse cuts via random walks"
)]
struct Cli {
    /// Worker threads for the global sweep (0 = one per core).
    #[arg(long, global = true, env = "SPARSECUT_WORKERS", default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load an edge list and report its size.
    Load(GraphArg),
    /// Write a synthetic graph and a `<out>.meta` sidecar.
    Generate(GenerateArgs),
    /// Global small sparsest cut with volume cap k^(1+ε).
    Global(GlobalArgs),
    /// Global cut with volume cap (1+ε)k.
    GlobalTight(GlobalTightArgs),
    /// Truncated-walk local partitioning from one seed.
    Local(LocalArgs),
    /// Lovász–Simonovits curve of the walk after `--steps` steps, as TSV.
    Curve(CurveArgs),
    /// Walk distributions for every step, as TSV.
    Walk(CurveArgs),
    /// Spectral retention certificate for a vertex set.
    Certify(CertifyArgs),
    /// Exact φ_k by enumeration (small or recognized structured graphs).
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Edge-list file.
    graph: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    RingOfCliques,
    Barbell,
    Path,
    Complete,
    ErdosRenyi,
    Expander,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    family: Family,
    /// Edge-list output path; metadata goes to `<out>.meta`.
    #[arg(long)]
    out: PathBuf,
    /// Number of cliques (ring-of-cliques).
    #[arg(long)]
    r: Option<usize>,
    /// Clique size (ring-of-cliques, barbell).
    #[arg(long)]
    s: Option<usize>,
    /// Vertex count (path, complete, erdos-renyi, expander).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (erdos-renyi).
    #[arg(long)]
    p: Option<f64>,
    /// Number of Hamiltonian cycles (expander).
    #[arg(long, default_value_t = 3)]
    cycles: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    graph: PathBuf,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    epsilon: f64,
    /// Override the derived horizon T.
    #[arg(long)]
    horizon: Option<usize>,
    /// Write the member labels here, one per line, instead of inline.
    #[arg(long)]
    members_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GlobalTightArgs {
    graph: PathBuf,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    members_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LocalArgs {
    graph: PathBuf,
    /// Seed vertex label.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    phi: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    members_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    graph: PathBuf,
    /// Seed vertex label.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    steps: usize,
    /// Truncation threshold ε; 0 runs the exact walk.
    #[arg(long, default_value_t = 0.0)]
    truncation: f64,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    graph: PathBuf,
    /// File of vertex labels, one per line.
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    steps: usize,
}

#[derive(Debug, Args)]
struct OracleArgs {
    graph: PathBuf,
    #[arg(long)]
    k: u64,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<sparsecut::Error> for Failure {
    fn from(e: sparsecut::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let mut out = io::BufWriter::new(io::stdout());
    let result = pool.install(|| commands::dispatch(cli.command, &mut out));
    let result = result.and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
