//! `treesurgeon`: exact spanning-tree polynomials, deletion-constriction
//! decompositions, coplanarity certificates, stationary distributions and
//! currents, mutual-linearity coefficients, and trajectory simulation for
//! reversibly weighted directed graphs.
//!
//! Exit status: 0 on success, 1 when a checked identity fails to hold,
//! 2 on usage errors (including malformed graph files).

mod config;
mod report;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use treesurgeon_core::graph::GraphError;
use treesurgeon_core::poly::Backend;

use config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad invocation or unreadable/malformed input: exit 2.
    Usage,
    /// An identity that must hold was violated: exit 1.
    Verification,
    /// Reporting machinery failed (schema or I/O): exit 1.
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Verification,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Internal,
            message: message.into(),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Backend selector exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    /// Enumeration for small graphs, determinant otherwise.
    Auto,
    /// Explicit tree enumeration.
    Enum,
    /// Fraction-free determinant evaluation.
    Det,
    /// Run both backends and require exact agreement.
    Both,
}

impl BackendArg {
    pub fn single(self) -> Option<Backend> {
        match self {
            BackendArg::Auto => Some(Backend::Auto),
            BackendArg::Enum => Some(Backend::Enumeration),
            BackendArg::Det => Some(Backend::Determinant),
            BackendArg::Both => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendArg::Auto => "auto",
            BackendArg::Enum => "enumeration",
            BackendArg::Det => "determinant",
            BackendArg::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(
    name = "treesurgeon",
    version,
    about = "Spanning-tree calculus for weighted directed graphs",
    propagate_version = true
)]
struct Cli {
    /// Optional TOML config file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Random seed (fallback: config file, then TREESURGEON_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker-pool size for batch commands (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Graph file: whitespace edge list (`u v forward backward`) or JSON.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
}

#[derive(Debug, Args)]
struct ConstraintArgs {
    /// Oriented edge `u>v` no tree may use (repeatable).
    #[arg(long, value_name = "EDGE")]
    avoid: Vec<String>,

    /// Oriented edge `u>v` every tree must use (repeatable).
    #[arg(long, value_name = "EDGE")]
    require: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List (or count) the rooted spanning trees honoring constraints.
    #[command(name = "enum")]
    Enumerate {
        #[command(flatten)]
        graph: GraphArg,
        /// Root vertex label.
        #[arg(long)]
        root: String,
        #[command(flatten)]
        constraints: ConstraintArgs,
        /// Print only the number of qualifying trees.
        #[arg(long)]
        count_only: bool,
    },

    /// Evaluate a constrained rooted spanning-tree polynomial.
    Poly {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        root: String,
        #[command(flatten)]
        constraints: ConstraintArgs,
        /// Evaluation backend (default from config file, else auto).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Split a root's polynomial over the status patterns of pinned pairs.
    Decompose {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        root: String,
        /// Pinned reversible pair, `u:v` or 0-based index (repeatable).
        #[arg(long, value_name = "PAIR", required = true)]
        pin: Vec<String>,
        /// Evaluation backend (default from config file, else auto).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Rank certificate for the pinned tree-vector family.
    Coplanarity {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_name = "PAIR", required = true)]
        pin: Vec<String>,
        /// Force the arithmetic (an exact graph may be demoted to float).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Evaluation backend (default from config file, else auto).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// For one pin: write the 3-D points and plane normal as CSV.
        #[arg(long, value_name = "FILE")]
        plane_csv: Option<PathBuf>,
    },

    /// Batch rank survey on random graphs (one JSON line per trial).
    Conjecture {
        /// Number of pinned pairs per trial.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Vertices per random graph.
        #[arg(long, default_value_t = 13)]
        vertices: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Extra-edge density of the random graphs.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Stationary distribution via tree weights, cross-checked exactly.
    Stationary {
        #[command(flatten)]
        graph: GraphArg,
        /// Evaluation backend (default from config file, else auto).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Stationary edge currents and the per-vertex balance check.
    Currents {
        #[command(flatten)]
        graph: GraphArg,
        /// Evaluation backend (default from config file, else auto).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Mutual-linearity coefficients of every current in the input currents.
    Linearity {
        #[command(flatten)]
        graph: GraphArg,
        /// Input pair (`u:v` or index); repeat once for the two-input law.
        #[arg(long, value_name = "PAIR", required = true)]
        input: Vec<String>,
        /// Verification solves at freshly sampled input rates.
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Evaluation backend (default from config file, else auto).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Jump-process simulation with batch-means error bars.
    Simulate {
        #[command(flatten)]
        graph: GraphArg,
        /// Trajectory length in model time.
        #[arg(long)]
        horizon: f64,
        /// Discarded initial stretch (default: 5% of the horizon).
        #[arg(long)]
        burn_in: Option<f64>,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Run the bundled identity suite; exits 1 on any violation.
    Selftest {
        /// Corrupt one rate after certification to prove the suite bites.
        #[arg(long)]
        inject_fault: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.seed, cli.jobs, cli.config.as_deref())?;
    match cli.command {
        Command::Enumerate {
            graph,
            root,
            constraints,
            count_only,
        } => commands::trees::run_enum(&graph.graph, &root, &constraints, count_only),
        Command::Poly {
            graph,
            root,
            constraints,
            backend,
            out,
        } => commands::trees::run_poly(&cfg, &graph.graph, &root, &constraints, cfg.backend(backend), out),
        Command::Decompose {
            graph,
            root,
            pin,
            backend,
            out,
        } => commands::trees::run_decompose(&cfg, &graph.graph, &root, &pin, cfg.backend(backend), out),
        Command::Coplanarity {
            graph,
            pin,
            mode,
            backend,
            out,
            plane_csv,
        } => commands::planes::run_coplanarity(
            &cfg,
            &graph.graph,
            &pin,
            mode,
            cfg.backend(backend),
            out,
            plane_csv,
        ),
        Command::Conjecture {
            n,
            vertices,
            trials,
            density,
            out,
        } => commands::planes::run_conjecture(&cfg, n, vertices, trials, density, out),
        Command::Stationary {
            graph,
            backend,
            out,
        } => commands::flows::run_stationary(&cfg, &graph.graph, cfg.backend(backend), out),
        Command::Currents {
            graph,
            backend,
            out,
        } => commands::flows::run_currents(&cfg, &graph.graph, cfg.backend(backend), out),
        Command::Linearity {
            graph,
            input,
            samples,
            backend,
            out,
        } => commands::flows::run_linearity(&cfg, &graph.graph, &input, samples, cfg.backend(backend), out),
        Command::Simulate {
            graph,
            horizon,
            burn_in,
            replicas,
            out,
        } => commands::simulate::run(&cfg, &graph.graph, horizon, burn_in, replicas, out),
        Command::Selftest { inject_fault, out } => {
            commands::selftest::run(&cfg, inject_fault, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e.kind {
                ErrorKind::Usage => "usage",
                ErrorKind::Verification => "verification",
                ErrorKind::Internal => "internal",
            };
            eprintln!("{}", json!({ "kind": kind, "error": e.message }));
            match e.kind {
                ErrorKind::Usage => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
