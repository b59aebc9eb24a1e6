//! `gnrfm` — factor, cluster, and benchmark with the group-norm regularized
//! factorization model.
//!
//! Subcommands: `gen` (synthetic data), `solve` (X ≈ UV + E), `cluster`
//! (affinity + normalized cuts), `eval` (Acc/NMI), `bench` (seeded sweeps).
//! Exit codes: 0 success, 2 usage/validation, 3 numerical failure.

use clap::{Parser, Subcommand};
use gnrfm::solver::InnerMode;
use gnrfm::{SolverConfig, SyntheticSpec};
use gnrfm_cli::commands::{cmd_cluster, cmd_eval, cmd_gen, cmd_solve, AffinityMode};
use gnrfm_cli::{bench, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gnrfm",
    version,
    about = "Group-norm regularized factorization: solve, cluster, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic union-of-subspaces instance (X.csv, labels.csv,
    /// E0.csv, meta.json).
    Gen(GenArgs),
    /// Factor a CSV data matrix as X ≈ UV + E (writes U.csv, V.csv, E.csv,
    /// report.json).
    Solve(SolveArgs),
    /// Build an affinity from saved factors and cut it into k groups.
    Cluster(ClusterArgs),
    /// Score predicted labels against ground truth (prints JSON).
    Eval(EvalArgs),
    /// Run a benchmark sweep from a JSON experiment list.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct GenArgs {
    /// Number of subspaces.
    #[arg(long)]
    s: usize,
    /// Points per subspace.
    #[arg(long)]
    p: usize,
    /// Ambient dimension.
    #[arg(long)]
    d_tilde: usize,
    /// Dimension of each subspace.
    #[arg(long)]
    r_tilde: usize,
    /// Noise level relative to each column's norm.
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Fraction of columns that receive noise.
    #[arg(long, default_value_t = 0.2)]
    contamination: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use a fresh random rotation for every subspace instead of one shared
    /// rotation applied along a chain.
    #[arg(long)]
    fresh_rotation: bool,
    /// Output directory (created if missing).
    #[arg(long, short)]
    out: PathBuf,
    /// Prefix the CSVs with a `# rows cols` shape comment.
    #[arg(long)]
    shape_comments: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum InnerModeArg {
    /// One inner pass per outer iteration (the accelerated solver).
    #[value(alias = "one_step")]
    OneStep,
    /// A fixed number of inner passes (see --inner-steps).
    Fixed,
    /// Inner passes until the iterate stalls (see --inner-tol).
    Converge,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Input data matrix CSV (rows = features, columns = samples).
    #[arg(long)]
    data: PathBuf,
    /// Group-norm weight on U. Flag defaults mirror the library defaults.
    #[arg(long, default_value_t = 1.0)]
    mu_u: f64,
    /// Frobenius weight on V.
    #[arg(long, default_value_t = 10.0)]
    mu_v: f64,
    /// Initial factor width K (default: min(rows, cols)).
    #[arg(long)]
    init_rank: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    beta0: f64,
    #[arg(long, default_value_t = 1e5)]
    beta_max: f64,
    #[arg(long, default_value_t = 2.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.9)]
    zeta: f64,
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    /// Stopping tolerance on the relative constraint residual.
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[arg(long, default_value_t = 200)]
    max_outer: usize,
    #[arg(long, value_enum, default_value_t = InnerModeArg::OneStep)]
    inner_mode: InnerModeArg,
    /// Pass count when --inner-mode=fixed.
    #[arg(long, default_value_t = 5)]
    inner_steps: usize,
    /// Stall tolerance when --inner-mode=converge.
    #[arg(long, default_value_t = 1e-6)]
    inner_tol: f64,
    /// Safety cap on converge-mode inner passes.
    #[arg(long, default_value_t = 100)]
    max_inner: usize,
    /// Keep exactly-zero columns instead of deleting them.
    #[arg(long)]
    no_prune: bool,
    /// Take the U gradient step entirely at the fresh V (off: linearize
    /// around the previous iterate).
    #[arg(long)]
    gradient_at_new_v: bool,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write trace.csv (iter, time_s, log10_residual, rank).
    #[arg(long)]
    trace: bool,
    /// Prefix the CSVs with a `# rows cols` shape comment.
    #[arg(long)]
    shape_comments: bool,
}

impl SolveArgs {
    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            mu_u: self.mu_u,
            mu_v: self.mu_v,
            init_rank: self.init_rank,
            beta0: self.beta0,
            beta_max: self.beta_max,
            rho: self.rho,
            zeta: self.zeta,
            nu: self.nu,
            eps: self.eps,
            max_outer: self.max_outer,
            inner_mode: match self.inner_mode {
                InnerModeArg::OneStep => InnerMode::OneStep,
                InnerModeArg::Fixed => InnerMode::Fixed(self.inner_steps),
                InnerModeArg::Converge => InnerMode::Converge(self.inner_tol),
            },
            max_inner: self.max_inner,
            prune: !self.no_prune,
            gradient_at_new_v: self.gradient_at_new_v,
        }
    }
}

#[derive(clap::Args)]
struct ClusterArgs {
    /// Original data matrix X.csv.
    #[arg(long)]
    data: PathBuf,
    /// Directory holding U.csv and V.csv from `gnrfm solve`.
    #[arg(long)]
    factors: PathBuf,
    /// Number of clusters.
    #[arg(long, short)]
    k: usize,
    #[arg(long, value_enum, default_value_t = AffinityMode::Squared)]
    affinity: AffinityMode,
    /// Relative singular-value cutoff for the squared affinity.
    #[arg(long, default_value_t = 1e-8)]
    rank_tol: f64,
    /// Seed for the spectral-embedding k-means.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write affinity.pgm, an 8-bit grayscale heatmap.
    #[arg(long)]
    heatmap: bool,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Predicted labels CSV.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth labels CSV.
    #[arg(long)]
    truth: PathBuf,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// JSON experiment list (array of experiment objects, or one object).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for bench.csv, bench.md, and traces.
    #[arg(long, short)]
    out: PathBuf,
    /// Write a per-iteration trace CSV for trial 0 of every row.
    #[arg(long)]
    traces: bool,
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Gen(a) => {
            let spec = SyntheticSpec {
                s: a.s,
                p: a.p,
                d_tilde: a.d_tilde,
                r_tilde: a.r_tilde,
                sigma: a.sigma,
                contamination: a.contamination,
                seed: a.seed,
                fresh_rotation: a.fresh_rotation,
            };
            cmd_gen(&spec, &a.out, a.shape_comments)
        }
        Command::Solve(a) => cmd_solve(
            &a.data,
            &a.solver_config(),
            &a.out,
            a.trace,
            a.shape_comments,
        ),
        Command::Cluster(a) => cmd_cluster(
            &a.data, &a.factors, a.k, a.affinity, a.rank_tol, a.seed, &a.out, a.heatmap,
        ),
        Command::Eval(a) => cmd_eval(&a.pred, &a.truth),
        Command::Bench(a) => bench::cmd_bench(&a.config, &a.out, a.traces),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_flag_defaults_match_the_library_defaults() {
        let cli = Cli::parse_from(["gnrfm", "solve", "--data", "x.csv", "--out", "o"]);
        match cli.command {
            Command::Solve(a) => assert_eq!(a.solver_config(), SolverConfig::default()),
            _ => panic!("expected solve"),
        }
    }

    #[test]
    fn inner_mode_flags_map_to_library_modes() {
        let cli = Cli::parse_from([
            "gnrfm",
            "solve",
            "--data",
            "x",
            "--out",
            "o",
            "--inner-mode",
            "fixed",
            "--inner-steps",
            "7",
            "--no-prune",
        ]);
        match cli.command {
            Command::Solve(a) => {
                let cfg = a.solver_config();
                assert_eq!(cfg.inner_mode, InnerMode::Fixed(7));
                assert!(!cfg.prune);
            }
            _ => panic!("expected solve"),
        }

        let cli = Cli::parse_from([
            "gnrfm",
            "solve",
            "--data",
            "x",
            "--out",
            "o",
            "--inner-mode",
            "converge",
            "--inner-tol",
            "1e-4",
        ]);
        match cli.command {
            Command::Solve(a) => {
                assert_eq!(a.solver_config().inner_mode, InnerMode::Converge(1e-4));
            }
            _ => panic!("expected solve"),
        }

        // both spellings of the default mode parse
        for spelling in ["one-step", "one_step"] {
            let cli = Cli::parse_from([
                "gnrfm",
                "solve",
                "--data",
                "x",
                "--out",
                "o",
                "--inner-mode",
                spelling,
            ]);
            match cli.command {
                Command::Solve(a) => {
                    assert_eq!(a.solver_config().inner_mode, InnerMode::OneStep)
                }
                _ => panic!("expected solve"),
            }
        }
    }
}
