use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rankhull::cli::{self, CliError, ExploreParams, Outcome, RunConfig, Suite};

/// Hull dimensions of rank-metric codes and the equivalences that change them.
#[derive(Parser)]
#[command(name = "rankhull", version)]
struct Args {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the two worked F_4/F_2 constructions against golden data.
    Demo,
    /// Transform a code to an equivalent one with hull dimension ELL.
    Reduce {
        code: PathBuf,
        #[arg(long)]
        ell: usize,
    },
    /// Transform a code to an equivalent LCD code.
    Lcd { code: PathBuf },
    /// Associated matrix code under a self-dual basis, with its hull transfer chain.
    Associate {
        code: PathBuf,
        /// Also reduce the vector code's hull to ELL first.
        #[arg(long)]
        ell: Option<usize>,
        /// Candidates for the self-dual basis search.
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Run seeded randomized check suites over a parameter grid.
    Verify {
        /// JSON config with any of: seed, trials, grid, checks.
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        /// JSON array of [p, e, m, n, k] tuples.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Comma-separated suites: field, linalg, codes, reduction, lcd, transfer, isometry.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Search GL_n(F_q) for an equivalent code with hull dimension h - 1 (q = 2, 3).
    Explore {
        p: u32,
        e: usize,
        m: usize,
        n: usize,
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 4)]
        trials: u64,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn dispatch(args: &Args, seed_given: bool) -> Result<Outcome, CliError> {
    match &args.command {
        Command::Demo => cli::cmd_demo(),
        Command::Reduce { code, ell } => cli::cmd_reduce(&read(code)?, *ell),
        Command::Lcd { code } => cli::cmd_lcd(&read(code)?),
        Command::Associate { code, ell, budget } => cli::cmd_associate(&read(code)?, *ell, args.seed, *budget),
        Command::Verify {
            config,
            trials,
            grid,
            checks,
        } => {
            let mut cfg = match config {
                Some(p) => RunConfig::from_json(&read(p)?)?,
                None => RunConfig::default(),
            };
            if seed_given {
                cfg.seed = args.seed;
            }
            if let Some(t) = trials {
                cfg.trials = *t;
            }
            if let Some(g) = grid {
                cfg.grid = RunConfig::grid_from_json(&read(g)?)?;
            }
            if let Some(c) = checks {
                cfg.checks = Suite::parse_list(c)?;
            }
            cli::cmd_verify(&cfg)
        }
        Command::Explore {
            p,
            e,
            m,
            n,
            k,
            budget,
            trials,
        } => cli::cmd_explore(&ExploreParams {
            p: *p,
            e: *e,
            m: *m,
            n: *n,
            k: *k,
            budget: *budget,
            trials: *trials,
            seed: args.seed,
        }),
    }
}

fn main() -> ExitCode {
    let seed_given = std::env::args().any(|a| a == "--seed" || a.starts_with("--seed="));
    let args = Args::parse();
    let outcome = match dispatch(&args, seed_given) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports are plain JSON");
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
            println!("{}", outcome.summary);
        }
        None => {
            println!("{text}");
            eprintln!("{}", outcome.summary);
        }
    }
    ExitCode::from(outcome.exit_code() as u8)
}
