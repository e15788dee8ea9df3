use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::Outcome;

/// Exact and numeric verification of multiple zeta star value identities.
#[derive(Debug, Parser)]
#[command(name = "mzsv", version)]
struct Cli {
    /// Emit structured JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for independent cells (0 = all cores).
    #[arg(long, global = true, env = "MZSV_JOBS", default_value_t = 1)]
    jobs: usize,

    /// Also write the output to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpandMode {
    Oplus,
    Kappa,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalTarget {
    /// Exact H_n(s).
    Mhs,
    /// Exact H*_n(s) with --n/--s, or numeric zeta*(spec) with --spec.
    Star,
    /// Numeric zeta(s).
    Zeta,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the binomial-sum identity for H*_n exactly for a range of n.
    VerifyMhs {
        /// One or more star specs, e.g. "2^1,3,2^1" or "3,(2)".
        #[arg(required = true)]
        specs: Vec<String>,
        /// Range "a..b" (inclusive) or a single n.
        #[arg(long, default_value = "1..6")]
        n: String,
    },
    /// Expand zeta*(spec) into alternating Euler sums.
    Expand {
        spec: String,
        #[arg(long, value_enum, default_value_t = ExpandMode::Oplus)]
        mode: ExpandMode,
    },
    /// Compare zeta*(spec) with its comma/O-plus expansion numerically.
    VerifyNumeric {
        #[arg(required = true)]
        specs: Vec<String>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Check the auxiliary binomial-sum lemma (21) or the decay lemma (42).
    CheckLemma {
        /// 21 or 42.
        which: u32,
        /// Lemma 21: single n or range "a..b". Lemma 42: comma list.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        c: Option<u64>,
        /// Lemma 21 composition v (positive entries).
        #[arg(long, default_value = "")]
        v: String,
        /// Lemma 42 composition s.
        #[arg(long, default_value = "")]
        s: String,
        /// Lemma 42 exponent.
        #[arg(long)]
        e: Option<f64>,
    },
    /// Evaluate a single sum.
    Eval {
        #[arg(value_enum)]
        target: EvalTarget,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn run(cli: Cli) -> Result<Outcome> {
    let json = cli.json;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .context("building worker pool")?;
    pool.install(|| match cli.command {
        Command::VerifyMhs { specs, n } => commands::verify_mhs(&specs, &n, json),
        Command::Expand { spec, mode } => commands::expand(&spec, mode, json),
        Command::VerifyNumeric { specs, tol } => commands::verify_numeric(&specs, tol, json),
        Command::CheckLemma {
            which,
            n,
            a,
            c,
            v,
            s,
            e,
        } => match which {
            21 => commands::lemma21(n.as_deref(), a, c, &v, json),
            42 => commands::lemma42(n.as_deref(), &s, e, json),
            other => anyhow::bail!("unknown lemma {other}; expected 21 or 42"),
        },
        Command::Eval {
            target,
            n,
            s,
            spec,
            tol,
        } => commands::eval(target, n, s.as_deref(), spec.as_deref(), tol, json),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.out.clone();
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.text.as_bytes());
            if let Some(path) = out_path {
                if let Err(err) = fs::write(&path, &outcome.text) {
                    eprintln!("error: writing {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            }
            for line in &outcome.alerts {
                eprintln!("{line}");
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
