use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chiral_blocks::Error;

mod commands;
mod config;

use config::{CommonArgs, RunConfig};

/// Exact spectra, chirality splits and conformal-block dimensions for the
/// disks D^{4k+2}.
///
/// Exit status: 0 when every check passes, 1 on usage or precondition
/// errors, 2 when a mathematical check fails.
#[derive(Parser, Debug)]
#[command(name = "chiral-blocks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and eigenspace dimensions of the coexact 2k-forms on S^{4k+1}.
    Spectrum(CommonArgs),
    /// Chiral/antichiral halves of each eigenlevel.
    Split(CommonArgs),
    /// Dimension of the block space for (k, λ) at truncation (N, D).
    Blocks(CommonArgs),
    /// Seeded verification suites.
    Verify {
        /// stokes, energy, projective, cocycle, ortho or all.
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Invariant(_) | Error::Singular(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let (args, suite) = match &cli.command {
        Command::Spectrum(a) | Command::Split(a) | Command::Blocks(a) => (a, None),
        Command::Verify { suite, common } => (common, suite.as_deref()),
    };
    let cfg = RunConfig::resolve(args, suite)?;
    if cfg.k > 1 {
        eprintln!("note: k = {} is experimental; only k ∈ {{0, 1}} is covered by the test suites", cfg.k);
    }
    if let Some(threads) = cfg.threads {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let outcome = match cli.command {
        Command::Spectrum(_) => commands::spectrum(&cfg)?,
        Command::Split(_) => commands::split(&cfg)?,
        Command::Blocks(_) => commands::blocks(&cfg)?,
        Command::Verify { .. } => commands::verify(&cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.body)
            .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.body.as_bytes());
        }
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a check failed; see the report");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
