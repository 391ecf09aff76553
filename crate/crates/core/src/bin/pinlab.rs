use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pinlab::cli::{load_config, report_digest, run, CliError};
use pinlab::config::Mode;

#[derive(Parser)]
#[command(name = "pinlab", version, about = "Disordered renewal pinning experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "PINLAB_THREADS")]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Homogeneous free energy grid.
    Homog(RunArgs),
    /// Monte Carlo quenched free energy.
    Quenched(RunArgs),
    /// Fractional-moment delocalization certificates.
    Certify(RunArgs),
    /// Variance of the free partition function at the annealed critical point.
    Variance(RunArgs),
    /// Free energy above a critical bracket against the quadratic bound.
    Smoothing(RunArgs),
    /// Exact contact-set samples.
    Sample(RunArgs),
    /// Finite-volume bracket on the critical point.
    Scan(RunArgs),
    /// Summarize JSON artifacts.
    Digest {
        #[arg(required = true)]
        artifacts: Vec<PathBuf>,
    },
}

fn execute(mode: Mode, args: &RunArgs) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    if config.mode != mode {
        return Err(CliError::Config(pinlab::config::ConfigError::Range {
            field: "mode".into(),
            reason: format!("config is for `{}`, not `{}`", config.mode.name(), mode.name()),
        }));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let outcome = run(&config, &out)?;
    for p in &outcome.artifacts {
        println!("{}", p.display());
    }
    match outcome.contradiction {
        Some(c) => Err(CliError::Contradiction(c)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("pinlab: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &args.command {
        Command::Homog(a) => execute(Mode::Homog, a),
        Command::Quenched(a) => execute(Mode::Quenched, a),
        Command::Certify(a) => execute(Mode::Certify, a),
        Command::Variance(a) => execute(Mode::Variance, a),
        Command::Smoothing(a) => execute(Mode::Smoothing, a),
        Command::Sample(a) => execute(Mode::Sample, a),
        Command::Scan(a) => execute(Mode::Scan, a),
        Command::Digest { artifacts } => report_digest(artifacts).and_then(|d| {
            print!("{}", d.text);
            match d.contradictions.first() {
                Some(c) => Err(CliError::Contradiction(c.clone())),
                None => Ok(()),
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pinlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
