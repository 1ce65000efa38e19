#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gbsum::study_harness::{run, StudyConfig, StudyKind};

#[derive(Parser)]
#[command(name = "gbl", version, about = "Gaussian beam superposition studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum error against a reference field over a frequency sweep
    ConvergeOmega(StudyArgs),
    /// Discretization error over a beam spacing sweep
    Discretize(StudyArgs),
    /// Measured and predicted relative error over Q0
    Q0Sweep(StudyArgs),
    /// Field values along the receiver line
    Field(StudyArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// JSON study configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Cutoff radius override
    #[arg(long)]
    alpha: Option<f64>,
    /// Ray integration step override
    #[arg(long)]
    dt: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<Vec<PathBuf>, Box<dyn std::error::Error>> {
    let (kind, args) = match cli.command {
        Command::ConvergeOmega(a) => (StudyKind::ConvergeOmega, a),
        Command::Discretize(a) => (StudyKind::Discretize, a),
        Command::Q0Sweep(a) => (StudyKind::Q0Sweep, a),
        Command::Field(a) => (StudyKind::FieldDump, a),
    };
    execute(kind, &args)
}

fn execute(kind: StudyKind, args: &StudyArgs) -> Result<Vec<PathBuf>, Box<dyn std::error::Error>> {
    let mut cfg = StudyConfig::load(&args.config)?;
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    Ok(pool.install(|| run(kind, &cfg, &args.out))?)
}
