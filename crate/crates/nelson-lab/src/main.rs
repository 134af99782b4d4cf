use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nelson_lab::error::LabError;
use nelson_lab::experiments::Experiment;

#[derive(Parser)]
#[command(name = "nelson-lab", version, about = "Run renormalized-action experiments and write CSV results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 = one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate W, φ and |∇φ| over (ε, |x|, t) grids.
    KernelsTable(RunArgs),
    /// Per-path action breakdowns across an ε sweep.
    RenormSweep(RunArgs),
    /// Itô residual along a refinement ladder; fails if the slope is off.
    ItoCheck(RunArgs),
    /// Semigroup matrix elements and energy proxies.
    Semigroup(RunArgs),
    /// Scaled kernel against the Yukawa reference along κ.
    YukawaSweep(RunArgs),
    /// Kato-class verdicts and Monte Carlo bounds.
    Kato(RunArgs),
    /// Re-run a manifest and compare output hashes.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "replay")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn execute(cli: Cli) -> Result<(), LabError> {
    let (which, args) = match cli.command {
        Command::KernelsTable(a) => (Experiment::KernelsTable, a),
        Command::RenormSweep(a) => (Experiment::RenormSweep, a),
        Command::ItoCheck(a) => (Experiment::ItoCheck, a),
        Command::Semigroup(a) => (Experiment::Semigroup, a),
        Command::YukawaSweep(a) => (Experiment::YukawaSweep, a),
        Command::Kato(a) => (Experiment::Kato, a),
        Command::Replay { manifest, out, threads } => {
            let r = nelson_lab::replay(&manifest, &out, threads)?;
            if !r.identical() {
                return Err(LabError::CheckFailed(format!("replay differs in {}", r.mismatched.join(", "))));
            }
            println!("replay identical: {} files", r.rerun.outputs.len());
            return Ok(());
        }
    };
    let text = fs::read_to_string(&args.config).map_err(|e| LabError::io(&args.config, e))?;
    let m = nelson_lab::run(which, &text, &args.out, args.seed, args.threads)?;
    for o in &m.outputs {
        println!("{}/{} ({} rows)", args.out.display(), o.file, o.rows);
    }
    let failed: Vec<&str> = m.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    for c in &m.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if !failed.is_empty() {
        return Err(LabError::CheckFailed(failed.join(", ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
