use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polaron_cli::{execute, Mode};

#[derive(Parser)]
#[command(name = "polaron", version, about = "Run Landau–Pekar, Fock-space and bounds experiments from a TOML config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the Landau–Pekar equations on a periodic box
    Lp(Common),
    /// One many-body run compared with the mean-field flow
    Fock(Common),
    /// Run the inequality and identity checks
    Bounds(Common),
    /// Many-body runs over N × K × α
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// output directory (overrides `output` in the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides `seed` in the config)
    #[arg(long)]
    seed: Option<u64>,
    /// print nothing but errors
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Lp(a) => (Mode::Lp, a),
        Command::Fock(a) => (Mode::Fock, a),
        Command::Bounds(a) => (Mode::Bounds, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    match execute(mode, &args.config, args.out, args.seed) {
        Ok(summary) => {
            if !args.quiet {
                summary.lines.iter().for_each(|l| println!("{l}"));
                println!("manifest: {}", summary.manifest.display());
            }
            match summary.error {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("polaron: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("polaron: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
