use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use solvaq_cli::{exit_code, run, write_outputs, Command, RunConfig};

const CONFIG_HELP: &str = "\
CONFIG FILE (TOML; relative paths resolve against the file's directory)

  [molecule]      geometry = PATH (required, XYZ)
                  unit = \"angstrom\" | \"bohr\"            default \"angstrom\"
                  basis = NAME | PATH                   default \"sto-3g\" (built in: sto-3g, cc-pvdz)
                  charge = INT                          default 0
                  multiplicity = 1                      only singlets
  [scf]           max_iterations = 200, energy_tolerance = 1e-9,
                  diis_tolerance = 1e-7, diis_depth = 8, level_shift = 0.0
  [solvent]       model = \"none\" | \"ief-pcm\"           default \"none\"
                  epsilon = 78.3553, scale = 1.2, points_per_sphere = 302
                  [solvent.radii] SYMBOL = angstrom    overrides Bondi radii
  [active_space]  method = \"window\"  n_core, n_active   (required section)
                  method = \"manual\"  orbitals = [..]
                  method = \"avas\"    targets = [\"O 2p\", ..], threshold = 0.2
  [sampler]       source = \"exact\" | \"file\"            default \"exact\"
                  path = PATH (file source), shots = 100000, noise = 0.0
  [sqd]           batches = 10, batch_size = 1000, iterations = 3,
                  davidson_tolerance = 1e-8, scrf_tolerance = 1e-8,
                  max_macro_iterations = 30
  [sweep]         batch_sizes = [..]                    at least two entries
  [run]           seed = 0, workers = 0 (all cores), output = \"solvaq-out\"

EXIT CODES
  0 success, 1 numerical non-convergence, 2 configuration or IO error";

#[derive(Parser)]
#[command(name = "solvaq", version, about = "Sample-based diagonalization with IEF-PCM solvation")]
#[command(after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Restricted Hartree-Fock, optionally in solvent.
    Scf(Args),
    /// Complete active-space CI (limited to 1e7 determinants).
    Casci(Args),
    /// Sampling, configuration recovery and batched subspace diagonalization.
    Sqd(Args),
    /// SQD repeated over `sweep.batch_sizes`; writes sweep.csv.
    Sweep(Args),
}

#[derive(clap::Args)]
#[command(after_long_help = CONFIG_HELP)]
struct Args {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, overriding `run.workers` (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory, overriding `run.output`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Scf(a) => (Command::Scf, a),
        Cmd::Casci(a) => (Command::Casci, a),
        Cmd::Sqd(a) => (Command::Sqd, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let code = match execute(command, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command, args: Args) -> anyhow::Result<i32> {
    let mut config = RunConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if let Some(workers) = args.workers {
        config.run.workers = workers;
    }
    if let Some(out) = args.out {
        config.run.output = out;
    }
    let outcome = run(command, &config)?;
    print!("{}", outcome.report.summary());
    for path in write_outputs(&outcome, &config.run.output)? {
        println!("  wrote {}", path.display());
    }
    let code = outcome.exit_code();
    if code != 0 {
        eprintln!("error: {} did not converge; see the report for diagnostics", command.name());
    }
    Ok(code)
}
