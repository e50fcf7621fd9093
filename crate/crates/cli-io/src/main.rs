//! The `g2` binary: parse flags, size the worker pool, dispatch one
//! subcommand, and translate the outcome into the exit-code contract
//! (0 success, 1 gate failure, 2 usage/config error, 3 numerical
//! blow-up).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cli_io::{parse_config, run_command, CliError, Command, EXIT_CONFIG_ERROR};

#[derive(Parser)]
#[command(
    name = "g2",
    version,
    about = "Pseudospectral simulator and asymptotics laboratory for stochastic second grade fluids"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root seed override for the Monte Carlo ensemble.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum CommandArg {
    /// Check the operator identities on random fields.
    Selftest(CommonArgs),
    /// Integrate one deterministic and one stochastic path.
    Simulate(CommonArgs),
    /// Fit the intensity scaling of the primal gap.
    CltGap(CommonArgs),
    /// Measure the decay of the centered fluctuation to its limit.
    CltLimit(CommonArgs),
    /// Run the controlled-deviation continuity check and W-moment audit.
    MdpCheck(CommonArgs),
    /// Solve the minimum-energy control problem for a terminal target.
    Rate(CommonArgs),
}

impl CommandArg {
    fn split(self) -> (Command, CommonArgs) {
        match self {
            CommandArg::Selftest(a) => (Command::Selftest, a),
            CommandArg::Simulate(a) => (Command::Simulate, a),
            CommandArg::CltGap(a) => (Command::CltGap, a),
            CommandArg::CltLimit(a) => (Command::CltLimit, a),
            CommandArg::MdpCheck(a) => (Command::MdpCheck, a),
            CommandArg::Rate(a) => (Command::Rate, a),
        }
    }
}

/// Build the global worker pool from `G2_THREADS`; unset means one worker
/// per available core.  Results never depend on the value, only wall time
/// does.
fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("G2_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Config(format!("G2_THREADS is not readable: {e}"))),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                CliError::Config(format!(
                    "G2_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Err(CliError::Config(
                    "G2_THREADS must be a positive integer, got 0".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
        }
    }
}

fn run() -> Result<String, CliError> {
    init_thread_pool()?;
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    let mut config = parse_config(&args.config)?;
    if let Some(dir) = args.out {
        config.output_dir = dir;
    }
    if let Some(seed) = args.seed {
        config.ensemble.root_seed = seed;
    }
    let outcome = run_command(command, &config)?;
    Ok(outcome.summary)
}

fn main() -> ExitCode {
    match run() {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("g2: {e}");
            let code = e.exit_code();
            ExitCode::from(u8::try_from(code).unwrap_or(EXIT_CONFIG_ERROR as u8))
        }
    }
}
