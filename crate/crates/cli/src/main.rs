use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmod_cli::{
    emit_csv, execute_command, parse_model, CliError, CommandKind, CommandSpec, InterfereArgs,
};

#[derive(Parser)]
#[command(
    name = "qmod",
    version,
    about = "Simplex and Hilbert representations of measurement models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Model file (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Measurement id; defaults to the first measurement in the file
    #[arg(long)]
    measurement: Option<String>,
    /// State id; defaults to the first state in the file
    #[arg(long)]
    state: Option<String>,
    /// Write CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// State vector, determinant volume ratios and (two outcomes) segment length
    Geometry(Shared),
    /// Monte Carlo hidden-measurement frequencies
    Simulate {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        streams: usize,
    },
    /// Quantum state and Born-rule check
    Quantum(Shared),
    /// Superposition of two states and its interference terms
    Interfere {
        #[command(flatten)]
        shared: Shared,
        /// Second state; defaults to --state
        #[arg(long)]
        state_b: Option<String>,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        amp_a: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        amp_b: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phase_a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phase_b: f64,
        #[arg(long)]
        renormalize: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (shared, kind) = match cli.command {
        Command::Geometry(shared) => (shared, CommandKind::Geometry),
        Command::Simulate {
            shared,
            trials,
            seed,
            streams,
        } => (
            shared,
            CommandKind::Simulate {
                trials,
                seed,
                streams,
            },
        ),
        Command::Quantum(shared) => (shared, CommandKind::Quantum),
        Command::Interfere {
            shared,
            state_b,
            amp_a,
            amp_b,
            phase_a,
            phase_b,
            renormalize,
        } => (
            shared,
            CommandKind::Interfere(InterfereArgs {
                state_b,
                amp_a,
                amp_b,
                phase_a,
                phase_b,
                renormalize,
            }),
        ),
    };

    let model = parse_model(&shared.model)?;
    let measurement = match shared.measurement {
        Some(m) => m,
        None => model
            .measurements
            .first()
            .map(|m| m.measurement_id.clone())
            .ok_or_else(|| CliError::Command("model has no measurements".into()))?,
    };
    let state = match shared.state {
        Some(s) => s,
        None => model
            .states
            .first()
            .map(|s| s.state_id.clone())
            .ok_or_else(|| CliError::Command("model has no states".into()))?,
    };
    let record = execute_command(
        &model,
        &CommandSpec {
            measurement,
            state,
            kind,
        },
    )?;
    match shared.output {
        Some(path) => emit_csv(&record, path),
        None => std::io::stdout()
            .write_all(record.to_csv().as_bytes())
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
