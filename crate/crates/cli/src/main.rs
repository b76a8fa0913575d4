use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clique_core::{Decoder, NoiseModel};

mod commands;
mod parse;

// Aliases keep clap from treating these as repeated arguments.
type DistanceList = Vec<usize>;
type RateList = Vec<f64>;
type DecoderList = Vec<Decoder>;

#[derive(Parser)]
#[command(name = "clique", version, about = "Local clique decoder simulator for the rotated surface code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump lattice geometry as JSON.
    Lattice(LatticeArgs),
    /// Run one (distance, rate, decoder) cell.
    Simulate(SimulateArgs),
    /// Run every distance x rate x decoder cell for one noise model.
    Sweep(SweepArgs),
    /// Exhaustively decode all low-weight data errors and report outcomes.
    Verify(VerifyArgs),
    /// Fit logit(offload fraction) against distance from a sweep CSV.
    Extrapolate(ExtrapolateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long, short)]
    distance: usize,
    #[arg(long, short)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args, Clone)]
struct NoiseArgs {
    /// uniform, gaussian or dual.
    #[arg(long, default_value = "uniform")]
    model: NoiseModel,
    /// Syndrome rounds per cycle; 1 disables measurement errors.
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    /// Measurement flip rate; defaults to the data rate.
    #[arg(long, value_parser = parse::rate)]
    measurement_rate: Option<f64>,
    /// Gaussian cluster spread.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Gaussian mean cluster size.
    #[arg(long, default_value_t = 2.0)]
    cluster_size: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    cycles: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, short)]
    distance: usize,
    /// Physical error rate, e.g. 0.005 or 0.5%.
    #[arg(long, value_parser = parse::rate)]
    rate: f64,
    #[arg(long, default_value = "l2")]
    decoder: Decoder,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long, short)]
    output: Option<std::path::PathBuf>,
    /// Write per-cycle decode traces as JSON lines to this file.
    #[arg(long)]
    trace: Option<std::path::PathBuf>,
    /// Cycles traced (from cycle 0); cycles with an empty syndrome are skipped.
    #[arg(long, default_value_t = 1000)]
    trace_limit: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Odd distances: `3..13`, `3,5,7` or a mix.
    #[arg(long, value_parser = parse::distances)]
    distances: DistanceList,
    /// Comma-separated rates; decimals or percentages.
    #[arg(long, value_parser = parse::rates, required_unless_present = "rate")]
    rates: Option<RateList>,
    #[arg(long, value_parser = parse::decoders, default_value = "l1,l2")]
    decoders: DecoderList,
    /// Alias for a single-entry --rates.
    #[arg(long, value_parser = parse::rate, conflicts_with = "rates")]
    rate: Option<f64>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long, short)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, short)]
    distance: usize,
    #[arg(long, default_value = "l2")]
    decoder: Decoder,
    #[arg(long, default_value_t = 3)]
    max_weight: usize,
    /// Also report the exact offload probability at these rates.
    #[arg(long, value_parser = parse::rates)]
    rates: Option<RateList>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args)]
struct ExtrapolateArgs {
    /// Sweep CSV to read.
    #[arg(long, short)]
    input: std::path::PathBuf,
    /// Distances used for the fit, inclusive `lo..hi`; all by default.
    #[arg(long, value_parser = parse::window)]
    fit_window: Option<(usize, usize)>,
    /// Distances to predict.
    #[arg(long, value_parser = parse::distances, default_value = "21,23,25")]
    targets: DistanceList,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Lattice(a) => commands::lattice(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Verify(a) => commands::verify(a),
        Command::Extrapolate(a) => commands::extrapolate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
