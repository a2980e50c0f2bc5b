//! `adcr`: compress, reconstruct, and replay-simulate multichannel segment
//! files from the command line.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for data
//! or format errors. Machine-readable output goes to stdout (or `--out`).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

pub use output::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "adcr", version, about = "Saliency-aware segment compression and replay buffering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a raw segment file into a container
    Compress {
        /// Raw segment input
        input: PathBuf,
        /// Container output path
        output: PathBuf,
        /// Target keep ratio in (0, 1]
        #[arg(long, short = 'r')]
        ratio: f64,
        /// Named saliency preset
        #[arg(long, default_value = "isruc")]
        preset: String,
        /// JSON file with an explicit saliency configuration (overrides --preset)
        #[arg(long)]
        saliency_config: Option<PathBuf>,
        /// Largest allowed rate denominator
        #[arg(long, default_value_t = 64)]
        dmax: u32,
        /// Write the JSON summary here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a container back to a raw segment file
    Reconstruct {
        /// Container input
        input: PathBuf,
        /// Raw segment output path
        output: PathBuf,
        /// Original raw segment; adds a fidelity section to the summary
        #[arg(long)]
        original: Option<PathBuf>,
        /// Write the JSON summary here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compress/reconstruct a set of segments over several keep ratios and
    /// report mean fidelity per ratio
    Sweep {
        /// Raw segment inputs
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Comma-separated keep ratios, each in (0, 1]
        #[arg(long)]
        ratios: String,
        #[arg(long, default_value = "isruc")]
        preset: String,
        #[arg(long)]
        saliency_config: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        dmax: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a manifest of labeled segments through a budgeted buffer and
    /// log every admission, rejection, and eviction
    BufferSim {
        /// Manifest: one tab-separated record per segment
        /// (path, label, true|pseudo, confidences, feature)
        manifest: PathBuf,
        /// Stored-scalar budget of the true-labeled partition
        #[arg(long)]
        budget_true: u64,
        /// Stored-scalar budget of the pseudo-labeled partition
        #[arg(long)]
        budget_pseudo: u64,
        /// Keep ratio used when compressing inserted segments
        #[arg(long, short = 'r', default_value_t = 0.25)]
        ratio: f64,
        #[arg(long, default_value = "isruc")]
        preset: String,
        #[arg(long)]
        saliency_config: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        dmax: u32,
        /// Confidence gate threshold
        #[arg(long, default_value_t = 0.9)]
        conf_threshold: f64,
        /// Minimum number of windows above the threshold
        #[arg(long, default_value_t = 15)]
        min_windows: usize,
        /// Replay composition, true:pseudo
        #[arg(long, default_value = "8:2")]
        mix: String,
        /// Replay batch size drawn at the end of the stream
        #[arg(long, default_value_t = 10)]
        batch_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the event log here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic raw segments (noise background plus band-limited
    /// bursts) with ground-truth event files
    GenSynthetic {
        /// JSON generation spec
        spec: PathBuf,
        /// Output directory
        #[arg(long)]
        out_dir: PathBuf,
        /// Override the seed from the spec file
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in saliency presets
    Presets {
        /// Write the JSON listing here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compress {
            input,
            output,
            ratio,
            preset,
            saliency_config,
            dmax,
            out,
        } => commands::compress::run(&input, &output, ratio, &preset, saliency_config.as_deref(), dmax, out.as_deref()),
        Command::Reconstruct {
            input,
            output,
            original,
            out,
        } => commands::reconstruct::run(&input, &output, original.as_deref(), out.as_deref()),
        Command::Sweep {
            inputs,
            ratios,
            preset,
            saliency_config,
            dmax,
            format,
            out,
        } => commands::sweep::run(&inputs, &ratios, &preset, saliency_config.as_deref(), dmax, format, out.as_deref()),
        Command::BufferSim {
            manifest,
            budget_true,
            budget_pseudo,
            ratio,
            preset,
            saliency_config,
            dmax,
            conf_threshold,
            min_windows,
            mix,
            batch_size,
            seed,
            out,
        } => commands::buffer_sim::run(commands::buffer_sim::Args {
            manifest,
            budget_true,
            budget_pseudo,
            ratio,
            preset,
            saliency_config,
            dmax,
            conf_threshold,
            min_windows,
            mix,
            batch_size,
            seed,
            out,
        }),
        Command::GenSynthetic { spec, out_dir, seed } => {
            commands::gen_synthetic::run(&spec, &out_dir, seed)
        }
        Command::Presets { out } => commands::presets::run(out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
