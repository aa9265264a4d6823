use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spikeload::commands;

/// Spike-based cognitive-load classification pipeline: synthetic data,
/// LIF encoding, delta-rule SNN training, int3 quantization, mixed-signal
/// substrate emulation, burst decoding, and evaluation reports.
#[derive(Parser)]
#[command(name = "spikeload", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic two-cluster feature CSV.
    SynthData {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Encode a feature CSV into a spike-event file plus completeness report.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Skip z-scoring (input is already normalized).
        #[arg(long)]
        no_normalize: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Cross-validate one SNN configuration and save the best fold's model.
    Train {
        #[arg(long, default_value = "single")]
        arch: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_model: PathBuf,
    },
    /// Exhaustive hyperparameter search (defaults to the published grids).
    GridSearch {
        #[arg(long, default_value = "single")]
        arch: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Flat JSON config carrying grid.* keys (alias for --config).
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Quantize a trained model to int3 and compare against the float weights.
    Quantize {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Feature CSV for accuracy comparison / fine-tuning.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Quantization-aware delta-rule fine-tune (float shadow, requires --in).
        #[arg(long)]
        finetune: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Replay encoded trials through the emulated mixed-signal substrate.
    Emulate {
        #[arg(long)]
        qmodel: PathBuf,
        #[arg(long)]
        events: PathBuf,
        /// Feature CSV supplying labels (joined by trial_id) for metrics.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Device-mismatch coefficient of variation (weights and taus).
        #[arg(long)]
        mismatch_cv: Option<f64>,
        /// Independent inference repetitions (fresh mismatch per repeat).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also dump raw output spikes (JSONL, repeat-major).
        #[arg(long)]
        out_spikes: Option<PathBuf>,
        /// Also dump the expanded networks (post-mismatch) for audit.
        #[arg(long)]
        dump_network: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Logistic-regression baseline with a grid over C.
    Baseline {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge result JSON files into one CSV/JSON table.
    Report {
        #[arg(long, required = true, num_args = 1..)]
        results: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SynthData {
            n,
            separation,
            seed,
            out,
            config,
        } => commands::run_synth_data(*n, *separation, *seed, out, config.as_deref()),
        Command::Encode {
            input,
            tau,
            out,
            no_normalize,
            config,
        } => commands::run_encode(input, *tau, out, *no_normalize, config.as_deref()),
        Command::Train {
            arch,
            input,
            config,
            out_model,
        } => commands::run_train(arch, input, config.as_deref(), out_model),
        Command::GridSearch {
            arch,
            input,
            space,
            out,
            jobs,
            config,
        } => commands::run_grid_search(arch, input, space.as_deref(), out, *jobs, config.as_deref()),
        Command::Quantize {
            model,
            out,
            input,
            finetune,
            config,
        } => commands::run_quantize(model, out, input.as_deref(), *finetune, config.as_deref()),
        Command::Emulate {
            qmodel,
            events,
            labels,
            mismatch_cv,
            trials,
            out,
            out_spikes,
            dump_network,
            jobs,
            config,
        } => commands::run_emulate(
            qmodel,
            events,
            labels.as_deref(),
            *mismatch_cv,
            *trials,
            out,
            out_spikes.as_deref(),
            dump_network.as_deref(),
            *jobs,
            config.as_deref(),
        ),
        Command::Baseline { input, config, out } => {
            commands::run_baseline(input, config.as_deref(), out)
        }
        Command::Report { results, out } => commands::run_report(results, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
