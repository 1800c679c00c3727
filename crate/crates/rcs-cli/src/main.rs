//! `rcs` — command-line workflow for monostatic RCS extraction: synthetic
//! campaign generation, per-angle extraction with heatmaps, cross-band
//! ΔRCS statistics, range–azimuth imaging, placement planning and live
//! sweep acquisition.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "rcs", version, about = "Monostatic RCS extraction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Campaign manifest path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for per-angle extraction.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Overrides the seed of scene files consumed by `synth`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Format of the stdout summary.
    #[arg(long, global = true, value_enum, default_value_t = SummaryFormat::Text)]
    format: SummaryFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SummaryFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-angle RCS for one band: records JSON, grid CSV, heatmap SVG.
    Extract(commands::extract::ExtractArgs),
    /// Cross-band ΔRCS: samples CSV, per-elevation Gaussian fit table, histogram SVG.
    Scale(commands::scale::ScaleArgs),
    /// Range–azimuth images and strongest contributors at one elevation.
    RangeImage(commands::range_image::RangeImageArgs),
    /// Antenna placement from far-field and beam-footprint bounds.
    Plan(commands::plan::PlanArgs),
    /// Generate a synthetic campaign from a scene description file.
    Synth(commands::synth::SynthArgs),
    /// Acquire a sweep from a VNA and append it to a campaign.
    Acquire(commands::acquire::AcquireArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(args) => commands::extract::run(&args, &cli.global),
        Command::Scale(args) => commands::scale::run(&args, &cli.global),
        Command::RangeImage(args) => commands::range_image::run(&args, &cli.global),
        Command::Plan(args) => commands::plan::run(&args, &cli.global),
        Command::Synth(args) => commands::synth::run(&args, &cli.global),
        Command::Acquire(args) => commands::acquire::run(&args, &cli.global),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
