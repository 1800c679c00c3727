//! `rcs extract`: per-angle RCS records, grid CSV and heatmap SVG.

use clap::Args;

use rcs_core::analysis::build_rcs_grid;
use rcs_core::ingest::load_campaign;
use rcs_core::render::heatmap_svg;

use super::{extract_angles, gate_params, require_manifest, require_out, write_json, write_text};
use crate::error::CliError;
use crate::{GlobalArgs, SummaryFormat};

#[derive(Args)]
pub struct ExtractArgs {
    /// Band name from the manifest.
    #[arg(long)]
    pub band: String,
    /// Gate span override, seconds of two-way delay.
    #[arg(long)]
    pub gate_span: Option<f64>,
    /// Gate extent override, meters (default: largest target dimension).
    #[arg(long)]
    pub gate_extent: Option<f64>,
}

pub fn run(args: &ExtractArgs, global: &GlobalArgs) -> Result<(), CliError> {
    let manifest = require_manifest(global)?;
    let out = require_out(global)?;
    let campaign = load_campaign(&manifest)?;
    let params = gate_params(&campaign, args.gate_extent, args.gate_span);
    let extractions = extract_angles(&campaign, &args.band, &params, global.jobs, None)?;
    let records: Vec<_> = extractions.iter().map(|e| e.record(&args.band)).collect();
    let grid = build_rcs_grid(&records, campaign.manifest().mirror_azimuth)?;

    let records_path = out.join(format!("records_{}.json", args.band));
    let grid_path = out.join(format!("rcs_grid_{}.csv", args.band));
    let heatmap_path = out.join(format!("heatmap_{}.svg", args.band));
    write_json(&records_path, &records)?;
    write_text(&grid_path, &grid.to_csv())?;
    let title = format!(
        "{} RCS, band {}",
        campaign.manifest().target.name,
        args.band
    );
    write_text(&heatmap_path, &heatmap_svg(&grid, &title))?;

    match global.format {
        SummaryFormat::Text => println!(
            "extracted {} angles of band {} -> {}, {}, {}",
            records.len(),
            args.band,
            records_path.display(),
            grid_path.display(),
            heatmap_path.display()
        ),
        SummaryFormat::Json => println!(
            "{}",
            serde_json::json!({
                "band": args.band,
                "angles": records.len(),
                "records": records_path,
                "grid_csv": grid_path,
                "heatmap_svg": heatmap_path,
            })
        ),
    }
    Ok(())
}
