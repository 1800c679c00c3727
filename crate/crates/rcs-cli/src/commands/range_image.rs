//! `rcs range-image`: target-centered range responses per azimuth at one
//! elevation, as CSV, rectangular and polar SVG, plus the strongest
//! contribution points.

use clap::Args;

use rcs_core::analysis::{
    build_range_azimuth_image, range_response, top_contributors, Interpolation,
};
use rcs_core::ingest::load_campaign;
use rcs_core::render::{range_azimuth_polar_svg, range_azimuth_svg};

use super::{extract_angles, gate_params, require_manifest, require_out, write_json, write_text};
use crate::error::CliError;
use crate::{GlobalArgs, SummaryFormat};

#[derive(Args)]
pub struct RangeImageArgs {
    #[arg(long)]
    pub band: String,
    /// Elevation to image, degrees.
    #[arg(long)]
    pub theta: f64,
    /// Angular interpolation for unmeasured azimuths.
    #[arg(long, default_value = "linear")]
    pub interp: Interpolation,
    /// Azimuth raster step for the interpolated image, degrees.
    #[arg(long, default_value_t = 1.0)]
    pub phi_step: f64,
    /// How many top contributors to report.
    #[arg(long, default_value_t = 3)]
    pub top_k: usize,
    #[arg(long)]
    pub gate_span: Option<f64>,
    #[arg(long)]
    pub gate_extent: Option<f64>,
}

pub fn run(args: &RangeImageArgs, global: &GlobalArgs) -> Result<(), CliError> {
    let manifest = require_manifest(global)?;
    let out = require_out(global)?;
    let campaign = load_campaign(&manifest)?;
    let params = gate_params(&campaign, args.gate_extent, args.gate_span);
    let extractions = extract_angles(
        &campaign,
        &args.band,
        &params,
        global.jobs,
        Some(args.theta),
    )?;
    let d_target = campaign.manifest().target.distance_m;
    let profiles: Vec<(f64, rcs_core::analysis::RangeProfile)> = extractions
        .iter()
        .map(|e| {
            Ok((
                e.phi_deg,
                range_response(&e.extraction.spectrum, d_target)?,
            ))
        })
        .collect::<Result<_, CliError>>()?;
    let image = build_range_azimuth_image(&profiles, args.interp, args.phi_step)?;
    let top = top_contributors(&image, args.top_k)?;

    let stem = format!("{}_t{}", args.band, args.theta);
    let csv_path = out.join(format!("range_azimuth_{stem}.csv"));
    let rect_path = out.join(format!("range_azimuth_{stem}.svg"));
    let polar_path = out.join(format!("range_azimuth_polar_{stem}.svg"));
    let top_path = out.join(format!("top_contributors_{stem}.json"));
    write_text(&csv_path, &image.to_csv())?;
    let title = format!(
        "{} range response, band {}, θ={}°",
        campaign.manifest().target.name,
        args.band,
        args.theta
    );
    write_text(&rect_path, &range_azimuth_svg(&image, &title))?;
    write_text(&polar_path, &range_azimuth_polar_svg(&image, &title))?;
    write_json(&top_path, &top)?;

    match global.format {
        SummaryFormat::Text => {
            for (rank, p) in top.points.iter().enumerate() {
                println!(
                    "#{:<2} range {:>7.3} m  φ {:>5.1}°  |√σ| {:.4e}",
                    rank + 1,
                    p.range_m,
                    p.phi_deg,
                    p.magnitude
                );
            }
            println!(
                "wrote {}, {}, {}, {}",
                csv_path.display(),
                rect_path.display(),
                polar_path.display(),
                top_path.display()
            );
        }
        SummaryFormat::Json => println!("{}", serde_json::to_string(&top)?),
    }
    Ok(())
}
