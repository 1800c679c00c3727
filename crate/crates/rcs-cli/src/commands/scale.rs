//! `rcs scale`: cross-band ΔRCS samples, per-elevation Gaussian fit table
//! and the overall histogram figure.

use clap::Args;
use serde::Serialize;

use rcs_core::analysis::{build_rcs_grid, delta_rcs, delta_rcs_csv, fit_gaussian, histogram};
use rcs_core::ingest::load_campaign;
use rcs_core::render::histogram_svg;

use super::{extract_angles, gate_params, require_manifest, require_out, write_json, write_text};
use crate::error::CliError;
use crate::{GlobalArgs, SummaryFormat};

#[derive(Args)]
pub struct ScaleArgs {
    /// Lower band name.
    #[arg(long)]
    pub band1: String,
    /// Upper band name.
    #[arg(long)]
    pub band2: String,
    #[arg(long)]
    pub gate_span: Option<f64>,
    #[arg(long)]
    pub gate_extent: Option<f64>,
}

/// One row of the fit table: an elevation or the overall pool.
#[derive(Debug, Serialize)]
struct FitRow {
    elevation: String,
    mu_db: f64,
    sigma_db: f64,
    n_samples: usize,
}

#[derive(Debug, Serialize)]
struct FitTable {
    band1: String,
    band2: String,
    rows: Vec<FitRow>,
}

pub fn run(args: &ScaleArgs, global: &GlobalArgs) -> Result<(), CliError> {
    let manifest = require_manifest(global)?;
    let out = require_out(global)?;
    let campaign = load_campaign(&manifest)?;
    let band1_spec = campaign.band(&args.band1)?;
    let band2_spec = campaign.band(&args.band2)?;
    if band1_spec.f_start_hz > band2_spec.f_start_hz {
        return Err(CliError::Validation(format!(
            "band1 ({}) must be the lower band; {} starts below it",
            args.band1, args.band2
        )));
    }
    let params = gate_params(&campaign, args.gate_extent, args.gate_span);
    let mirror = campaign.manifest().mirror_azimuth;
    let grids = [&args.band1, &args.band2]
        .iter()
        .map(|band| {
            let extractions = extract_angles(&campaign, band, &params, global.jobs, None)?;
            let records: Vec<_> = extractions.iter().map(|e| e.record(band)).collect();
            Ok(build_rcs_grid(&records, mirror)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let samples = delta_rcs(&grids[0], &grids[1])?;

    let mut rows = Vec::new();
    let mut thetas: Vec<f64> = samples.iter().map(|s| s.theta_deg).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    for theta in &thetas {
        let pool: Vec<f64> = samples
            .iter()
            .filter(|s| s.theta_deg == *theta)
            .map(|s| s.delta_db)
            .collect();
        let fit = fit_gaussian(&pool)?;
        rows.push(FitRow {
            elevation: format!("{theta}"),
            mu_db: fit.mu_db,
            sigma_db: fit.sigma_db,
            n_samples: fit.n_samples,
        });
    }
    let deltas: Vec<f64> = samples.iter().map(|s| s.delta_db).collect();
    let overall = fit_gaussian(&deltas)?;
    rows.push(FitRow {
        elevation: "overall".into(),
        mu_db: overall.mu_db,
        sigma_db: overall.sigma_db,
        n_samples: overall.n_samples,
    });
    let table = FitTable {
        band1: args.band1.clone(),
        band2: args.band2.clone(),
        rows,
    };

    let stem = format!("{}_{}", args.band1, args.band2);
    let csv_path = out.join(format!("delta_rcs_{stem}.csv"));
    let table_path = out.join(format!("scale_fits_{stem}.json"));
    let hist_path = out.join(format!("delta_hist_{stem}.svg"));
    write_text(&csv_path, &delta_rcs_csv(&samples))?;
    write_json(&table_path, &table)?;
    let hist = histogram(&deltas)?;
    let title = format!(
        "{} ΔRCS, {} → {}",
        campaign.manifest().target.name,
        args.band1,
        args.band2
    );
    write_text(&hist_path, &histogram_svg(&hist, &overall, &title))?;

    match global.format {
        SummaryFormat::Text => {
            println!("elevation  mu_db   sigma_db  n");
            for row in &table.rows {
                println!(
                    "{:<9}  {:>6.2}  {:>7.2}  {}",
                    row.elevation, row.mu_db, row.sigma_db, row.n_samples
                );
            }
            println!(
                "wrote {}, {}, {}",
                csv_path.display(),
                table_path.display(),
                hist_path.display()
            );
        }
        SummaryFormat::Json => println!("{}", serde_json::to_string(&table)?),
    }
    Ok(())
}
