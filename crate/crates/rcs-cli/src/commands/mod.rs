//! Subcommand implementations and the extraction plumbing they share.

pub mod acquire;
pub mod extract;
pub mod plan;
pub mod range_image;
pub mod scale;
pub mod synth;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use rcs_core::dbsm;
use rcs_core::ingest::Campaign;
use rcs_core::pipeline::{extract_rcs, Extraction, ExtractionRecord, GateParams};

use crate::error::CliError;
use crate::GlobalArgs;

pub fn require_manifest(global: &GlobalArgs) -> Result<PathBuf, CliError> {
    global
        .manifest
        .clone()
        .ok_or_else(|| CliError::Validation("--manifest is required".into()))
}

pub fn require_out(global: &GlobalArgs) -> Result<PathBuf, CliError> {
    let out = global
        .out
        .clone()
        .ok_or_else(|| CliError::Validation("--out is required".into()))?;
    std::fs::create_dir_all(&out)?;
    Ok(out)
}

/// One angle's full extraction output.
pub struct AngleExtraction {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub extraction: Extraction,
}

impl AngleExtraction {
    pub fn record(&self, band: &str) -> ExtractionRecord {
        ExtractionRecord {
            band: band.to_string(),
            theta_deg: self.theta_deg,
            phi_deg: self.phi_deg,
            rcs_m2: self.extraction.rcs_m2,
            rcs_dbsm: dbsm(self.extraction.rcs_m2),
            gate: self.extraction.diagnostics.target_gate,
            diagnostics: self.extraction.diagnostics.clone(),
        }
    }
}

/// Gate parameters for a campaign: the gate extent defaults to the
/// target's largest dimension so the whole body fits the gate at any
/// aspect angle.
pub fn gate_params(
    campaign: &Campaign,
    extent_override_m: Option<f64>,
    span_override_s: Option<f64>,
) -> GateParams {
    let target = &campaign.manifest().target;
    let extent = extent_override_m.unwrap_or(
        target
            .length_m
            .max(target.width_m)
            .max(target.height_m),
    );
    let mut params = GateParams::new(extent);
    params.span_override_s = span_override_s;
    params
}

/// Extract every target angle of a band (optionally one elevation only),
/// in parallel, aggregating failures instead of stopping at the first.
pub fn extract_angles(
    campaign: &Campaign,
    band: &str,
    params: &GateParams,
    jobs: usize,
    theta_filter: Option<f64>,
) -> Result<Vec<AngleExtraction>, CliError> {
    campaign.band(band).map_err(CliError::from)?;
    let angles: Vec<(f64, f64)> = campaign
        .target_angles(band)
        .into_iter()
        .filter(|&(t, _)| theta_filter.map(|want| angle_eq(t, want)).unwrap_or(true))
        .collect();
    if angles.is_empty() {
        let thetas = available_thetas(campaign, band);
        return Err(CliError::Validation(match theta_filter {
            Some(t) => format!("no angles at θ={t}° in band {band} (available: {thetas})"),
            None => format!("no target entries for band {band}"),
        }));
    }
    let ctx = campaign.calibration_context();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Pipeline(e.to_string()))?;
    let results: Vec<(f64, f64, Result<Extraction, String>)> = pool.install(|| {
        angles
            .par_iter()
            .map(|&(theta, phi)| {
                let result = campaign
                    .triple(band, theta, phi)
                    .map_err(|e| e.to_string())
                    .and_then(|triple| {
                        extract_rcs(&triple, &ctx, params).map_err(|e| e.to_string())
                    });
                (theta, phi, result)
            })
            .collect()
    });
    let mut extractions = Vec::new();
    let mut failures = Vec::new();
    for (theta, phi, result) in results {
        match result {
            Ok(extraction) => extractions.push(AngleExtraction {
                theta_deg: theta,
                phi_deg: phi,
                extraction,
            }),
            Err(e) => failures.push(format!("  θ={theta}° φ={phi}°: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Pipeline(format!(
            "{} of {} angles failed in band {band}:\n{}",
            failures.len(),
            failures.len() + extractions.len(),
            failures.join("\n")
        )));
    }
    Ok(extractions)
}

pub fn available_thetas(campaign: &Campaign, band: &str) -> String {
    let mut thetas: Vec<f64> = campaign
        .target_angles(band)
        .into_iter()
        .map(|(t, _)| t)
        .collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    thetas
        .iter()
        .map(|t| format!("{t}°"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn angle_eq(a: f64, b: f64) -> bool {
    (a - b).abs() < 5e-4
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}
