//! `rcs acquire`: pull one sweep from a VNA, save it as Touchstone and
//! append the manifest entry atomically (write-temp-rename).

use clap::{Args, ValueEnum};

use rcs_core::ingest::{
    angle_token, write_touchstone_s1p, CampaignManifest, Scenario, SweepEntry,
    MANIFEST_SCHEMA_VERSION,
};
use rcs_core::vna::{acquire_sweep, InstrumentEndpoint, SweepConfig};

use super::{angle_eq, require_manifest, write_text};
use crate::error::CliError;
use crate::{GlobalArgs, SummaryFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Slot {
    Target,
    Background,
    Sphere,
}

impl From<Slot> for Scenario {
    fn from(slot: Slot) -> Scenario {
        match slot {
            Slot::Target => Scenario::Target,
            Slot::Background => Scenario::Background,
            Slot::Sphere => Scenario::Sphere,
        }
    }
}

#[derive(Args)]
pub struct AcquireArgs {
    #[arg(long)]
    pub host: String,
    #[arg(long)]
    pub port: u16,
    #[arg(long, default_value_t = 5000)]
    pub timeout_ms: u64,
    #[arg(long)]
    pub band: String,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub phi: f64,
    /// Which scenario slot this sweep fills.
    #[arg(long, value_enum)]
    pub slot: Slot,
    #[arg(long, default_value_t = 100e3)]
    pub if_bandwidth: f64,
    #[arg(long, default_value_t = 0.0)]
    pub power_dbm: f64,
}

pub fn run(args: &AcquireArgs, global: &GlobalArgs) -> Result<(), CliError> {
    let manifest_path = require_manifest(global)?;
    let text = std::fs::read_to_string(&manifest_path)?;
    let mut manifest: CampaignManifest = serde_json::from_str(&text)?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "manifest schema_version {} unsupported",
            manifest.schema_version
        )));
    }
    let band = manifest
        .bands
        .iter()
        .find(|b| b.name == args.band)
        .ok_or_else(|| CliError::Validation(format!("unknown band {}", args.band)))?
        .clone();
    let scenario: Scenario = args.slot.into();
    if manifest.entries.iter().any(|e| {
        e.band == args.band
            && e.scenario == scenario
            && angle_eq(e.theta_deg, args.theta)
            && angle_eq(e.phi_deg, args.phi)
    }) {
        return Err(CliError::Validation(format!(
            "manifest already has a {scenario} entry for band {} θ={}° φ={}°",
            args.band, args.theta, args.phi
        )));
    }

    let endpoint = InstrumentEndpoint {
        host: args.host.clone(),
        port: args.port,
        timeout_ms: args.timeout_ms,
        sweep_config: SweepConfig {
            f_start_hz: band.f_start_hz,
            f_stop_hz: band.f_stop_hz,
            n_points: band.n_samples,
            if_bandwidth_hz: args.if_bandwidth,
            power_dbm: args.power_dbm,
        },
    };
    // acquisition validates the point count against the band spec, so any
    // fault errors out here before a byte is written
    let sweep = acquire_sweep(&endpoint)?;

    let dir = manifest_path
        .parent()
        .map(std::path::Path::to_path_buf)
        .unwrap_or_else(|| std::path::PathBuf::from("."));
    let rel_name = format!(
        "sweeps/{}/{scenario}_t{}_p{}.s1p",
        args.band,
        angle_token(args.theta),
        angle_token(args.phi)
    );
    let sweep_path = dir.join(&rel_name);
    if let Some(parent) = sweep_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_text(&sweep_path, &write_touchstone_s1p(&sweep))?;

    manifest.entries.push(SweepEntry {
        band: args.band.clone(),
        theta_deg: args.theta,
        phi_deg: args.phi,
        scenario,
        path: rel_name.clone(),
    });
    let mut updated = serde_json::to_string_pretty(&manifest)?;
    updated.push('\n');
    let tmp_path = manifest_path.with_extension("json.tmp");
    std::fs::write(&tmp_path, &updated)?;
    std::fs::rename(&tmp_path, &manifest_path)?;

    match global.format {
        SummaryFormat::Text => println!(
            "acquired {} points into {rel_name}; manifest updated",
            sweep.len()
        ),
        SummaryFormat::Json => println!(
            "{}",
            serde_json::json!({ "path": rel_name, "points": sweep.len() })
        ),
    }
    Ok(())
}
