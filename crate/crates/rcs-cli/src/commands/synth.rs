//! `rcs synth`: write a full synthetic campaign from a scene description
//! file.

use std::path::PathBuf;

use clap::Args;

use rcs_core::synth::{generate_campaign, SceneFile};

use crate::error::CliError;
use crate::{GlobalArgs, SummaryFormat};

#[derive(Args)]
pub struct SynthArgs {
    /// Scene description JSON.
    #[arg(long)]
    pub scene: PathBuf,
}

pub fn run(args: &SynthArgs, global: &GlobalArgs) -> Result<(), CliError> {
    let out = super::require_out(global)?;
    let text = std::fs::read_to_string(&args.scene)?;
    let mut scene = SceneFile::from_json(&text)?;
    if let Some(seed) = global.seed {
        scene.campaign.seed = seed;
    }
    let manifest = generate_campaign(
        &scene.campaign,
        &scene.thetas_deg,
        &scene.phis_deg,
        &scene.bands,
        &out,
    )?;
    match global.format {
        SummaryFormat::Text => println!("campaign written, manifest at {}", manifest.display()),
        SummaryFormat::Json => println!(
            "{}",
            serde_json::json!({ "manifest": manifest, "campaign_id": scene.campaign.campaign_id })
        ),
    }
    Ok(())
}
