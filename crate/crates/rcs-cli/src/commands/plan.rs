//! `rcs plan`: antenna placement from the far-field and beam-footprint
//! bounds at a requested elevation.

use clap::Args;

use rcs_core::geometry::{plan_measurement, AntennaSpec, ConstraintBinding};

use crate::error::CliError;
use crate::{GlobalArgs, SummaryFormat};

#[derive(Args)]
pub struct PlanArgs {
    /// Largest antenna aperture dimension, meters.
    #[arg(long)]
    pub aperture: f64,
    /// Antenna half-power beamwidth, degrees.
    #[arg(long)]
    pub hpbw: f64,
    /// Operating frequency, Hz.
    #[arg(long)]
    pub freq: f64,
    /// Target width, meters.
    #[arg(long)]
    pub width: f64,
    /// Footprint margin, meters (no default: campaign-specific).
    #[arg(long)]
    pub margin: f64,
    /// Elevation angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

pub fn run(args: &PlanArgs, global: &GlobalArgs) -> Result<(), CliError> {
    let antenna = AntennaSpec::new(args.aperture, args.hpbw)?;
    let plan = plan_measurement(&antenna, args.freq, args.width, args.margin, args.theta)?;
    match global.format {
        SummaryFormat::Json => println!("{}", serde_json::to_string_pretty(&plan)?),
        SummaryFormat::Text => {
            let binding = match plan.constraint_binding {
                ConstraintBinding::FarField => "far field",
                ConstraintBinding::Footprint => "beam footprint",
            };
            println!("slant distance   {:>9.4} m  ({binding} bound)", plan.distance_m);
            println!("antenna height   {:>9.4} m", plan.antenna_height_m);
            println!("ground standoff  {:>9.4} m", plan.ground_standoff_m);
            println!("elevation        {:>9.4} °", plan.theta_deg);
        }
    }
    Ok(())
}
