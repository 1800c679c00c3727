//! Campaign-planning geometry: far-field distance, beam-footprint distance
//! and antenna elevation placement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::SPEED_OF_LIGHT_M_S;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

/// Horn antenna description: largest aperture dimension and half-power
/// beamwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaSpec {
    pub aperture_m: f64,
    pub hpbw_deg: f64,
}

impl AntennaSpec {
    pub fn new(aperture_m: f64, hpbw_deg: f64) -> Result<Self, GeometryError> {
        if !(aperture_m > 0.0) {
            return Err(GeometryError::NonPositive {
                name: "aperture_m",
                value: aperture_m,
            });
        }
        if !(hpbw_deg > 0.0 && hpbw_deg < 180.0) {
            return Err(GeometryError::OutOfRange {
                name: "hpbw_deg",
                value: hpbw_deg,
                range: "(0, 180)",
            });
        }
        Ok(Self {
            aperture_m,
            hpbw_deg,
        })
    }
}

/// Which distance bound decided a placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintBinding {
    FarField,
    Footprint,
}

/// Antenna placement for a requested elevation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementPlan {
    /// Slant distance antenna → target, m.
    pub distance_m: f64,
    /// Antenna height above the target reference, m.
    pub antenna_height_m: f64,
    /// Horizontal standoff from the target, m.
    pub ground_standoff_m: f64,
    pub theta_deg: f64,
    pub constraint_binding: ConstraintBinding,
}

/// Far-field (Fraunhofer) distance `2·D²/λ` for aperture `D` at `f_hz`.
pub fn far_field_distance(antenna: &AntennaSpec, f_hz: f64) -> Result<f64, GeometryError> {
    if !(f_hz > 0.0) {
        return Err(GeometryError::NonPositive {
            name: "f_hz",
            value: f_hz,
        });
    }
    let lambda = SPEED_OF_LIGHT_M_S / f_hz;
    Ok(2.0 * antenna.aperture_m * antenna.aperture_m / lambda)
}

/// Distance at which half the target width plus a margin subtends half the
/// antenna beamwidth: `(W/2 + d_margin) / tan(HPBW/2)`.
///
/// From the footprint triangle: at distance `d` the half-beam edge has
/// swept a half-width of `d·tan(HPBW/2)`, so requiring it to cover
/// `W/2 + d_margin` gives the cotangent form.
pub fn footprint_distance(
    target_width_m: f64,
    margin_m: f64,
    hpbw_deg: f64,
) -> Result<f64, GeometryError> {
    if !(target_width_m > 0.0) {
        return Err(GeometryError::NonPositive {
            name: "target_width_m",
            value: target_width_m,
        });
    }
    if !(margin_m >= 0.0) {
        return Err(GeometryError::OutOfRange {
            name: "margin_m",
            value: margin_m,
            range: "[0, ∞)",
        });
    }
    if !(hpbw_deg > 0.0 && hpbw_deg < 180.0) {
        return Err(GeometryError::OutOfRange {
            name: "hpbw_deg",
            value: hpbw_deg,
            range: "(0, 180)",
        });
    }
    let half_beam = (hpbw_deg / 2.0).to_radians();
    Ok((target_width_m / 2.0 + margin_m) / half_beam.tan())
}

/// Hold the slant distance and raise the antenna to reach elevation θ:
/// `height = d·sin θ`, `standoff = d·cos θ`.
pub fn elevation_placement(
    min_distance_m: f64,
    theta_deg: f64,
) -> Result<(f64, f64), GeometryError> {
    if !(min_distance_m > 0.0) {
        return Err(GeometryError::NonPositive {
            name: "min_distance_m",
            value: min_distance_m,
        });
    }
    if !(0.0..90.0).contains(&theta_deg) {
        return Err(GeometryError::OutOfRange {
            name: "theta_deg",
            value: theta_deg,
            range: "[0, 90)",
        });
    }
    let theta = theta_deg.to_radians();
    Ok((min_distance_m * theta.sin(), min_distance_m * theta.cos()))
}

/// Full placement: slant distance is the larger of the far-field and
/// footprint bounds, then elevated to θ.
pub fn plan_measurement(
    antenna: &AntennaSpec,
    f_hz: f64,
    target_width_m: f64,
    margin_m: f64,
    theta_deg: f64,
) -> Result<PlacementPlan, GeometryError> {
    let far = far_field_distance(antenna, f_hz)?;
    let foot = footprint_distance(target_width_m, margin_m, antenna.hpbw_deg)?;
    let (distance_m, constraint_binding) = if far >= foot {
        (far, ConstraintBinding::FarField)
    } else {
        (foot, ConstraintBinding::Footprint)
    };
    let (antenna_height_m, ground_standoff_m) = elevation_placement(distance_m, theta_deg)?;
    Ok(PlacementPlan {
        distance_m,
        antenna_height_m,
        ground_standoff_m,
        theta_deg,
        constraint_binding,
    })
}
