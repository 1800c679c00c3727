//! Campaign manifest: a single JSON document describing bands, the
//! calibration sphere, the target, and every sweep file of a measurement
//! campaign, plus the validated in-memory [`Campaign`] handle.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{angle_key, parse_csv_sweep, parse_touchstone_s1p, IngestError, SweepFileHeader};
use crate::pipeline::{CalibrationContext, MeasurementTriple};
use crate::sweep::{FrequencyGrid, FrequencySweep, SweepLabel};

/// Version expected in the manifest's `schema_version` field.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub schema_version: u32,
    pub campaign_id: String,
    /// When true, azimuths in (180°, 360°) may be synthesized from
    /// 360° − φ at analysis time; never applied silently.
    #[serde(default)]
    pub mirror_azimuth: bool,
    pub bands: Vec<BandSpec>,
    pub sphere: SphereSpec,
    pub target: TargetSpec,
    pub entries: Vec<SweepEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub name: String,
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_samples: usize,
    pub antenna_hpbw_deg: f64,
}

impl BandSpec {
    pub fn grid(&self) -> Result<FrequencyGrid, IngestError> {
        Ok(FrequencyGrid::new(
            self.f_start_hz,
            self.f_stop_hz,
            self.n_samples,
        )?)
    }
}

/// Calibration sphere: radius and measurement distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSpec {
    pub radius_m: f64,
    pub distance_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub name: String,
    pub height_m: f64,
    pub width_m: f64,
    pub length_m: f64,
    pub distance_m: f64,
    pub environment: Environment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    Indoor,
    Outdoor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Target,
    Background,
    Sphere,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Target => write!(f, "target"),
            Scenario::Background => write!(f, "background"),
            Scenario::Sphere => write!(f, "sphere"),
        }
    }
}

impl Scenario {
    fn label(&self) -> SweepLabel {
        match self {
            Scenario::Target => SweepLabel::Target,
            Scenario::Background => SweepLabel::Background,
            Scenario::Sphere => SweepLabel::Sphere,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub band: String,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub scenario: Scenario,
    /// File path, relative to the manifest's directory.
    pub path: String,
}

/// One structured finding from campaign validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    BadField {
        field: String,
        detail: String,
    },
    UnknownBand {
        band: String,
        path: String,
    },
    BadAngle {
        band: String,
        theta_deg: f64,
        phi_deg: f64,
        detail: String,
    },
    DuplicateEntry {
        band: String,
        scenario: Scenario,
        theta_deg: f64,
        phi_deg: f64,
    },
    MissingBackground {
        band: String,
        theta_deg: f64,
        phi_deg: f64,
    },
    MissingSphere {
        band: String,
    },
    MissingSphereBackground {
        band: String,
        theta_deg: f64,
        phi_deg: f64,
    },
    FileError {
        path: String,
        detail: String,
    },
    GridMismatch {
        path: String,
        band: String,
        detail: String,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::BadField { field, detail } => write!(f, "{field}: {detail}"),
            ValidationIssue::UnknownBand { band, path } => {
                write!(f, "entry {path} references unknown band {band}")
            }
            ValidationIssue::BadAngle {
                band,
                theta_deg,
                phi_deg,
                detail,
            } => write!(f, "band {band} θ={theta_deg}° φ={phi_deg}°: {detail}"),
            ValidationIssue::DuplicateEntry {
                band,
                scenario,
                theta_deg,
                phi_deg,
            } => write!(
                f,
                "duplicate {scenario} entry for band {band} θ={theta_deg}° φ={phi_deg}°"
            ),
            ValidationIssue::MissingBackground {
                band,
                theta_deg,
                phi_deg,
            } => write!(
                f,
                "band {band} θ={theta_deg}° φ={phi_deg}°: target has no background entry"
            ),
            ValidationIssue::MissingSphere { band } => {
                write!(f, "band {band}: no sphere entry")
            }
            ValidationIssue::MissingSphereBackground {
                band,
                theta_deg,
                phi_deg,
            } => write!(
                f,
                "band {band}: sphere at θ={theta_deg}° φ={phi_deg}° has no background entry"
            ),
            ValidationIssue::FileError { path, detail } => write!(f, "{path}: {detail}"),
            ValidationIssue::GridMismatch { path, band, detail } => {
                write!(f, "{path}: grid disagrees with band {band}: {detail}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct SweepKey {
    band: String,
    scenario: Scenario,
    theta_mdeg: i64,
    phi_mdeg: i64,
}

impl SweepKey {
    fn new(band: &str, scenario: Scenario, theta_deg: f64, phi_deg: f64) -> Self {
        Self {
            band: band.to_string(),
            scenario,
            theta_mdeg: angle_key(theta_deg),
            phi_mdeg: angle_key(phi_deg),
        }
    }
}

/// A fully loaded and validated campaign; read-only after construction.
#[derive(Debug)]
pub struct Campaign {
    manifest: CampaignManifest,
    dir: PathBuf,
    sweeps: HashMap<SweepKey, FrequencySweep>,
}

/// Load, validate and fully read a campaign manifest.
///
/// All validation findings are aggregated; on failure the error lists
/// every offending (band, θ, φ) rather than stopping at the first.
pub fn load_campaign(manifest_path: &Path) -> Result<Campaign, IngestError> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest: CampaignManifest = serde_json::from_str(&text)?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(IngestError::Schema(format!(
            "schema_version {} unsupported (expected {MANIFEST_SCHEMA_VERSION})",
            manifest.schema_version
        )));
    }
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));

    let mut issues = validate_structure(&manifest);
    if !issues.is_empty() {
        return Err(IngestError::Validation(issues));
    }

    let band_grids: HashMap<String, FrequencyGrid> = manifest
        .bands
        .iter()
        .map(|b| Ok((b.name.clone(), b.grid()?)))
        .collect::<Result<_, IngestError>>()?;

    let mut sweeps = HashMap::new();
    for entry in &manifest.entries {
        let grid = band_grids[&entry.band];
        let path = dir.join(&entry.path);
        match load_sweep_file(&path, grid.n_samples()) {
            Ok(sweep) => {
                if !sweep.grid().approx_eq(&grid, super::GRID_UNIFORMITY_TOL) {
                    issues.push(ValidationIssue::GridMismatch {
                        path: entry.path.clone(),
                        band: entry.band.clone(),
                        detail: format!(
                            "file spans {:.6e}..{:.6e} Hz × {}, band wants {:.6e}..{:.6e} Hz × {}",
                            sweep.grid().f_start_hz(),
                            sweep.grid().f_stop_hz(),
                            sweep.grid().n_samples(),
                            grid.f_start_hz(),
                            grid.f_stop_hz(),
                            grid.n_samples()
                        ),
                    });
                    continue;
                }
                // snap onto the band's canonical grid so every sweep of a
                // band shares an identical FrequencyGrid downstream
                let snapped =
                    FrequencySweep::new(grid, sweep.samples().to_vec(), entry.scenario.label())?;
                let key =
                    SweepKey::new(&entry.band, entry.scenario, entry.theta_deg, entry.phi_deg);
                sweeps.insert(key, snapped);
            }
            Err(e) => issues.push(ValidationIssue::FileError {
                path: entry.path.clone(),
                detail: e.to_string(),
            }),
        }
    }
    if !issues.is_empty() {
        return Err(IngestError::Validation(issues));
    }

    Ok(Campaign {
        manifest,
        dir,
        sweeps,
    })
}

fn load_sweep_file(path: &Path, n_points: usize) -> Result<FrequencySweep, IngestError> {
    let bytes = std::fs::read(path)?;
    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    if is_csv {
        let header = SweepFileHeader {
            n_points: Some(n_points),
            ..SweepFileHeader::canonical_csv()
        };
        parse_csv_sweep(&bytes, &header)
    } else {
        let sweep = parse_touchstone_s1p(&bytes)?;
        if sweep.len() != n_points {
            return Err(IngestError::PointCountMismatch {
                declared: n_points,
                parsed: sweep.len(),
            });
        }
        Ok(sweep)
    }
}

fn validate_structure(manifest: &CampaignManifest) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let positive = |field: &str, value: f64, issues: &mut Vec<ValidationIssue>| {
        if !(value > 0.0) {
            issues.push(ValidationIssue::BadField {
                field: field.to_string(),
                detail: format!("must be positive, got {value}"),
            });
        }
    };
    positive("sphere.radius_m", manifest.sphere.radius_m, &mut issues);
    positive("sphere.distance_m", manifest.sphere.distance_m, &mut issues);
    positive("target.distance_m", manifest.target.distance_m, &mut issues);
    positive("target.height_m", manifest.target.height_m, &mut issues);
    positive("target.width_m", manifest.target.width_m, &mut issues);
    positive("target.length_m", manifest.target.length_m, &mut issues);

    if manifest.bands.is_empty() {
        issues.push(ValidationIssue::BadField {
            field: "bands".into(),
            detail: "at least one band is required".into(),
        });
    }
    let mut band_names = HashSet::new();
    for band in &manifest.bands {
        if !band_names.insert(band.name.clone()) {
            issues.push(ValidationIssue::BadField {
                field: "bands".into(),
                detail: format!("duplicate band name {}", band.name),
            });
        }
        if let Err(e) = band.grid() {
            issues.push(ValidationIssue::BadField {
                field: format!("bands[{}]", band.name),
                detail: e.to_string(),
            });
        }
        if !(band.antenna_hpbw_deg > 0.0 && band.antenna_hpbw_deg < 180.0) {
            issues.push(ValidationIssue::BadField {
                field: format!("bands[{}].antenna_hpbw_deg", band.name),
                detail: format!("must lie in (0, 180), got {}", band.antenna_hpbw_deg),
            });
        }
    }

    let mut seen = HashSet::new();
    for entry in &manifest.entries {
        if !band_names.contains(&entry.band) {
            issues.push(ValidationIssue::UnknownBand {
                band: entry.band.clone(),
                path: entry.path.clone(),
            });
            continue;
        }
        if !(0.0..=90.0).contains(&entry.theta_deg) {
            issues.push(ValidationIssue::BadAngle {
                band: entry.band.clone(),
                theta_deg: entry.theta_deg,
                phi_deg: entry.phi_deg,
                detail: "θ must lie in [0, 90]".into(),
            });
        }
        if !(0.0..360.0).contains(&entry.phi_deg) {
            issues.push(ValidationIssue::BadAngle {
                band: entry.band.clone(),
                theta_deg: entry.theta_deg,
                phi_deg: entry.phi_deg,
                detail: "φ must lie in [0, 360)".into(),
            });
        }
        let key = SweepKey::new(&entry.band, entry.scenario, entry.theta_deg, entry.phi_deg);
        if !seen.insert(key) {
            issues.push(ValidationIssue::DuplicateEntry {
                band: entry.band.clone(),
                scenario: entry.scenario,
                theta_deg: entry.theta_deg,
                phi_deg: entry.phi_deg,
            });
        }
    }

    // every target angle needs a background; every band needs a sphere,
    // and the sphere's own angle needs a background for its subtraction
    for entry in &manifest.entries {
        if entry.scenario != Scenario::Target || !band_names.contains(&entry.band) {
            continue;
        }
        let bg = SweepKey::new(
            &entry.band,
            Scenario::Background,
            entry.theta_deg,
            entry.phi_deg,
        );
        if !seen.contains(&bg) {
            issues.push(ValidationIssue::MissingBackground {
                band: entry.band.clone(),
                theta_deg: entry.theta_deg,
                phi_deg: entry.phi_deg,
            });
        }
    }
    for band in &manifest.bands {
        let spheres: Vec<&SweepEntry> = manifest
            .entries
            .iter()
            .filter(|e| e.scenario == Scenario::Sphere && e.band == band.name)
            .collect();
        if spheres.is_empty() {
            issues.push(ValidationIssue::MissingSphere {
                band: band.name.clone(),
            });
            continue;
        }
        for sphere in spheres {
            let bg = SweepKey::new(
                &band.name,
                Scenario::Background,
                sphere.theta_deg,
                sphere.phi_deg,
            );
            if !seen.contains(&bg) {
                issues.push(ValidationIssue::MissingSphereBackground {
                    band: band.name.clone(),
                    theta_deg: sphere.theta_deg,
                    phi_deg: sphere.phi_deg,
                });
            }
        }
    }
    issues
}

impl Campaign {
    pub fn manifest(&self) -> &CampaignManifest {
        &self.manifest
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn band(&self, name: &str) -> Result<&BandSpec, IngestError> {
        self.manifest
            .bands
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| IngestError::UnknownBand(name.to_string()))
    }

    /// Target (θ, φ) pairs for a band, sorted by θ then φ.
    pub fn target_angles(&self, band: &str) -> Vec<(f64, f64)> {
        let mut angles: Vec<(f64, f64)> = self
            .manifest
            .entries
            .iter()
            .filter(|e| e.scenario == Scenario::Target && e.band == band)
            .map(|e| (e.theta_deg, e.phi_deg))
            .collect();
        angles.sort_by_key(|&(t, p)| (angle_key(t), angle_key(p)));
        angles
    }

    /// The band's sphere entry used for calibration (the angularly first
    /// one when several exist).
    pub fn sphere_angle(&self, band: &str) -> Option<(f64, f64)> {
        self.manifest
            .entries
            .iter()
            .filter(|e| e.scenario == Scenario::Sphere && e.band == band)
            .map(|e| (e.theta_deg, e.phi_deg))
            .min_by_key(|&(t, p)| (angle_key(t), angle_key(p)))
    }

    pub fn sweep(
        &self,
        band: &str,
        scenario: Scenario,
        theta_deg: f64,
        phi_deg: f64,
    ) -> Option<&FrequencySweep> {
        self.sweeps
            .get(&SweepKey::new(band, scenario, theta_deg, phi_deg))
    }

    /// Assemble the measurement set for one (band, θ, φ): target and
    /// background at the angle, plus the band's sphere measurement and the
    /// background at the sphere's own angle.
    pub fn triple(
        &self,
        band: &str,
        theta_deg: f64,
        phi_deg: f64,
    ) -> Result<MeasurementTriple, IngestError> {
        self.band(band)?;
        let missing = |scenario: &'static str, t: f64, p: f64| IngestError::MissingEntry {
            band: band.to_string(),
            theta_deg: t,
            phi_deg: p,
            scenario,
        };
        let target = self
            .sweep(band, Scenario::Target, theta_deg, phi_deg)
            .ok_or_else(|| missing("target", theta_deg, phi_deg))?;
        let background = self
            .sweep(band, Scenario::Background, theta_deg, phi_deg)
            .ok_or_else(|| missing("background", theta_deg, phi_deg))?;
        let (st, sp) = self
            .sphere_angle(band)
            .ok_or_else(|| missing("sphere", 0.0, 0.0))?;
        let sphere = self
            .sweep(band, Scenario::Sphere, st, sp)
            .ok_or_else(|| missing("sphere", st, sp))?;
        let sphere_background = self
            .sweep(band, Scenario::Background, st, sp)
            .ok_or_else(|| missing("sphere background", st, sp))?;
        MeasurementTriple::new(
            target.clone(),
            background.clone(),
            sphere.clone(),
            sphere_background.clone(),
        )
        .map_err(|e| IngestError::Schema(e.to_string()))
    }

    /// Calibration constants from the manifest's sphere and target blocks.
    pub fn calibration_context(&self) -> CalibrationContext {
        CalibrationContext::new(
            self.manifest.sphere.radius_m,
            self.manifest.target.distance_m,
            self.manifest.sphere.distance_m,
        )
        .expect("manifest distances validated at load")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_touchstone_s1p;
    use num_complex::Complex64;

    fn write_sweep_file(dir: &Path, name: &str, grid: FrequencyGrid, scale: f64) {
        let samples: Vec<Complex64> = (0..grid.n_samples())
            .map(|i| Complex64::new(scale * (i as f64 * 0.1).cos(), scale * (i as f64 * 0.1).sin()))
            .collect();
        let sweep = FrequencySweep::new(grid, samples, SweepLabel::Target).unwrap();
        std::fs::write(dir.join(name), write_touchstone_s1p(&sweep)).unwrap();
    }

    fn base_manifest() -> CampaignManifest {
        CampaignManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            campaign_id: "unit".into(),
            mirror_azimuth: false,
            bands: vec![BandSpec {
                name: "b1".into(),
                f_start_hz: 10e9,
                f_stop_hz: 11e9,
                n_samples: 5,
                antenna_hpbw_deg: 25.0,
            }],
            sphere: SphereSpec {
                radius_m: 0.15,
                distance_m: 5.0,
            },
            target: TargetSpec {
                name: "box".into(),
                height_m: 0.4,
                width_m: 0.6,
                length_m: 0.7,
                distance_m: 5.0,
                environment: Environment::Indoor,
            },
            entries: Vec::new(),
        }
    }

    /// Campaign with θ ∈ {0, 10} and φ ∈ 0..=180 step 10 plus sphere files.
    fn populate(dir: &Path, manifest: &mut CampaignManifest) {
        let grid = manifest.bands[0].grid().unwrap();
        for theta in [0.0, 10.0] {
            for k in 0..19 {
                let phi = 10.0 * k as f64;
                for scenario in [Scenario::Target, Scenario::Background] {
                    let name = format!("{scenario}_t{theta}_p{phi}.s1p");
                    write_sweep_file(dir, &name, grid, 1.0);
                    manifest.entries.push(SweepEntry {
                        band: "b1".into(),
                        theta_deg: theta,
                        phi_deg: phi,
                        scenario,
                        path: name,
                    });
                }
            }
        }
        write_sweep_file(dir, "sphere.s1p", grid, 0.5);
        manifest.entries.push(SweepEntry {
            band: "b1".into(),
            theta_deg: 0.0,
            phi_deg: 0.0,
            scenario: Scenario::Sphere,
            path: "sphere.s1p".into(),
        });
    }

    fn save(dir: &Path, manifest: &CampaignManifest) -> PathBuf {
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(manifest).unwrap()).unwrap();
        path
    }

    #[test]
    fn full_campaign_loads_and_resolves_triples() {
        let tmp = tempfile::tempdir().unwrap();
        let mut manifest = base_manifest();
        populate(tmp.path(), &mut manifest);
        let campaign = load_campaign(&save(tmp.path(), &manifest)).unwrap();
        let angles = campaign.target_angles("b1");
        assert_eq!(angles.len(), 2 * 19);
        for (theta, phi) in angles {
            let triple = campaign.triple("b1", theta, phi).unwrap();
            assert_eq!(triple.target().label(), SweepLabel::Target);
            assert_eq!(triple.sphere().label(), SweepLabel::Sphere);
        }
    }

    #[test]
    fn missing_sphere_is_reported() {
        let tmp = tempfile::tempdir().unwrap();
        let mut manifest = base_manifest();
        populate(tmp.path(), &mut manifest);
        manifest.entries.retain(|e| e.scenario != Scenario::Sphere);
        match load_campaign(&save(tmp.path(), &manifest)) {
            Err(IngestError::Validation(issues)) => {
                assert!(issues
                    .iter()
                    .any(|i| matches!(i, ValidationIssue::MissingSphere { band } if band == "b1")));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn missing_background_names_the_angle() {
        let tmp = tempfile::tempdir().unwrap();
        let mut manifest = base_manifest();
        populate(tmp.path(), &mut manifest);
        manifest
            .entries
            .retain(|e| !(e.scenario == Scenario::Background && e.phi_deg == 40.0 && e.theta_deg == 10.0));
        match load_campaign(&save(tmp.path(), &manifest)) {
            Err(IngestError::Validation(issues)) => {
                assert!(issues.iter().any(|i| matches!(
                    i,
                    ValidationIssue::MissingBackground { band, theta_deg, phi_deg }
                        if band == "b1" && *theta_deg == 10.0 && *phi_deg == 40.0
                )));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn point_count_mismatch_is_a_consistency_error() {
        let tmp = tempfile::tempdir().unwrap();
        let mut manifest = base_manifest();
        manifest.bands[0].n_samples = 2001;
        let grid = FrequencyGrid::new(10e9, 11e9, 2000).unwrap(); // one row short
        write_sweep_file(tmp.path(), "target.s1p", grid, 1.0);
        write_sweep_file(tmp.path(), "background.s1p", grid, 1.0);
        write_sweep_file(tmp.path(), "sphere.s1p", grid, 1.0);
        for (scenario, path) in [
            (Scenario::Target, "target.s1p"),
            (Scenario::Background, "background.s1p"),
            (Scenario::Sphere, "sphere.s1p"),
        ] {
            manifest.entries.push(SweepEntry {
                band: "b1".into(),
                theta_deg: 0.0,
                phi_deg: 0.0,
                scenario,
                path: path.into(),
            });
        }
        match load_campaign(&save(tmp.path(), &manifest)) {
            Err(IngestError::Validation(issues)) => {
                assert!(
                    issues
                        .iter()
                        .any(|i| matches!(i, ValidationIssue::FileError { detail, .. }
                            if detail.contains("2001") && detail.contains("2000"))),
                    "issues: {issues:?}"
                );
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_entries_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let mut manifest = base_manifest();
        populate(tmp.path(), &mut manifest);
        let dup = manifest.entries[0].clone();
        manifest.entries.push(dup);
        assert!(matches!(
            load_campaign(&save(tmp.path(), &manifest)),
            Err(IngestError::Validation(_))
        ));
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let mut manifest = base_manifest();
        populate(tmp.path(), &mut manifest);
        manifest.schema_version = 99;
        assert!(matches!(
            load_campaign(&save(tmp.path(), &manifest)),
            Err(IngestError::Schema(_))
        ));
    }
}
