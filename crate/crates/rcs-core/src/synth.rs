//! Synthetic-campaign oracle: physically consistent S11 sweeps built from
//! declarative point-scatterer scenes, so every pipeline claim can be
//! checked against known ground truth.
//!
//! Each scatterer contributes `√σ/d² · exp(−j4πf·d/c + jφ)`; the sum is
//! shaped by a smooth nonzero system response `G(f)` and seeded complex
//! white noise. Background sweeps hold the clutter only, sphere sweeps
//! replace the target with a single `σ = π·R²` scatterer at the sphere
//! distance. Everything is a direct formula evaluation, independent of the
//! transform-based pipeline it is used to test.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::{
    angle_token, write_touchstone_s1p, BandSpec, CampaignManifest, Scenario, SphereSpec,
    SweepEntry, TargetSpec, MANIFEST_SCHEMA_VERSION,
};
use crate::sweep::{FrequencyGrid, FrequencySweep, SweepError, SweepLabel};
use crate::SPEED_OF_LIGHT_M_S;

/// Version expected in a scene file's `schema_version` field.
pub const SCENE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("scene: {0}")]
    InvalidScene(String),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("scene json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A single ideal point scatterer at a fixed range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointScatterer {
    pub sigma_m2: f64,
    pub distance_m: f64,
    #[serde(default)]
    pub phase_offset_rad: f64,
}

impl PointScatterer {
    fn validate(&self) -> Result<(), SynthError> {
        if !(self.sigma_m2 >= 0.0) {
            return Err(SynthError::InvalidScene(format!(
                "scatterer σ must be ≥ 0, got {}",
                self.sigma_m2
            )));
        }
        if !(self.distance_m > 0.0) {
            return Err(SynthError::InvalidScene(format!(
                "scatterer distance must be > 0, got {}",
                self.distance_m
            )));
        }
        Ok(())
    }
}

/// Smooth complex system response G(f), evaluated at the normalized band
/// position `u ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemResponse {
    Unity,
    /// `G = exp(Σ_k (c_re + j·c_im)·v^k)` with `v = 2u − 1`; never zero.
    LogPolynomial { coeffs: Vec<[f64; 2]> },
    /// Linear interpolation between complex anchor points spread evenly
    /// across the band.
    Tabulated { points: Vec<[f64; 2]> },
}

impl SystemResponse {
    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            SystemResponse::Unity => Complex64::new(1.0, 0.0),
            SystemResponse::LogPolynomial { coeffs } => {
                let v = 2.0 * u - 1.0;
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pow = 1.0;
                for c in coeffs {
                    acc += Complex64::new(c[0], c[1]) * pow;
                    pow *= v;
                }
                acc.exp()
            }
            SystemResponse::Tabulated { points } => {
                if points.len() == 1 {
                    return Complex64::new(points[0][0], points[0][1]);
                }
                let pos = u * (points.len() - 1) as f64;
                let k = (pos.floor() as usize).min(points.len() - 2);
                let t = pos - k as f64;
                let a = Complex64::new(points[k][0], points[k][1]);
                let b = Complex64::new(points[k + 1][0], points[k + 1][1]);
                a + (b - a) * t
            }
        }
    }

    fn validate(&self, grid: &FrequencyGrid) -> Result<(), SynthError> {
        match self {
            SystemResponse::Tabulated { points } if points.is_empty() => {
                return Err(SynthError::InvalidScene("tabulated G needs points".into()))
            }
            _ => {}
        }
        let n = grid.n_samples();
        for i in 0..n {
            let u = i as f64 / (n - 1) as f64;
            let g = self.eval(u);
            if !(g.re.is_finite() && g.im.is_finite()) || g.norm() < 1e-12 {
                return Err(SynthError::InvalidScene(format!(
                    "G vanishes or blows up at band position {u:.4}: {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Declarative scene: what the radar sees with and without the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScene {
    pub target_scatterers: Vec<PointScatterer>,
    /// Static environment shared by every scenario of the scene.
    pub clutter_scatterers: Vec<PointScatterer>,
    pub system_response: SystemResponse,
    pub noise_rms: f64,
    pub seed: u64,
}

impl SyntheticScene {
    fn validate(&self, grid: &FrequencyGrid) -> Result<(), SynthError> {
        for s in self.target_scatterers.iter().chain(&self.clutter_scatterers) {
            s.validate()?;
        }
        if !(self.noise_rms >= 0.0 && self.noise_rms.is_finite()) {
            return Err(SynthError::InvalidScene(format!(
                "noise_rms must be ≥ 0, got {}",
                self.noise_rms
            )));
        }
        self.system_response.validate(grid)
    }
}

fn add_scatterer(acc: &mut [Complex64], grid: &FrequencyGrid, s: &PointScatterer) {
    if s.sigma_m2 == 0.0 {
        return;
    }
    let amp = s.sigma_m2.sqrt() / (s.distance_m * s.distance_m);
    for (i, v) in acc.iter_mut().enumerate() {
        let phase = -4.0 * std::f64::consts::PI * grid.frequency_hz(i) * s.distance_m
            / SPEED_OF_LIGHT_M_S
            + s.phase_offset_rad;
        *v += Complex64::from_polar(amp, phase);
    }
}

/// Noise stream tied to (seed, scenario, grid) so every generated file is
/// independent yet exactly reproducible: the ChaCha8 key is the SHA-256 of
/// the canonical string `synth/{seed}/{scenario}/{f_start}/{f_stop}/{n}`.
fn noise_rng(seed: u64, which: Scenario, grid: &FrequencyGrid) -> ChaCha8Rng {
    let canon = format!(
        "synth/{seed}/{which}/{:x}/{:x}/{}",
        grid.f_start_hz().to_bits(),
        grid.f_stop_hz().to_bits(),
        grid.n_samples()
    );
    let digest = Sha256::digest(canon.as_bytes());
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Evaluate one scenario of a scene on a grid.
///
/// `S11(f) = G(f)·Σ_k √σ_k/d_k² · e^{−j4πf·d_k/c + jφ_k} + noise`, where
/// the sum runs over the clutter plus, depending on `which`, the target
/// scatterers or a single `σ = π·R²` sphere at the sphere distance.
/// Clutter terms are accumulated first, in declaration order, so the
/// background subtraction of a shared scene cancels them bit-for-bit.
pub fn simulate_sweep(
    scene: &SyntheticScene,
    which: Scenario,
    grid: &FrequencyGrid,
    sphere: &SphereSpec,
) -> Result<FrequencySweep, SynthError> {
    scene.validate(grid)?;
    if !(sphere.radius_m > 0.0 && sphere.distance_m > 0.0) {
        return Err(SynthError::InvalidScene(format!(
            "sphere radius {} m / distance {} m must be positive",
            sphere.radius_m, sphere.distance_m
        )));
    }
    let n = grid.n_samples();
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for s in &scene.clutter_scatterers {
        add_scatterer(&mut acc, grid, s);
    }
    match which {
        Scenario::Background => {}
        Scenario::Target => {
            for s in &scene.target_scatterers {
                add_scatterer(&mut acc, grid, s);
            }
        }
        Scenario::Sphere => {
            let s = PointScatterer {
                sigma_m2: std::f64::consts::PI * sphere.radius_m * sphere.radius_m,
                distance_m: sphere.distance_m,
                phase_offset_rad: 0.0,
            };
            add_scatterer(&mut acc, grid, &s);
        }
    }
    let mut rng = noise_rng(scene.seed, which, grid);
    let normal = Normal::new(0.0, scene.noise_rms / 2f64.sqrt()).map_err(|e| {
        SynthError::InvalidScene(format!("noise_rms {}: {e}", scene.noise_rms))
    })?;
    let samples: Vec<Complex64> = acc
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let u = i as f64 / (n - 1) as f64;
            let noisy = if scene.noise_rms > 0.0 {
                Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
            } else {
                Complex64::new(0.0, 0.0)
            };
            scene.system_response.eval(u) * v + noisy
        })
        .collect();
    let label = match which {
        Scenario::Target => SweepLabel::Target,
        Scenario::Background => SweepLabel::Background,
        Scenario::Sphere => SweepLabel::Sphere,
    };
    Ok(FrequencySweep::new(*grid, samples, label)?)
}

/// A scatterer attached to the target body, rotated with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyScatterer {
    /// Body-frame offset `[x, y]` in meters from the target center;
    /// positive `x` moves the scatterer toward the radar at φ = 0°.
    pub offset_m: [f64; 2],
    pub sigma_m2: f64,
    #[serde(default)]
    pub phase_offset_rad: f64,
    /// Per-band σ adjustment in dB, keyed by band name.
    #[serde(default)]
    pub band_gain_db: BTreeMap<String, f64>,
}

impl BodyScatterer {
    /// Line-of-sight range of the scatterer when the target sits at
    /// `distance_m` and is viewed at (θ, φ): rigid rotation about the
    /// target center, slant-projected by cos θ.
    pub fn range_at(&self, distance_m: f64, theta_deg: f64, phi_deg: f64) -> f64 {
        let phi = phi_deg.to_radians();
        let los = self.offset_m[0] * phi.cos() + self.offset_m[1] * phi.sin();
        distance_m - los * theta_deg.to_radians().cos()
    }

    fn sigma_for_band(&self, band: &str) -> f64 {
        let gain_db = self.band_gain_db.get(band).copied().unwrap_or(0.0);
        self.sigma_m2 * 10f64.powf(gain_db / 10.0)
    }
}

/// Template for a whole on-disk campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignTemplate {
    pub campaign_id: String,
    #[serde(default)]
    pub mirror_azimuth: bool,
    pub target: TargetSpec,
    pub sphere: SphereSpec,
    pub body_scatterers: Vec<BodyScatterer>,
    #[serde(default)]
    pub clutter_scatterers: Vec<PointScatterer>,
    pub system_response: SystemResponse,
    pub noise_rms: f64,
    pub seed: u64,
}

impl CampaignTemplate {
    /// The scene seen at one (band, θ, φ): body scatterers projected onto
    /// the line of sight, clutter unchanged, per-angle noise stream.
    pub fn scene_at(&self, band: &str, theta_deg: f64, phi_deg: f64) -> SyntheticScene {
        let target_scatterers = self
            .body_scatterers
            .iter()
            .map(|b| PointScatterer {
                sigma_m2: b.sigma_for_band(band),
                distance_m: b.range_at(self.target.distance_m, theta_deg, phi_deg),
                phase_offset_rad: b.phase_offset_rad,
            })
            .collect();
        SyntheticScene {
            target_scatterers,
            clutter_scatterers: self.clutter_scatterers.clone(),
            system_response: self.system_response.clone(),
            noise_rms: self.noise_rms,
            seed: angle_seed(self.seed, band, theta_deg, phi_deg),
        }
    }
}

fn angle_seed(base: u64, band: &str, theta_deg: f64, phi_deg: f64) -> u64 {
    let canon = format!(
        "angle/{base}/{band}/{}/{}",
        crate::ingest::angle_token(theta_deg),
        crate::ingest::angle_token(phi_deg)
    );
    let digest = Sha256::digest(canon.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// On-disk scene description consumed by the CLI `synth` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub schema_version: u32,
    pub campaign: CampaignTemplate,
    pub thetas_deg: Vec<f64>,
    pub phis_deg: Vec<f64>,
    pub bands: Vec<BandSpec>,
}

impl SceneFile {
    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        let scene: SceneFile = serde_json::from_str(text)?;
        if scene.schema_version != SCENE_SCHEMA_VERSION {
            return Err(SynthError::InvalidScene(format!(
                "schema_version {} unsupported (expected {SCENE_SCHEMA_VERSION})",
                scene.schema_version
            )));
        }
        Ok(scene)
    }
}

/// Generate a complete campaign on disk: one target and one background
/// sweep per (band, θ, φ), one sphere sweep per band at the first angle,
/// plus a manifest that [`crate::ingest::load_campaign`] accepts.
///
/// Returns the manifest path. Output is byte-deterministic in the
/// template seed.
pub fn generate_campaign(
    template: &CampaignTemplate,
    thetas_deg: &[f64],
    phis_deg: &[f64],
    bands: &[BandSpec],
    out_dir: &Path,
) -> Result<PathBuf, SynthError> {
    if thetas_deg.is_empty() || phis_deg.is_empty() || bands.is_empty() {
        return Err(SynthError::InvalidScene(
            "need at least one θ, one φ and one band".into(),
        ));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut entries = Vec::new();
    for band in bands {
        let grid = band
            .grid()
            .map_err(|e| SynthError::InvalidScene(e.to_string()))?;
        let band_dir = out_dir.join("sweeps").join(&band.name);
        std::fs::create_dir_all(&band_dir)?;
        let mut write = |scenario: Scenario,
                         theta: f64,
                         phi: f64,
                         sweep: &FrequencySweep|
         -> Result<(), SynthError> {
            let name = format!(
                "{scenario}_t{}_p{}.s1p",
                angle_token(theta),
                angle_token(phi)
            );
            std::fs::write(band_dir.join(&name), write_touchstone_s1p(sweep))?;
            entries.push(SweepEntry {
                band: band.name.clone(),
                theta_deg: theta,
                phi_deg: phi,
                scenario,
                path: format!("sweeps/{}/{name}", band.name),
            });
            Ok(())
        };
        for &theta in thetas_deg {
            for &phi in phis_deg {
                let scene = template.scene_at(&band.name, theta, phi);
                let target = simulate_sweep(&scene, Scenario::Target, &grid, &template.sphere)?;
                let background =
                    simulate_sweep(&scene, Scenario::Background, &grid, &template.sphere)?;
                write(Scenario::Target, theta, phi, &target)?;
                write(Scenario::Background, theta, phi, &background)?;
            }
        }
        // sphere measured once per band, at the first angle so the
        // background written above doubles as the sphere's background
        let (theta0, phi0) = (thetas_deg[0], phis_deg[0]);
        let scene = template.scene_at(&band.name, theta0, phi0);
        let sphere = simulate_sweep(&scene, Scenario::Sphere, &grid, &template.sphere)?;
        write(Scenario::Sphere, theta0, phi0, &sphere)?;
    }
    let manifest = CampaignManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        campaign_id: template.campaign_id.clone(),
        mirror_azimuth: template.mirror_azimuth,
        bands: bands.to_vec(),
        sphere: template.sphere,
        target: template.target.clone(),
        entries,
    };
    let manifest_path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&manifest_path, text)?;
    Ok(manifest_path)
}
