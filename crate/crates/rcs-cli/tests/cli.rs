//! CLI behavior: golden outputs, exit codes, error listings, overrides,
//! and the acquire workflow against the mock instrument.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use rcs_core::analysis::{build_rcs_grid, RcsGrid};
use rcs_core::ingest::{load_campaign, Scenario};
use rcs_core::pipeline::{extract_rcs, ExtractionRecord, GateParams};
use rcs_core::sweep::{FrequencyGrid, FrequencySweep, SweepLabel};
use rcs_core::vna::{mock_server, FaultMode};
use rcs_core::dbsm;

fn rcs_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcs"))
}

fn run(args: &[&str]) -> Output {
    rcs_bin().args(args).output().unwrap()
}

fn scene_json(dir: &Path) -> PathBuf {
    let path = dir.join("scene.json");
    let scene = serde_json::json!({
        "schema_version": 1,
        "campaign": {
            "campaign_id": "cli-test",
            "target": {
                "name": "box", "height_m": 0.4, "width_m": 0.6, "length_m": 0.7,
                "distance_m": 5.0, "environment": "indoor"
            },
            "sphere": { "radius_m": 0.15, "distance_m": 5.0 },
            "body_scatterers": [
                { "offset_m": [0.2, 0.0], "sigma_m2": 0.5 },
                { "offset_m": [-0.15, 0.1], "sigma_m2": 0.25, "phase_offset_rad": 1.0 }
            ],
            "clutter_scatterers": [
                { "sigma_m2": 0.8, "distance_m": 2.5, "phase_offset_rad": 0.3 }
            ],
            "system_response": { "kind": "log_polynomial", "coeffs": [[0.1, 0.05], [0.2, -0.1]] },
            "noise_rms": 1e-6,
            "seed": 31415
        },
        "thetas_deg": [0.0, 10.0],
        "phis_deg": (0..19).map(|k| 10.0 * k as f64).collect::<Vec<_>>(),
        "bands": [
            { "name": "b1", "f_start_hz": 10.0e9, "f_stop_hz": 14.0e9,
              "n_samples": 201, "antenna_hpbw_deg": 16.0 }
        ]
    });
    std::fs::write(&path, serde_json::to_string_pretty(&scene).unwrap()).unwrap();
    path
}

fn synth_campaign(dir: &Path) -> PathBuf {
    let scene = scene_json(dir);
    let campaign = dir.join("campaign");
    let out = run(&[
        "synth",
        "--scene",
        scene.to_str().unwrap(),
        "--out",
        campaign.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    campaign.join("manifest.json")
}

#[test]
fn extract_matches_library_grid_within_1e6_db() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let out_dir = dir.path().join("out");
    let out = run(&[
        "extract",
        "--band",
        "b1",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let cli_grid = RcsGrid::from_csv(
        "b1",
        &std::fs::read_to_string(out_dir.join("rcs_grid_b1.csv")).unwrap(),
    )
    .unwrap();

    // the same campaign through the library is the golden reference
    let campaign = load_campaign(&manifest).unwrap();
    let params = GateParams::new(0.7); // max target dimension
    let records: Vec<ExtractionRecord> = campaign
        .target_angles("b1")
        .into_iter()
        .map(|(theta, phi)| {
            let triple = campaign.triple("b1", theta, phi).unwrap();
            let out = extract_rcs(&triple, &campaign.calibration_context(), &params).unwrap();
            ExtractionRecord {
                band: "b1".into(),
                theta_deg: theta,
                phi_deg: phi,
                rcs_m2: out.rcs_m2,
                rcs_dbsm: dbsm(out.rcs_m2),
                gate: out.diagnostics.target_gate,
                diagnostics: out.diagnostics,
            }
        })
        .collect();
    let golden = build_rcs_grid(&records, false).unwrap();
    assert_eq!(cli_grid.phi_values, golden.phi_values);
    for (row_a, row_b) in cli_grid.rcs_dbsm.iter().zip(&golden.rcs_dbsm) {
        for (a, b) in row_a.iter().zip(row_b) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn missing_sphere_file_fails_validation_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let sphere_file = dir.path().join("campaign/sweeps/b1/sphere_t0_p0.s1p");
    std::fs::remove_file(&sphere_file).unwrap();
    let out = run(&[
        "extract",
        "--band",
        "b1",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("sphere_t0_p0.s1p") && stderr.contains("b1"),
        "stderr: {stderr}"
    );
}

#[test]
fn gate_span_override_is_echoed_in_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let out_dir = dir.path().join("out");
    let out = run(&[
        "extract",
        "--band",
        "b1",
        "--gate-span",
        "2.2e-8",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records: Vec<ExtractionRecord> = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("records_b1.json")).unwrap(),
    )
    .unwrap();
    for r in &records {
        assert!(r.diagnostics.span_overridden);
        assert!((r.gate.span_s - 2.2e-8).abs() < 1e-20);
    }
}

#[test]
fn unknown_theta_lists_available_elevations() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let out = run(&[
        "range-image",
        "--band",
        "b1",
        "--theta",
        "33",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("33"), "stderr: {stderr}");
    assert!(stderr.contains("0°") && stderr.contains("10°"), "stderr: {stderr}");
}

#[test]
fn interpolation_modes_share_measured_columns() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let mut csvs = Vec::new();
    for interp in ["nearest", "linear"] {
        let out_dir = dir.path().join(format!("out_{interp}"));
        let out = run(&[
            "range-image",
            "--band",
            "b1",
            "--theta",
            "0",
            "--interp",
            interp,
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        csvs.push(std::fs::read_to_string(out_dir.join("range_azimuth_b1_t0.csv")).unwrap());
    }
    let parse = |text: &str| -> (Vec<f64>, Vec<Vec<String>>) {
        let mut lines = text.lines();
        let header: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .skip(1)
            .map(|v| v.parse().unwrap())
            .collect();
        let rows: Vec<Vec<String>> = lines
            .map(|l| l.split(',').skip(1).map(str::to_string).collect())
            .collect();
        (header, rows)
    };
    let (phi_a, rows_a) = parse(&csvs[0]);
    let (phi_b, rows_b) = parse(&csvs[1]);
    assert_eq!(phi_a, phi_b);
    for (j, phi) in phi_a.iter().enumerate() {
        if (phi / 10.0).fract().abs() > 1e-9 {
            continue; // interpolated column, allowed to differ
        }
        for (ra, rb) in rows_a.iter().zip(&rows_b) {
            assert_eq!(ra[j], rb[j], "measured column φ={phi} differs");
        }
    }
}

fn scripted_sweep(n: usize) -> FrequencySweep {
    let grid = FrequencyGrid::new(10e9, 14e9, n).unwrap();
    let samples: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(0.01 * (i as f64 * 0.3).sin(), 0.01 * (i as f64 * 0.2).cos()))
        .collect();
    FrequencySweep::new(grid, samples, SweepLabel::Target).unwrap()
}

#[test]
fn acquire_appends_sweeps_that_reload_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let sweep = scripted_sweep(201);
    let server = mock_server(vec![sweep.clone()], FaultMode::None).unwrap();
    let port = server.port().to_string();
    // background first so the campaign stays valid, then the target
    for slot in ["background", "target"] {
        let out = run(&[
            "acquire",
            "--host",
            "127.0.0.1",
            "--port",
            &port,
            "--band",
            "b1",
            "--theta",
            "0",
            "--phi",
            "190",
            "--slot",
            slot,
            "--manifest",
            manifest.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    server.shutdown();
    let campaign = load_campaign(&manifest).unwrap();
    let acquired = campaign.sweep("b1", Scenario::Target, 0.0, 190.0).unwrap();
    assert_eq!(acquired.samples(), sweep.samples());
    assert!(dir
        .path()
        .join("campaign/sweeps/b1/target_t0_p190.s1p")
        .exists());
}

#[test]
fn faulted_acquire_leaves_manifest_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let before = std::fs::read(&manifest).unwrap();
    let server = mock_server(vec![scripted_sweep(201)], FaultMode::Disconnect).unwrap();
    let out = run(&[
        "acquire",
        "--host",
        "127.0.0.1",
        "--port",
        &server.port().to_string(),
        "--band",
        "b1",
        "--theta",
        "0",
        "--phi",
        "200",
        "--slot",
        "background",
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    server.shutdown();
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(std::fs::read(&manifest).unwrap(), before);
    assert!(!dir
        .path()
        .join("campaign/sweeps/b1/background_t0_p200.s1p")
        .exists());
}

#[test]
fn point_count_mismatch_errors_before_any_write() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_campaign(dir.path());
    let before = std::fs::read(&manifest).unwrap();
    // instrument scripted with fewer points than the band expects
    let server = mock_server(vec![scripted_sweep(200)], FaultMode::None).unwrap();
    let out = run(&[
        "acquire",
        "--host",
        "127.0.0.1",
        "--port",
        &server.port().to_string(),
        "--band",
        "b1",
        "--theta",
        "0",
        "--phi",
        "210",
        "--slot",
        "background",
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    server.shutdown();
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("201") && stderr.contains("200"), "stderr: {stderr}");
    assert_eq!(std::fs::read(&manifest).unwrap(), before);
    assert!(!dir
        .path()
        .join("campaign/sweeps/b1/background_t0_p210.s1p")
        .exists());
}

#[test]
fn plan_emits_json_when_asked() {
    let out = run(&[
        "plan",
        "--aperture",
        "0.1",
        "--hpbw",
        "25",
        "--freq",
        "28e9",
        "--width",
        "1.734",
        "--margin",
        "0.1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let plan: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((plan["distance_m"].as_f64().unwrap() - 4.3619).abs() < 1e-3);
    assert_eq!(plan["constraint_binding"], "footprint");
}
