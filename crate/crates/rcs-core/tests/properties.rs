//! Property tests for the spectral primitives, parsers, calibration and
//! planning math.

use num_complex::Complex64;
use proptest::prelude::*;

use rcs_core::analysis::RcsGrid;
use rcs_core::geometry::{
    far_field_distance, footprint_distance, plan_measurement, AntennaSpec,
};
use rcs_core::ingest::parse_touchstone_s1p;
use rcs_core::pipeline::{band_average_rcs, calibrate, CalibrationContext};
use rcs_core::sweep::{
    to_frequency_domain, to_time_domain, FrequencyGrid, FrequencySweep, SweepLabel, WindowKind,
    WindowSpec,
};

const N: usize = 64;

fn grid() -> FrequencyGrid {
    FrequencyGrid::new(8e9, 12e9, N).unwrap()
}

fn sweep_of(values: &[(f64, f64)]) -> FrequencySweep {
    let samples = values
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    FrequencySweep::new(grid(), samples, SweepLabel::Target).unwrap()
}

fn complex_vec() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), N)
}

proptest! {
    #[test]
    fn transform_is_linear(v1 in complex_vec(), v2 in complex_vec(),
                           a_re in -2.0..2.0f64, a_im in -2.0..2.0f64,
                           b_re in -2.0..2.0f64, b_im in -2.0..2.0f64) {
        let a = Complex64::new(a_re, a_im);
        let b = Complex64::new(b_re, b_im);
        let w = WindowSpec::new(WindowKind::Hann, N).unwrap();
        let s1 = sweep_of(&v1);
        let s2 = sweep_of(&v2);
        let mixed: Vec<(f64, f64)> = v1.iter().zip(&v2).map(|(&(r1, i1), &(r2, i2))| {
            let v = a * Complex64::new(r1, i1) + b * Complex64::new(r2, i2);
            (v.re, v.im)
        }).collect();
        let t_mixed = to_time_domain(&sweep_of(&mixed), &w, 2).unwrap();
        let t1 = to_time_domain(&s1, &w, 2).unwrap();
        let t2 = to_time_domain(&s2, &w, 2).unwrap();
        let scale = 1.0 + a.norm() + b.norm();
        for (k, v) in t_mixed.samples().iter().enumerate() {
            let want = a * t1.samples()[k] + b * t2.samples()[k];
            prop_assert!((v - want).norm() <= 1e-10 * scale,
                "bin {k}: {v} vs {want}");
        }
    }

    #[test]
    fn shift_theorem_moves_the_peak(tau_cells in 2.0..50.0f64) {
        // a pure delay τ lands the padded-profile peak within one bin
        let g = grid();
        let tau = tau_cells / g.bandwidth_hz();
        let samples: Vec<(f64, f64)> = (0..N).map(|i| {
            let phase = -2.0 * std::f64::consts::PI * g.frequency_hz(i) * tau;
            (phase.cos(), phase.sin())
        }).collect();
        let w = WindowSpec::new(WindowKind::Rectangular, N).unwrap();
        let profile = to_time_domain(&sweep_of(&samples), &w, 4).unwrap();
        let peak = (0..profile.len())
            .max_by(|&a, &b| profile.samples()[a].norm().total_cmp(&profile.samples()[b].norm()))
            .unwrap();
        let err = (profile.time_s(peak) - tau).abs();
        prop_assert!(err <= profile.dt_s() * (N as f64 / (N - 1) as f64),
            "peak off by {err} s (dt {})", profile.dt_s());
    }

    #[test]
    fn rectangular_round_trip_is_exact(values in complex_vec(), pad in 1usize..5) {
        let s = sweep_of(&values);
        let w = WindowSpec::new(WindowKind::Rectangular, N).unwrap();
        let profile = to_time_domain(&s, &w, pad).unwrap();
        let back = to_frequency_domain(&profile, s.grid(), s.label()).unwrap();
        for (a, b) in back.samples().iter().zip(s.samples()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn touchstone_encodings_agree(values in proptest::collection::vec(
        ((-0.97..0.97f64), (-0.97..0.97f64)), 8)) {
        // the same physical samples through RI, MA and DB encodings parse
        // to within 1e−6 of each other
        let mut ri = String::from("# Hz S RI R 50\n");
        let mut ma = String::from("# Hz S MA R 50\n");
        let mut db = String::from("# Hz S DB R 50\n");
        for (i, &(re, im)) in values.iter().enumerate() {
            let f = 1.0e9 + i as f64 * 1.0e8;
            let c = Complex64::new(re, im).max(1e-6);
            let (mag, deg) = (c.norm().max(1e-6), c.arg().to_degrees());
            ri.push_str(&format!("{f} {} {}\n", c.re, c.im));
            ma.push_str(&format!("{f} {mag:.15e} {deg:.15e}\n"));
            db.push_str(&format!("{f} {:.15e} {deg:.15e}\n", 20.0 * mag.log10()));
        }
        let s_ri = parse_touchstone_s1p(ri.as_bytes()).unwrap();
        let s_ma = parse_touchstone_s1p(ma.as_bytes()).unwrap();
        let s_db = parse_touchstone_s1p(db.as_bytes()).unwrap();
        for i in 0..8 {
            // MA/DB encodings lose the exact cartesian form; RI is exact
            let mag = s_ri.samples()[i].norm();
            if mag > 1e-5 {
                prop_assert!((s_ri.samples()[i] - s_ma.samples()[i]).norm() <= 1e-6);
                prop_assert!((s_ri.samples()[i] - s_db.samples()[i]).norm() <= 1e-6);
            }
        }
    }

    #[test]
    fn smooth_system_response_cancels_in_calibration(
        c1 in -0.5..0.5f64, c2 in -0.5..0.5f64, c3 in -0.5..0.5f64, c4 in -0.5..0.5f64) {
        // multiplying both gated channels by any nonvanishing smooth G(f)
        // leaves the calibrated spectrum unchanged
        let g = grid();
        let ctx = CalibrationContext::new(0.15, 7.5, 5.0).unwrap();
        let target: Vec<Complex64> = (0..N).map(|i| {
            Complex64::from_polar(0.02, -(i as f64) * 0.21)
        }).collect();
        let sphere: Vec<Complex64> = (0..N).map(|i| {
            Complex64::from_polar(0.011, -(i as f64) * 0.13 + 0.4)
        }).collect();
        let gf: Vec<Complex64> = (0..N).map(|i| {
            let u = 2.0 * (i as f64 / (N - 1) as f64) - 1.0;
            (Complex64::new(c1, c2) * u + Complex64::new(c3, c4) * u * u).exp()
        }).collect();
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            v.iter().zip(&gf).map(|(a, b)| a * b).collect()
        };
        let plain = calibrate(
            &FrequencySweep::new(g, target.clone(), SweepLabel::Target).unwrap(),
            &FrequencySweep::new(g, sphere.clone(), SweepLabel::Sphere).unwrap(),
            &ctx,
        ).unwrap();
        let shaped = calibrate(
            &FrequencySweep::new(g, apply(&target), SweepLabel::Target).unwrap(),
            &FrequencySweep::new(g, apply(&sphere), SweepLabel::Sphere).unwrap(),
            &ctx,
        ).unwrap();
        let rel = (band_average_rcs(&shaped) / band_average_rcs(&plain) - 1.0).abs();
        prop_assert!(rel < 1e-9, "relative change {rel:.3e}");
        for (a, b) in shaped.sqrt_sigma().iter().zip(plain.sqrt_sigma()) {
            prop_assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-12));
        }
    }

    #[test]
    fn far_field_grows_with_frequency(d in 0.01..0.5f64, f1 in 1e9..35e9f64, df in 1e8..5e9f64) {
        let ant = AntennaSpec::new(d, 25.0).unwrap();
        let lo = far_field_distance(&ant, f1).unwrap();
        let hi = far_field_distance(&ant, f1 + df).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn footprint_shrinks_with_beamwidth_grows_with_width(
        w in 0.1..5.0f64, margin in 0.0..0.5f64, hpbw in 5.0..120.0f64) {
        let base = footprint_distance(w, margin, hpbw).unwrap();
        let wider_beam = footprint_distance(w, margin, hpbw + 10.0).unwrap();
        let wider_target = footprint_distance(w * 1.5, margin, hpbw).unwrap();
        prop_assert!(wider_beam < base);
        prop_assert!(wider_target > base);
    }

    #[test]
    fn planned_distance_dominates_both_bounds(
        d in 0.01..0.6f64, hpbw in 5.0..120.0f64, f in 1e9..40e9f64,
        w in 0.1..5.0f64, margin in 0.0..0.5f64, theta in 0.0..89.0f64) {
        let ant = AntennaSpec::new(d, hpbw).unwrap();
        let plan = plan_measurement(&ant, f, w, margin, theta).unwrap();
        let far = far_field_distance(&ant, f).unwrap();
        let foot = footprint_distance(w, margin, hpbw).unwrap();
        prop_assert!(plan.distance_m >= far - 1e-12);
        prop_assert!(plan.distance_m >= foot - 1e-12);
        let slant = (plan.antenna_height_m.powi(2) + plan.ground_standoff_m.powi(2)).sqrt();
        prop_assert!((slant - plan.distance_m).abs() <= 1e-12 * plan.distance_m);
    }

    #[test]
    fn grid_csv_round_trips_values(values in proptest::collection::vec(-40.0..20.0f64, 12)) {
        let grid = RcsGrid {
            band_label: "b".into(),
            theta_values: vec![0.0, 10.0],
            phi_values: (0..6).map(|k| 10.0 * k as f64).collect(),
            rcs_dbsm: vec![values[..6].to_vec(), values[6..].to_vec()],
            mask: vec![vec![true; 6]; 2],
        };
        let back = RcsGrid::from_csv("b", &grid.to_csv()).unwrap();
        for (ra, rb) in back.rcs_dbsm.iter().zip(&grid.rcs_dbsm) {
            for (a, b) in ra.iter().zip(rb) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}

trait ComplexClamp {
    fn max(self, floor: f64) -> Complex64;
}

impl ComplexClamp for Complex64 {
    /// Push tiny samples away from the origin so MA/DB encodings stay
    /// representable.
    fn max(self, floor: f64) -> Complex64 {
        if self.norm() < floor {
            Complex64::new(floor, 0.0)
        } else {
            self
        }
    }
}
