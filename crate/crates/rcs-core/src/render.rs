//! Deterministic SVG renderers for the analysis products: RCS heatmaps,
//! ΔRCS histograms with their Gaussian fit, and range–azimuth images in
//! rectangular and polar form.
//!
//! All numbers are written with fixed precision so a rerun over the same
//! data produces byte-identical files.

use crate::analysis::{GaussianFit, Histogram, RangeAzimuthImage, RcsGrid};

const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 86.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 46.0;
const PLOT_W: f64 = 540.0;
const PLOT_H: f64 = 300.0;

/// Perceptual dark-to-bright color ramp (inferno-like), `t ∈ [0, 1]`.
fn color(t: f64) -> String {
    const STOPS: [(f64, [u8; 3]); 7] = [
        (0.00, [0, 0, 4]),
        (0.17, [40, 11, 84]),
        (0.34, [101, 21, 110]),
        (0.51, [159, 42, 99]),
        (0.68, [212, 72, 66]),
        (0.85, [245, 125, 21]),
        (1.00, [252, 255, 164]),
    ];
    let t = t.clamp(0.0, 1.0);
    let mut rgb = STOPS[0].1;
    for pair in STOPS.windows(2) {
        let (t0, c0) = pair[0];
        let (t1, c1) = pair[1];
        if t >= t0 && t <= t1 {
            let f = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            rgb = [
                (c0[0] as f64 + f * (c1[0] as f64 - c0[0] as f64)).round() as u8,
                (c0[1] as f64 + f * (c1[1] as f64 - c0[1] as f64)).round() as u8,
                (c0[2] as f64 + f * (c1[2] as f64 - c0[2] as f64)).round() as u8,
            ];
            break;
        }
    }
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">\n"
    )
}

fn text(x: f64, y: f64, anchor: &str, size: f64, content: &str) -> String {
    format!(
        "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" font-size=\"{size:.0}\">{content}</text>\n"
    )
}

fn finite_min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn color_bar(out: &mut String, lo: f64, hi: f64, unit: &str) {
    let x = MARGIN_L + PLOT_W + 18.0;
    let w = 14.0;
    let steps = 40;
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let y = MARGIN_T + PLOT_H * (1.0 - (i + 1) as f64 / steps as f64);
        out.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{c}\"/>\n",
            h = PLOT_H / steps as f64 + 0.5,
            c = color(t)
        ));
    }
    out.push_str(&text(
        x + w + 4.0,
        MARGIN_T + 10.0,
        "start",
        11.0,
        &format!("{hi:.1}"),
    ));
    out.push_str(&text(
        x + w + 4.0,
        MARGIN_T + PLOT_H,
        "start",
        11.0,
        &format!("{lo:.1}"),
    ));
    out.push_str(&text(
        x + w + 4.0,
        MARGIN_T + PLOT_H / 2.0,
        "start",
        11.0,
        unit,
    ));
}

/// Heatmap of an [`RcsGrid`]: azimuth on x, elevation on y, dBsm as color.
/// Mirrored cells get a small corner notch; absent cells are gray.
pub fn heatmap_svg(grid: &RcsGrid, title: &str) -> String {
    let width = MARGIN_L + PLOT_W + MARGIN_R;
    let height = MARGIN_T + PLOT_H + MARGIN_B;
    let mut out = svg_open(width, height);
    out.push_str(&text(width / 2.0, 20.0, "middle", 13.0, title));
    let (lo, hi) = finite_min_max(grid.rcs_dbsm.iter().flatten().copied());
    let n_phi = grid.phi_values.len() as f64;
    let n_theta = grid.theta_values.len() as f64;
    let cw = PLOT_W / n_phi;
    let ch = PLOT_H / n_theta;
    for (i, _) in grid.theta_values.iter().enumerate() {
        for (j, _) in grid.phi_values.iter().enumerate() {
            let v = grid.rcs_dbsm[i][j];
            let fill = if v.is_finite() {
                color((v - lo) / (hi - lo))
            } else {
                "#c8c8c8".to_string()
            };
            let x = MARGIN_L + j as f64 * cw;
            let y = MARGIN_T + PLOT_H - (i + 1) as f64 * ch;
            out.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>\n",
                w = cw + 0.2,
                h = ch + 0.2
            ));
            if !grid.mask[i][j] && v.is_finite() {
                out.push_str(&format!(
                    "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"1.3\" fill=\"#ffffff\" opacity=\"0.7\"/>\n",
                    cx = x + cw - 3.0,
                    cy = y + 3.0
                ));
            }
        }
    }
    let phi_tick = (n_phi as usize / 9).max(1);
    for (j, phi) in grid.phi_values.iter().enumerate().step_by(phi_tick) {
        let x = MARGIN_L + (j as f64 + 0.5) * cw;
        out.push_str(&text(
            x,
            MARGIN_T + PLOT_H + 16.0,
            "middle",
            11.0,
            &format!("{phi}"),
        ));
    }
    for (i, theta) in grid.theta_values.iter().enumerate() {
        let y = MARGIN_T + PLOT_H - (i as f64 + 0.5) * ch + 4.0;
        out.push_str(&text(MARGIN_L - 8.0, y, "end", 11.0, &format!("{theta}")));
    }
    out.push_str(&text(
        MARGIN_L + PLOT_W / 2.0,
        MARGIN_T + PLOT_H + 34.0,
        "middle",
        12.0,
        "azimuth φ (deg)",
    ));
    out.push_str(&text(16.0, MARGIN_T + PLOT_H / 2.0, "middle", 12.0, "θ"));
    color_bar(&mut out, lo, hi, "dBsm");
    out.push_str("</svg>\n");
    out
}

/// Histogram with its fitted Gaussian overlaid as a density curve.
pub fn histogram_svg(hist: &Histogram, fit: &GaussianFit, title: &str) -> String {
    let width = MARGIN_L + PLOT_W + MARGIN_R;
    let height = MARGIN_T + PLOT_H + MARGIN_B;
    let mut out = svg_open(width, height);
    out.push_str(&text(width / 2.0, 20.0, "middle", 13.0, title));
    let x_lo = hist.edges[0];
    let x_hi = *hist.edges.last().unwrap();
    let n: usize = hist.counts.iter().sum();
    let densities: Vec<f64> = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let w = hist.edges[i + 1] - hist.edges[i];
            c as f64 / (n as f64 * w)
        })
        .collect();
    let peak_pdf = if fit.sigma_db > 0.0 { fit.pdf(fit.mu_db) } else { 0.0 };
    let y_max = densities
        .iter()
        .copied()
        .fold(peak_pdf, f64::max)
        .max(1e-12)
        * 1.08;
    let to_x = |v: f64| MARGIN_L + (v - x_lo) / (x_hi - x_lo) * PLOT_W;
    let to_y = |d: f64| MARGIN_T + PLOT_H * (1.0 - (d / y_max).min(1.0));
    for (i, d) in densities.iter().enumerate() {
        let x0 = to_x(hist.edges[i]);
        let x1 = to_x(hist.edges[i + 1]);
        let y = to_y(*d);
        out.push_str(&format!(
            "<rect x=\"{x0:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"#7aa6c2\" stroke=\"#40617a\" stroke-width=\"0.6\"/>\n",
            w = (x1 - x0).max(0.1),
            h = MARGIN_T + PLOT_H - y
        ));
    }
    if fit.sigma_db > 0.0 {
        let mut d = String::from("M");
        for i in 0..=200 {
            let x = x_lo + (x_hi - x_lo) * i as f64 / 200.0;
            d.push_str(&format!(" {:.2} {:.2}", to_x(x), to_y(fit.pdf(x))));
        }
        out.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.8\"/>\n"
        ));
    }
    for k in 0..=6 {
        let v = x_lo + (x_hi - x_lo) * k as f64 / 6.0;
        out.push_str(&text(
            to_x(v),
            MARGIN_T + PLOT_H + 16.0,
            "middle",
            11.0,
            &format!("{v:.1}"),
        ));
    }
    out.push_str(&text(
        MARGIN_L + PLOT_W / 2.0,
        MARGIN_T + PLOT_H + 34.0,
        "middle",
        12.0,
        "ΔRCS (dB)",
    ));
    out.push_str(&text(
        MARGIN_L + PLOT_W - 6.0,
        MARGIN_T + 14.0,
        "end",
        12.0,
        &format!("μ = {:.2} dB, σ = {:.2} dB, n = {}", fit.mu_db, fit.sigma_db, fit.n_samples),
    ));
    out.push_str("</svg>\n");
    out
}

fn magnitude_db_limits(image: &RangeAzimuthImage) -> (f64, f64) {
    let peak = image
        .magnitude
        .iter()
        .flatten()
        .copied()
        .fold(0.0f64, f64::max);
    let hi = if peak > 0.0 {
        20.0 * peak.log10()
    } else {
        0.0
    };
    (hi - 60.0, hi)
}

fn magnitude_t(v: f64, lo_db: f64, hi_db: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    ((20.0 * v.log10() - lo_db) / (hi_db - lo_db)).clamp(0.0, 1.0)
}

/// Rectangular range–azimuth image: φ on x, target-centered range on y,
/// |√σ| in dB as color over a 60 dB span.
pub fn range_azimuth_svg(image: &RangeAzimuthImage, title: &str) -> String {
    let width = MARGIN_L + PLOT_W + MARGIN_R;
    let height = MARGIN_T + PLOT_H + MARGIN_B;
    let mut out = svg_open(width, height);
    out.push_str(&text(width / 2.0, 20.0, "middle", 13.0, title));
    let (lo_db, hi_db) = magnitude_db_limits(image);
    let n_phi = image.phi_axis_deg.len() as f64;
    let n_r = image.range_axis_m.len() as f64;
    let cw = PLOT_W / n_phi;
    let ch = PLOT_H / n_r;
    for (i, _) in image.range_axis_m.iter().enumerate() {
        for (j, _) in image.phi_axis_deg.iter().enumerate() {
            let t = magnitude_t(image.magnitude[i][j], lo_db, hi_db);
            let x = MARGIN_L + j as f64 * cw;
            let y = MARGIN_T + PLOT_H - (i + 1) as f64 * ch;
            out.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{c}\"/>\n",
                w = cw + 0.2,
                h = ch + 0.2,
                c = color(t)
            ));
        }
    }
    let phi_tick = (image.phi_axis_deg.len() / 9).max(1);
    for (j, phi) in image.phi_axis_deg.iter().enumerate().step_by(phi_tick) {
        out.push_str(&text(
            MARGIN_L + (j as f64 + 0.5) * cw,
            MARGIN_T + PLOT_H + 16.0,
            "middle",
            10.0,
            &format!("{phi:.0}"),
        ));
    }
    let r_ticks = 6;
    for k in 0..=r_ticks {
        let idx = ((n_r - 1.0) * k as f64 / r_ticks as f64).round() as usize;
        let y = MARGIN_T + PLOT_H - (idx as f64 + 0.5) * ch + 4.0;
        out.push_str(&text(
            MARGIN_L - 8.0,
            y,
            "end",
            10.0,
            &format!("{:.2}", image.range_axis_m[idx]),
        ));
    }
    out.push_str(&text(
        MARGIN_L + PLOT_W / 2.0,
        MARGIN_T + PLOT_H + 34.0,
        "middle",
        12.0,
        "azimuth φ (deg)",
    ));
    out.push_str(&text(14.0, MARGIN_T + PLOT_H / 2.0, "middle", 12.0, "m"));
    color_bar(&mut out, lo_db, hi_db, "dB");
    out.push_str("</svg>\n");
    out
}

/// Polar range–azimuth image: each (range, φ) cell drawn as an annular
/// sector at its azimuth, radius mapped from the centered range axis.
pub fn range_azimuth_polar_svg(image: &RangeAzimuthImage, title: &str) -> String {
    let size = 560.0;
    let cx = size / 2.0;
    let cy = size / 2.0 + 10.0;
    let r_max_px = size / 2.0 - 50.0;
    let mut out = svg_open(size, size + 20.0);
    out.push_str(&text(size / 2.0, 22.0, "middle", 13.0, title));
    let (lo_db, hi_db) = magnitude_db_limits(image);
    let r_lo = image.range_axis_m[0];
    let r_hi = *image.range_axis_m.last().unwrap();
    let to_px = |r: f64| (r - r_lo) / (r_hi - r_lo) * r_max_px;
    let n_phi = image.phi_axis_deg.len();
    // azimuth bin edges halfway between samples, wrapped ends clamped
    let phi_edge = |j: usize| -> f64 {
        if j == 0 {
            image.phi_axis_deg[0] - (image.phi_axis_deg[1] - image.phi_axis_deg[0]) / 2.0
        } else if j == n_phi {
            let d = image.phi_axis_deg[n_phi - 1] - image.phi_axis_deg[n_phi - 2];
            image.phi_axis_deg[n_phi - 1] + d / 2.0
        } else {
            (image.phi_axis_deg[j - 1] + image.phi_axis_deg[j]) / 2.0
        }
    };
    for (i, _) in image.range_axis_m.iter().enumerate() {
        let r0 = if i == 0 {
            to_px(image.range_axis_m[0])
        } else {
            to_px((image.range_axis_m[i - 1] + image.range_axis_m[i]) / 2.0)
        };
        let r1 = if i + 1 == image.range_axis_m.len() {
            to_px(image.range_axis_m[i])
        } else {
            to_px((image.range_axis_m[i] + image.range_axis_m[i + 1]) / 2.0)
        };
        if r1 <= r0 {
            continue;
        }
        for j in 0..n_phi {
            let t = magnitude_t(image.magnitude[i][j], lo_db, hi_db);
            if t <= 0.0 {
                continue;
            }
            let a0 = phi_edge(j).to_radians();
            let a1 = phi_edge(j + 1).to_radians();
            let (s0, c0) = a0.sin_cos();
            let (s1, c1) = a1.sin_cos();
            // φ = 0 points up, clockwise positive
            let p = |r: f64, s: f64, c: f64| (cx + r * s, cy - r * c);
            let (x00, y00) = p(r0, s0, c0);
            let (x01, y01) = p(r1, s0, c0);
            let (x11, y11) = p(r1, s1, c1);
            let (x10, y10) = p(r0, s1, c1);
            out.push_str(&format!(
                "<path d=\"M {x00:.2} {y00:.2} L {x01:.2} {y01:.2} A {r1:.2} {r1:.2} 0 0 1 {x11:.2} {y11:.2} \
                 L {x10:.2} {y10:.2} A {r0:.2} {r0:.2} 0 0 0 {x00:.2} {y00:.2} Z\" fill=\"{c}\"/>\n",
                c = color(t)
            ));
        }
    }
    for k in 0..=4 {
        let r = r_lo + (r_hi - r_lo) * k as f64 / 4.0;
        let rp = to_px(r);
        out.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{rp:.2}\" fill=\"none\" \
             stroke=\"#999999\" stroke-width=\"0.5\" stroke-dasharray=\"3 3\"/>\n"
        ));
        out.push_str(&text(
            cx + 4.0,
            cy - rp - 3.0,
            "start",
            9.0,
            &format!("{r:.2} m"),
        ));
    }
    out.push_str("</svg>\n");
    out
}
