//! Static SVG figures: chart scatters colored by ground-truth azimuth,
//! similarity heatmaps around a reference UE, and kernel profile panels.
//!
//! Output is plain text assembled with fixed-precision formatting, so a
//! figure is a pure function of its inputs and reruns are byte-identical.

use std::fmt::Write as _;

use thiserror::Error;

use crate::channel::{
    frequency_signature, steering_vector, synth_channel, PolarPosition, RegionSpec, SystemConfig,
};
use crate::kernels::{pi_similarity, similarity_threshold, KernelError};

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("point and color lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("heatmap needs at least 2x2 cells, got {0}")]
    TooFewCells(usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

const CANVAS: f64 = 720.0;
const MARGIN: f64 = 48.0;

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    );
}

fn svg_title(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<text x=\"{:.0}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        CANVAS / 2.0
    );
}

/// Hue wheel over the azimuth circle: -pi and +pi map to the same color, so
/// the circular coordinate reads as circular on the figure.
fn azimuth_color(theta: f64) -> String {
    let hue = (theta + std::f64::consts::PI) / (2.0 * std::f64::consts::PI) * 360.0;
    format!("hsl({hue:.1},72%,46%)")
}

/// Two-stop perceptual ramp from dark violet to yellow for values in
/// [0, 1].
fn heat_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| a + (b - a) * t;
    format!("rgb({:.0},{:.0},{:.0})", lerp(13.0, 240.0), lerp(8.0, 249.0), lerp(135.0, 33.0))
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    top: f64,
    side: f64,
}

impl Frame {
    /// Uniform-scale mapping from data bounds onto the canvas, flipping y
    /// so larger data values sit higher on the figure.
    fn fit(points: &[[f64; 2]]) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let pad = 0.05 * span;
        let scale = (CANVAS - 2.0 * MARGIN) / (span + 2.0 * pad);
        Frame {
            x0: lo[0] - pad,
            y0: lo[1] - pad,
            scale,
            top: MARGIN,
            side: MARGIN,
        }
    }

    fn x(&self, x: f64) -> f64 {
        self.side + (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        CANVAS - self.top - (y - self.y0) * self.scale
    }
}

/// Chart scatter, one dot per embedded point, colored by the matching
/// ground-truth azimuth.
pub fn scatter_chart_svg(
    points: &[[f64; 2]],
    azimuths: &[f64],
    title: &str,
) -> Result<String, PlotError> {
    if points.is_empty() {
        return Err(PlotError::Empty);
    }
    if points.len() != azimuths.len() {
        return Err(PlotError::LengthMismatch(points.len(), azimuths.len()));
    }
    let frame = Frame::fit(points);
    let mut out = String::new();
    svg_open(&mut out, CANVAS, CANVAS);
    svg_title(&mut out, title);
    for (p, &az) in points.iter().zip(azimuths) {
        let _ = write!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.85\"/>\n",
            frame.x(p[0]),
            frame.y(p[1]),
            azimuth_color(az),
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// PI similarity between a fixed reference UE and every cell center of a
/// Cartesian grid over the region's bounding box. Row-major, `cells` per
/// side, row 0 at the lowest y.
pub fn similarity_grid(
    config: &SystemConfig,
    reference: &PolarPosition,
    region: &RegionSpec,
    cells: usize,
) -> Result<(Vec<f64>, [f64; 4]), PlotError> {
    if cells < 2 {
        return Err(PlotError::TooFewCells(cells));
    }
    // Bounding box of the polar region in Cartesian coordinates, from the
    // corner points plus the axis extremes the arc sweeps through.
    let mut xs = vec![];
    let mut ys = vec![];
    for &r in &[region.r_min, region.r_max] {
        for &t in &[region.theta_min, region.theta_max] {
            xs.push(r * t.cos());
            ys.push(r * t.sin());
        }
    }
    let crosses = |direction: f64| {
        (-1..=1).any(|k| {
            let t = direction + 2.0 * std::f64::consts::PI * k as f64;
            t >= region.theta_min && t <= region.theta_max
        })
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    if crosses(0.0) {
        xs.push(region.r_max);
    }
    if crosses(std::f64::consts::PI) {
        xs.push(-region.r_max);
    }
    if crosses(half_pi) {
        ys.push(region.r_max);
    }
    if crosses(-half_pi) {
        ys.push(-region.r_max);
    }
    let x_lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let h_ref = synth_channel(config, reference);
    let mut grid = Vec::with_capacity(cells * cells);
    for row in 0..cells {
        let y = y_lo + (y_hi - y_lo) * (row as f64 + 0.5) / cells as f64;
        for col in 0..cells {
            let x = x_lo + (x_hi - x_lo) * (col as f64 + 0.5) / cells as f64;
            let r = (x * x + y * y).sqrt();
            let s = if r < 1e-9 {
                0.0
            } else {
                let h = synth_channel(config, &PolarPosition::new(r, y.atan2(x)));
                pi_similarity(&h_ref, &h)?
            };
            grid.push(s);
        }
    }
    Ok((grid, [x_lo, x_hi, y_lo, y_hi]))
}

/// Similarity heatmap figure with the reference UE marked.
pub fn similarity_heatmap_svg(
    config: &SystemConfig,
    reference: &PolarPosition,
    region: &RegionSpec,
    cells: usize,
    title: &str,
) -> Result<String, PlotError> {
    let (grid, [x_lo, x_hi, y_lo, y_hi]) = similarity_grid(config, reference, region, cells)?;
    let frame = Frame::fit(&[[x_lo, y_lo], [x_hi, y_hi]]);
    let cell_w = (x_hi - x_lo) / cells as f64;
    let cell_h = (y_hi - y_lo) / cells as f64;
    let mut out = String::new();
    svg_open(&mut out, CANVAS, CANVAS);
    svg_title(&mut out, title);
    for row in 0..cells {
        for col in 0..cells {
            let s = grid[row * cells + col];
            let x = x_lo + cell_w * col as f64;
            let y = y_lo + cell_h * (row + 1) as f64;
            let _ = write!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
                frame.x(x),
                frame.y(y),
                cell_w * frame.scale + 0.5,
                cell_h * frame.scale + 0.5,
                heat_color(s),
            );
        }
    }
    let rp = reference.cartesian();
    let _ = write!(
        out,
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"none\" stroke=\"red\" \
         stroke-width=\"2\"/>\n",
        frame.x(rp[0]),
        frame.y(rp[1]),
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Magnitude of the normalized radial factor between `r_ref` and
/// `r_ref + dr`, evaluated through the actual frequency signatures so the
/// profile is exact for any configuration.
pub fn radial_profile(config: &SystemConfig, r_ref: f64, dr: &[f64]) -> Vec<f64> {
    let f_ref = frequency_signature(config, r_ref);
    dr.iter()
        .map(|&d| {
            let f = frequency_signature(config, r_ref + d);
            inner_magnitude(&f_ref, &f)
        })
        .collect()
}

/// Magnitude of the normalized angular factor between `theta_ref` and
/// `theta_ref + dt`, through the unit-norm steering vectors.
pub fn angular_profile(config: &SystemConfig, theta_ref: f64, dt: &[f64]) -> Vec<f64> {
    let a_ref = steering_vector(config, theta_ref);
    dt.iter()
        .map(|&d| {
            let a = steering_vector(config, theta_ref + d);
            inner_magnitude(&a_ref, &a)
        })
        .collect()
}

fn inner_magnitude(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<num_complex::Complex64>().norm()
}

fn profile_panel(
    out: &mut String,
    xs: &[f64],
    ys: &[f64],
    y_top: f64,
    height: f64,
    threshold: f64,
    label: &str,
) {
    let x_lo = xs[0];
    let x_hi = xs[xs.len() - 1];
    let px = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (CANVAS - 2.0 * MARGIN);
    let py = |y: f64| y_top + (1.0 - y.clamp(0.0, 1.0)) * height;
    let _ = write!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>\n",
        MARGIN,
        y_top,
        CANVAS - 2.0 * MARGIN,
        height,
    );
    let _ = write!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" \
         stroke-dasharray=\"5,4\"/>\n",
        MARGIN,
        py(threshold),
        CANVAS - MARGIN,
        py(threshold),
    );
    out.push_str("<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"");
    for (x, y) in xs.iter().zip(ys) {
        let _ = write!(out, "{:.2},{:.2} ", px(*x), py(*y));
    }
    out.push_str("\"/>\n");
    let _ = write!(
        out,
        "<text x=\"{:.0}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\">{label}</text>\n",
        MARGIN,
        y_top - 8.0,
    );
}

/// Two-panel kernel profile: the radial factor against range offset (top)
/// and the angular factor against azimuth offset (bottom), with the
/// sufficient-condition threshold as a dashed line on both.
pub fn kernel_profile_svg(
    config: &SystemConfig,
    r_ref: f64,
    theta_ref: f64,
) -> Result<String, PlotError> {
    let (t_sim, _) = similarity_threshold(config)?;

    // Radial range covers the central lobe, the side lobes, and both
    // first-order ambiguity replicas at +-c/delta_f.
    let period = crate::SPEED_OF_LIGHT / config.delta_f;
    let n_r = 1601;
    let dr: Vec<f64> = (0..n_r)
        .map(|i| -1.1 * period + 2.2 * period * i as f64 / (n_r - 1) as f64)
        .collect();
    let radial = radial_profile(config, r_ref, &dr);

    let half_span = match config.array {
        // A ULA only sees the half-plane; stay inside it.
        crate::channel::ArrayGeometry::Ula { .. } => {
            (std::f64::consts::FRAC_PI_2 - theta_ref.abs()).min(std::f64::consts::FRAC_PI_2) * 0.98
        }
        _ => std::f64::consts::PI,
    };
    let n_t = 1201;
    let dt: Vec<f64> =
        (0..n_t).map(|i| -half_span + 2.0 * half_span * i as f64 / (n_t - 1) as f64).collect();
    let angular = angular_profile(config, theta_ref, &dt);

    let mut out = String::new();
    svg_open(&mut out, CANVAS, CANVAS);
    svg_title(&mut out, "kernel profiles");
    let panel_h = (CANVAS - 2.0 * MARGIN - 90.0) / 2.0;
    profile_panel(
        &mut out,
        &dr,
        &radial,
        70.0,
        panel_h,
        t_sim,
        &format!("radial factor at r = {r_ref} m (offset in m)"),
    );
    profile_panel(
        &mut out,
        &dt,
        &angular,
        70.0 + panel_h + 60.0,
        panel_h,
        t_sim,
        &format!("angular factor at theta = {theta_ref} rad (offset in rad)"),
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ArrayGeometry;

    fn base_config() -> SystemConfig {
        SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Uca { na: 64, radius: 0.42 }).unwrap()
    }

    #[test]
    fn scatter_is_deterministic_and_complete() {
        let points = vec![[0.0, 0.0], [1.0, 2.0], [-3.0, 1.0]];
        let az = vec![-1.0, 0.0, 2.5];
        let a = scatter_chart_svg(&points, &az, "chart").unwrap();
        let b = scatter_chart_svg(&points, &az, "chart").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<circle").count(), 3);
        assert!(a.contains("chart"));

        assert!(matches!(scatter_chart_svg(&[], &[], "x"), Err(PlotError::Empty)));
        assert!(matches!(
            scatter_chart_svg(&points, &az[..2], "x"),
            Err(PlotError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn heatmap_peaks_at_the_reference() {
        let config = base_config();
        let reference = PolarPosition::new(300.0, 0.2);
        let region = RegionSpec::new(250.0, 350.0, -0.3, 0.7).unwrap();
        let cells = 33;
        let (grid, [x_lo, x_hi, y_lo, y_hi]) =
            similarity_grid(&config, &reference, &region, cells).unwrap();
        let (best, _) = grid
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .unwrap();
        let rp = reference.cartesian();
        let col = ((rp[0] - x_lo) / (x_hi - x_lo) * cells as f64).floor() as usize;
        let row = ((rp[1] - y_lo) / (y_hi - y_lo) * cells as f64).floor() as usize;
        assert_eq!(best, row.min(cells - 1) * cells + col.min(cells - 1));

        let svg = similarity_heatmap_svg(&config, &reference, &region, cells, "s").unwrap();
        let again = similarity_heatmap_svg(&config, &reference, &region, cells, "s").unwrap();
        assert_eq!(svg, again);
        assert_eq!(svg.matches("<rect").count(), cells * cells + 1);
    }

    #[test]
    fn profiles_have_unit_peak_and_ambiguity_replicas() {
        let config = base_config();
        let dr = [0.0, crate::SPEED_OF_LIGHT / config.bandwidth(), 479.66];
        let radial = radial_profile(&config, 300.0, &dr);
        assert!((radial[0] - 1.0).abs() < 1e-12);
        assert!(radial[1] < 1e-12, "null at c/B, got {}", radial[1]);

        // The replica at c/delta_f has unit magnitude again.
        let replica = radial_profile(&config, 300.0, &[crate::SPEED_OF_LIGHT / config.delta_f]);
        assert!((replica[0] - 1.0).abs() < 1e-12);

        let dt = [0.0, std::f64::consts::PI];
        let angular = angular_profile(&config, 0.3, &dt);
        assert!((angular[0] - 1.0).abs() < 1e-12);
        assert!(angular[1] < 0.3);
    }

    #[test]
    fn kernel_profile_svg_is_deterministic() {
        let config = base_config();
        let a = kernel_profile_svg(&config, 315.0, 0.0).unwrap();
        let b = kernel_profile_svg(&config, 315.0, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 2);

        let ula =
            SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Ula { na: 16, spacing: 0.5 })
                .unwrap();
        let svg = kernel_profile_svg(&ula, 315.0, 0.1).unwrap();
        assert!(svg.contains("angular factor"));
    }
}
