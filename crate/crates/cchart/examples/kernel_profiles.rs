//! Slice the phase-insensitive similarity kernel along its two axes. The
//! radial cut is a Dirichlet kernel over the subcarrier grid: unit peak,
//! first null at c/B, and a full replica at c/delta_f that caps the usable
//! radial extent. The angular cut follows the array response. Writes the
//! two-panel plot as an SVG next to the terminal output.

use cchart::plot::{angular_profile, kernel_profile_svg, radial_profile};
use cchart::{ArrayGeometry, SystemConfig};

const C: f64 = 299_792_458.0;

fn main() {
    let config = SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Uca { na: 64, radius: 0.42 })
        .expect("parameters are valid");
    let null = C / config.bandwidth();
    let replica = C / config.delta_f;
    println!("first radial null  c/B       = {null:.3} m");
    println!("radial replica     c/delta_f = {replica:.3} m");
    println!();

    // Sample the radial cut on a coarse grid around the anchor.
    let dr: Vec<f64> = (0..=24).map(|i| i as f64 * replica / 24.0).collect();
    let prof = radial_profile(&config, 300.0, &dr);
    println!("{:>10} {:>12}", "dr [m]", "similarity");
    for (d, s) in dr.iter().zip(&prof) {
        let bar = "#".repeat((s * 40.0).round() as usize);
        println!("{d:>10.1} {s:>12.6}  {bar}");
    }
    println!();

    // The same anchor never matches a user 90 degrees away.
    let dt = [0.0, 0.05, 0.3, std::f64::consts::FRAC_PI_2];
    let prof = angular_profile(&config, 0.0, &dt);
    println!("{:>10} {:>12}", "dth [rad]", "similarity");
    for (d, s) in dt.iter().zip(&prof) {
        println!("{d:>10.3} {s:>12.6}");
    }

    let svg = kernel_profile_svg(&config, 300.0, 0.0).expect("profile is plottable");
    let path = std::env::temp_dir().join("cchart_kernel_profiles.svg");
    std::fs::write(&path, svg).expect("temp dir is writable");
    println!("\nwrote {}", path.display());
}
