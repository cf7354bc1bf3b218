//! Walk through the identifiability design rules: start from a target
//! deployment area, let `design` pick the OFDM grid and array radius, and
//! inspect the resulting report clause by clause. Then probe an area the
//! rules reject so the violation output is visible too.

use cchart::design::{identifiability_report, DesignConstraints};
use cchart::{design, AreaSpec, SystemConfig};

fn main() {
    // A ring segment 300 m out, 100 m deep, covering a 60 degree sector.
    let area = AreaSpec::new(300.0, 100.0, 0.0, std::f64::consts::FRAC_PI_3)
        .expect("area is valid");

    // Fix the carrier and the aperture; the OFDM grid is solved for.
    let constraints =
        DesignConstraints { fc: 3e9, na: None, bandwidth: None, uca_radius: Some(0.42) };
    let outcome = design(&area, &constraints).expect("area is designable");

    let cfg = &outcome.config;
    println!("proposed system for a {:.0} m x {:.0} m sector at {:.0} m:",
        area.radial_size,
        area.r_center * area.angular_span,
        area.r_center);
    println!("  carrier            {:>14.4e} Hz", cfg.fc);
    println!("  subcarrier spacing {:>14.4} Hz (guideline {:.4})",
        cfg.delta_f, outcome.delta_f_guideline);
    println!("  subcarriers        {:>14}", cfg.ns);
    println!("  bandwidth          {:>14.4e} Hz", cfg.bandwidth());
    println!("  array              {:?}", cfg.array);
    println!();

    let report = &outcome.report;
    println!("necessary condition: {}", if report.necessary_ok { "holds" } else { "violated" });
    for clause in &report.clauses {
        println!("  {:<16} {:>12.4} vs bound {:>12.4}  [{}]",
            clause.name,
            clause.actual,
            clause.bound,
            if clause.ok { "ok" } else { "VIOLATED" });
    }
    println!();
    println!("similarity threshold  {}", report.similarity_threshold);
    println!("distance threshold    {}", report.distance_threshold);
    println!("neighborhood axes     radial {:.4} m, angular arc {:.4} m",
        report.axes.radial, report.axes.angular_arc);
    println!("roundness gamma       {:.6}", report.roundness_gamma);
    println!("min user density      {:.6e} per m^2 ({:.1} users over the area)",
        report.min_density, report.min_density * area.area_m2());
    println!();

    // The same geometry pushed out to 10 km with the bandwidth pinned at
    // 10 MHz: the radial extent exceeds what the grid can disambiguate.
    let wide = AreaSpec::new(10_000.0, 19_000.0, 0.0, std::f64::consts::FRAC_PI_3)
        .expect("area is valid");
    let pinned = SystemConfig::new(3e9, 625e3, 16, cfg.array.clone()).expect("config is valid");
    let report = identifiability_report(&pinned, &wide).expect("report is total");
    println!("same system stretched to a {:.0} m radial extent:", wide.radial_size);
    for v in &report.violations {
        println!("  violation: {v}");
    }
    assert!(!report.necessary_ok);
}
