//! Run one scripted scenario end to end at reduced scale. The full
//! experiment sweeps thousands of users; this clone keeps the same system
//! and seed discipline but shrinks the area and count so it finishes in
//! seconds without optimization. Every output lands in a temp directory:
//! a chart TSV, two SVGs, and a manifest that pins down the whole run.

use cchart::experiments::{run, scenario_base, scenario_variants};

fn main() {
    let base = scenario_base();
    println!("base scenario:");
    println!("  area    [{:.1}, {:.1}] m x [{:.3}, {:.3}] rad",
        base.area.r_min(), base.area.r_max(), base.area.theta_min(), base.area.theta_max());
    println!("  users   {} (seed {})", base.n_ue, base.seed);
    println!("  system  {} subcarriers at {} Hz, {:?}",
        base.config.ns, base.config.delta_f, base.config.array);
    println!();

    println!("scripted variants (one knob each):");
    for v in scenario_variants(&base) {
        println!("  {:<22} delta_f {:>10}  ns {:>3}  threshold {}",
            v.name,
            v.config.delta_f,
            v.config.ns,
            if v.flags.no_threshold { "off" } else { "on" });
    }
    println!();

    // Shrink: same center, a tenth of the users, a narrower sector.
    let mut mini = base.clone();
    mini.name = "mini".into();
    mini.n_ue = 250;
    mini.area = cchart::AreaSpec::new(base.area.r_center, 120.0, 0.0, 0.5)
        .expect("area is valid");

    let out = std::env::temp_dir().join("cchart_scenario_run");
    std::fs::create_dir_all(&out).expect("temp dir is writable");
    let manifest = run(&mini, &out).expect("mini scenario charts");

    println!("mini run: {} charted, {} excluded, {} edges (mean degree {:.2})",
        manifest.included, manifest.excluded, manifest.graph_edges, manifest.mean_degree);
    println!("scores:   tw {:.4}  ct {:.4}  ks {:.4}",
        manifest.metrics.tw, manifest.metrics.ct, manifest.metrics.ks);
    for (kind, name) in &manifest.files {
        println!("  {kind:<9} {}", out.join(name).display());
    }
}
