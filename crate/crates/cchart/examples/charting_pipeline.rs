//! End-to-end chart: sample users in an annular sector, synthesize their
//! channels, build the thresholded neighbor graph, run geodesics plus
//! classical MDS, and score the embedding against the true positions.
//!
//! The chart lives in an arbitrary rotated/reflected frame, so the final
//! step aligns it to the ground truth with a similarity Procrustes fit
//! before printing coordinates side by side.

use cchart::metrics::evaluate;
use cchart::{
    procrustes_align, run_pipeline, sample_ues, synth_channel, ArrayGeometry, PipelineOptions,
    RegionSpec, SystemConfig,
};

fn main() {
    let config = SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Uca { na: 64, radius: 0.42 })
        .expect("parameters are valid");

    // Dense enough that the neighbor graph stays connected: 300 users over
    // a patch roughly 100 m x 100 m.
    let region = RegionSpec::new(250.0, 350.0, -0.17, 0.17).expect("region is valid");
    let positions = sample_ues(&region, 300, 42);
    let channels: Vec<_> = positions.iter().map(|p| synth_channel(&config, p)).collect();

    let run = run_pipeline(&channels, &config, &PipelineOptions::default())
        .expect("graph is connected");
    println!("charted {} of {} users ({} excluded as off-component)",
        run.included.len(),
        positions.len(),
        run.excluded);
    println!("graph: {} edges, mean degree {:.2}", run.graph_edges, run.mean_degree);
    println!("leading MDS eigenvalues: {:?}",
        run.chart.eigenvalues.iter().take(4).map(|l| (l / run.chart.eigenvalues[0] * 1e3).round() / 1e3).collect::<Vec<_>>());
    println!();

    // Ground truth for the charted subset, in meters.
    let truth: Vec<[f64; 2]> = run.included.iter().map(|&i| positions[i].cartesian()).collect();
    let aligned = procrustes_align(&run.chart, &truth).expect("chart is nondegenerate").points;

    let report = evaluate(&truth, &aligned, None).expect("inputs are consistent");
    println!("trustworthiness {:.4}  continuity {:.4}  stress {:.4}  (k = {})",
        report.tw, report.ct, report.ks, report.k_neighbors);
    println!();

    println!("{:>20} {:>20} {:>10}", "truth [m]", "chart [m]", "error [m]");
    for (t, c) in truth.iter().zip(&aligned).take(8) {
        let err = ((t[0] - c[0]).powi(2) + (t[1] - c[1]).powi(2)).sqrt();
        println!("{:>9.2},{:>9.2} {:>9.2},{:>9.2} {:>10.2}", t[0], t[1], c[0], c[1], err);
    }

    let rmse = (truth
        .iter()
        .zip(&aligned)
        .map(|(t, c)| (t[0] - c[0]).powi(2) + (t[1] - c[1]).powi(2))
        .sum::<f64>()
        / truth.len() as f64)
        .sqrt();
    println!("{:>41} {:>10.2}", "rmse", rmse);
}
