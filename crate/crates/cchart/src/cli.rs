//! Command-line surface. The binary is a thin dispatcher around
//! [`run`]; every subcommand body lives here so it can be exercised as
//! library code.
//!
//! Exit codes: 0 on success, 1 for internal failures, 2 for infeasible or
//! invalid inputs.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::{sample_ues, synth_channel, PolarPosition, RegionSpec};
use crate::charting::{run_pipeline, ChartingError, DistanceSource, PipelineOptions};
use crate::design::{design, AreaSpec, DesignConstraints};
use crate::experiments::{reproduce_with_factor, Section};
use crate::io::{
    config_to_kv, format_f64, read_chart_tsv, read_config, read_dataset, write_chart_tsv,
    write_config, write_dataset, KvFile, MANIFEST_FORMAT,
};
use crate::kernels::similarity_threshold;
use crate::metrics::evaluate;
use crate::plot::{kernel_profile_svg, scatter_chart_svg, similarity_heatmap_svg};

#[derive(Debug, Parser)]
#[command(
    name = "cchart",
    version,
    about = "LoS channel charting: design rules, synthetic datasets, charts, and scores"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check identifiability rules for an area and propose a system
    Design(DesignArgs),
    /// Synthesize a dataset of LoS channel vectors
    Synth(SynthArgs),
    /// Learn a chart from a dataset
    Chart(ChartArgs),
    /// Score a chart against the dataset's ground truth
    Eval(EvalArgs),
    /// Draw an SVG figure
    Plot(PlotArgs),
    /// Re-run a scripted experiment section end to end
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Distance from the BS to the area center, meters
    #[arg(long)]
    r_center: f64,
    /// Radial width of the area, meters
    #[arg(long)]
    radial_size: f64,
    /// Azimuth of the area center, radians
    #[arg(long, default_value_t = 0.0)]
    angular_center: f64,
    /// Angular extent of the area, radians
    #[arg(long, default_value_t = 2.0 * PI)]
    angular_span: f64,
    /// Carrier frequency, Hz
    #[arg(long)]
    fc: f64,
    /// Antenna count (default 64)
    #[arg(long)]
    na: Option<usize>,
    /// Fix the bandwidth instead of solving it from roundness, Hz
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Fix the UCA radius instead of solving it from roundness, meters
    #[arg(long)]
    uca_radius: Option<f64>,
    /// Write the proposed system as a config file
    #[arg(long)]
    emit_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// System config file
    #[arg(long)]
    config: PathBuf,
    /// Inner radius of the sampling region, meters
    #[arg(long)]
    r_min: f64,
    /// Outer radius of the sampling region, meters
    #[arg(long)]
    r_max: f64,
    /// Lower azimuth, radians
    #[arg(long, allow_hyphen_values = true)]
    theta_min: f64,
    /// Upper azimuth, radians
    #[arg(long, allow_hyphen_values = true)]
    theta_max: f64,
    /// Number of UEs to draw
    #[arg(long)]
    count: usize,
    /// RNG seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output dataset path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    /// Phase-insensitive channel distance
    Pi,
    /// Euclidean distance between ground-truth positions
    EuclideanGt,
}

#[derive(Debug, Args)]
struct ChartArgs {
    /// Input dataset
    #[arg(long)]
    dataset: PathBuf,
    /// Directory for chart.tsv and chart.manifest.kv
    #[arg(long)]
    out_dir: PathBuf,
    /// Skip the sufficient-condition threshold (k-NN graph instead)
    #[arg(long)]
    no_threshold: bool,
    /// Neighbor count for the unthresholded graph
    #[arg(long)]
    knn: Option<usize>,
    /// Distance feeding the neighbor graph
    #[arg(long, value_enum, default_value_t = SourceArg::Pi)]
    source: SourceArg,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Chart coordinates (tsv)
    #[arg(long)]
    chart: PathBuf,
    /// Dataset carrying ground truth
    #[arg(long)]
    dataset: PathBuf,
    /// Neighborhood size for TW/CT (default: 5% of n)
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[command(subcommand)]
    kind: PlotKind,
}

#[derive(Debug, Subcommand)]
enum PlotKind {
    /// Chart scatter colored by ground-truth azimuth
    Scatter {
        #[arg(long)]
        chart: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "chart")]
        title: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// PI similarity around a reference UE over a spatial grid
    Heatmap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        ref_r: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        ref_theta: f64,
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta_max: f64,
        #[arg(long, default_value_t = 96)]
        cells: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Radial and angular kernel profiles at a reference position
    Profile {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        r_ref: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta_ref: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// Experiment section: 5a (base + variants) or 5b (ULA vs UCA)
    section: Section,
    /// Output directory for charts, figures, tables, and manifests
    #[arg(long)]
    out_dir: PathBuf,
    /// Bandwidth reduction factor for variant 3
    #[arg(long, default_value_t = 2.0)]
    bandwidth_factor: f64,
}

#[derive(Debug)]
enum CliError {
    /// Bad inputs or an infeasible request; exit code 2.
    Validation(String),
    /// Everything else; exit code 1.
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Internal(m) => m,
        }
    }
}

fn validation(err: impl std::fmt::Display) -> CliError {
    CliError::Validation(err.to_string())
}

fn internal(err: impl std::fmt::Display) -> CliError {
    CliError::Internal(err.to_string())
}

/// Parse-and-dispatch entry point for the binary; returns the process exit
/// code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Chart(args) => cmd_chart(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

fn cmd_design(args: DesignArgs) -> Result<(), CliError> {
    let area = AreaSpec::new(args.r_center, args.radial_size, args.angular_center, args.angular_span)
        .map_err(validation)?;
    let constraints = DesignConstraints {
        fc: args.fc,
        na: args.na,
        bandwidth: args.bandwidth,
        uca_radius: args.uca_radius,
    };
    let outcome = design(&area, &constraints).map_err(validation)?;
    let report = &outcome.report;
    let config = &outcome.config;

    println!("proposed system:");
    println!(
        "  fc = {} Hz, delta_f = {} Hz, ns = {}, bandwidth = {} Hz",
        format_f64(config.fc),
        format_f64(config.delta_f),
        config.ns,
        format_f64(config.bandwidth()),
    );
    match &config.array {
        crate::channel::ArrayGeometry::Uca { na, radius } => {
            println!("  array: UCA, {na} antennas, radius {} m", format_f64(*radius));
        }
        other => println!("  array: {other:?}"),
    }
    println!(
        "similarity threshold {} (distance threshold {})",
        format_f64(report.similarity_threshold),
        format_f64(report.distance_threshold),
    );
    println!(
        "neighborhood axes at the area center: radial {} m, angular {} rad (arc {} m)",
        format_f64(report.axes.radial),
        format_f64(report.axes.angular),
        format_f64(report.axes.angular_arc),
    );
    println!("roundness gamma = {}", format_f64(report.roundness_gamma));
    println!("minimum user density = {} per m^2", format_f64(report.min_density));
    println!(
        "subcarrier spacing: guideline c/S = {} Hz, exact bound = {} Hz",
        format_f64(outcome.delta_f_guideline),
        format_f64(outcome.delta_f_bound),
    );
    for clause in &report.clauses {
        println!(
            "  {}: actual {} vs bound {} ({})",
            clause.name,
            format_f64(clause.actual),
            format_f64(clause.bound),
            if clause.ok { "ok" } else { "VIOLATED" },
        );
    }

    // Machine-readable block after the prose.
    let mut kv = config_to_kv(config);
    kv.set_f64("similarity_threshold", report.similarity_threshold);
    kv.set_f64("distance_threshold", report.distance_threshold);
    kv.set_f64("axis_radial", report.axes.radial);
    kv.set_f64("axis_angular", report.axes.angular);
    kv.set_f64("gamma", report.roundness_gamma);
    kv.set_f64("min_density", report.min_density);
    kv.set("necessary_ok", if report.necessary_ok { "true" } else { "false" });
    println!("---");
    print!("{}", kv.render());

    if let Some(path) = args.emit_config {
        write_config(&path, config).map_err(internal)?;
        println!("wrote config to {}", path.display());
    }
    if !report.necessary_ok {
        return Err(CliError::Validation(format!(
            "necessary condition violated: {}",
            report.violations.join(" | "),
        )));
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let config = read_config(&args.config).map_err(validation)?;
    let region =
        RegionSpec::new(args.r_min, args.r_max, args.theta_min, args.theta_max)
            .map_err(validation)?;
    let positions = sample_ues(&region, args.count, args.seed);
    let channels: Vec<_> = positions.iter().map(|p| synth_channel(&config, p)).collect();
    write_dataset(&args.out, &config, &channels).map_err(internal)?;
    println!("wrote {} channels to {}", channels.len(), args.out.display());
    Ok(())
}

fn map_charting_error(err: ChartingError) -> CliError {
    match err {
        ChartingError::EmptyGraph
        | ChartingError::FragmentedGraph { .. }
        | ChartingError::MissingGroundTruth(_) => validation(err),
        other => internal(other),
    }
}

fn cmd_chart(args: ChartArgs) -> Result<(), CliError> {
    let dataset = read_dataset(&args.dataset).map_err(validation)?;
    let source = match args.source {
        SourceArg::Pi => DistanceSource::Pi,
        SourceArg::EuclideanGt => DistanceSource::EuclideanTruth,
    };
    let options = PipelineOptions { source, thresholded: !args.no_threshold, knn: args.knn };
    let pipeline = run_pipeline(&dataset.channels, &dataset.config, &options)
        .map_err(map_charting_error)?;

    std::fs::create_dir_all(&args.out_dir).map_err(internal)?;
    let chart_path = args.out_dir.join("chart.tsv");
    write_chart_tsv(&chart_path, &pipeline.included, &pipeline.chart.points)
        .map_err(internal)?;

    let mut kv = KvFile::new();
    kv.set("format", MANIFEST_FORMAT);
    kv.set("command", "chart");
    kv.set("dataset", args.dataset.display().to_string());
    for (k, v) in config_to_kv(&dataset.config).entries() {
        if k != "format" {
            kv.set(k, v.clone());
        }
    }
    kv.set("n", dataset.channels.len().to_string());
    kv.set(
        "source",
        match source {
            DistanceSource::Pi => "pi",
            DistanceSource::EuclideanTruth => "euclidean-gt",
        },
    );
    kv.set("thresholded", if options.thresholded { "true" } else { "false" });
    if source == DistanceSource::Pi {
        let (t_sim, t_dist) = similarity_threshold(&dataset.config).map_err(validation)?;
        kv.set_f64("similarity_threshold", t_sim);
        kv.set_f64("distance_threshold", t_dist);
    }
    if let Some(k) = pipeline.knn_used {
        kv.set("knn", k.to_string());
    }
    kv.set("included", pipeline.included.len().to_string());
    kv.set("excluded", pipeline.excluded.to_string());
    kv.set("graph_edges", pipeline.graph_edges.to_string());
    kv.set_f64("mean_degree", pipeline.mean_degree);
    kv.set("file_chart", "chart.tsv");
    kv.write_file(&args.out_dir.join("chart.manifest.kv")).map_err(internal)?;

    println!(
        "charted {} of {} points into {}",
        pipeline.included.len(),
        dataset.channels.len(),
        chart_path.display(),
    );
    Ok(())
}

/// Ground-truth positions for the chart's row indices, in row order.
fn truth_for_chart(
    dataset: &crate::io::Dataset,
    indices: &[usize],
) -> Result<(Vec<[f64; 2]>, Vec<f64>), CliError> {
    if !dataset.has_ground_truth() {
        return Err(CliError::Validation(
            "dataset carries no ground truth; synthesize with positions or pick another".into(),
        ));
    }
    let mut truth = Vec::with_capacity(indices.len());
    let mut azimuths = Vec::with_capacity(indices.len());
    for &idx in indices {
        let ch = dataset.channels.get(idx).ok_or_else(|| {
            CliError::Validation(format!(
                "chart row index {idx} outside the dataset (n = {})",
                dataset.channels.len(),
            ))
        })?;
        let pos = ch.position.expect("ground truth checked above");
        truth.push(pos.cartesian());
        azimuths.push(pos.theta);
    }
    Ok((truth, azimuths))
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let (indices, points) = read_chart_tsv(&args.chart).map_err(validation)?;
    let dataset = read_dataset(&args.dataset).map_err(validation)?;
    let (truth, _) = truth_for_chart(&dataset, &indices)?;
    let metrics = evaluate(&truth, &points, args.k).map_err(validation)?;

    let mut kv = KvFile::new();
    kv.set_f64("tw", metrics.tw);
    kv.set_f64("ct", metrics.ct);
    kv.set_f64("ks", metrics.ks);
    kv.set("k_neighbors", metrics.k_neighbors.to_string());
    kv.set("n_scored", metrics.n_scored.to_string());
    print!("{}", kv.render());
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    match args.kind {
        PlotKind::Scatter { chart, dataset, title, out } => {
            let (indices, points) = read_chart_tsv(&chart).map_err(validation)?;
            let dataset = read_dataset(&dataset).map_err(validation)?;
            let (_, azimuths) = truth_for_chart(&dataset, &indices)?;
            let svg = scatter_chart_svg(&points, &azimuths, &title).map_err(validation)?;
            std::fs::write(&out, svg).map_err(internal)?;
            println!("wrote {}", out.display());
        }
        PlotKind::Heatmap {
            config,
            ref_r,
            ref_theta,
            r_min,
            r_max,
            theta_min,
            theta_max,
            cells,
            out,
        } => {
            let config = read_config(&config).map_err(validation)?;
            if !(ref_r > 0.0 && ref_r.is_finite()) {
                return Err(CliError::Validation(format!(
                    "reference range must be positive, got {ref_r}"
                )));
            }
            let reference = PolarPosition::new(ref_r, ref_theta);
            let region =
                RegionSpec::new(r_min, r_max, theta_min, theta_max).map_err(validation)?;
            let svg = similarity_heatmap_svg(&config, &reference, &region, cells, "similarity")
                .map_err(validation)?;
            std::fs::write(&out, svg).map_err(internal)?;
            println!("wrote {}", out.display());
        }
        PlotKind::Profile { config, r_ref, theta_ref, out } => {
            let config = read_config(&config).map_err(validation)?;
            let svg = kernel_profile_svg(&config, r_ref, theta_ref).map_err(validation)?;
            std::fs::write(&out, svg).map_err(internal)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<(), CliError> {
    if !(args.bandwidth_factor > 1.0) {
        return Err(CliError::Validation(format!(
            "bandwidth factor must exceed 1, got {}",
            args.bandwidth_factor,
        )));
    }
    std::fs::create_dir_all(&args.out_dir).map_err(internal)?;
    let manifests = reproduce_with_factor(args.section, &args.out_dir, args.bandwidth_factor)
        .map_err(internal)?;
    for m in &manifests {
        println!(
            "{}: TW = {}, CT = {}, KS = {} (k = {}, included {} of {})",
            m.scenario.name,
            format_f64(m.metrics.tw),
            format_f64(m.metrics.ct),
            format_f64(m.metrics.ks),
            m.metrics.k_neighbors,
            m.included,
            m.scenario.n_ue,
        );
    }
    Ok(())
}
