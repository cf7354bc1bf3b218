//! Scripted experiment reproduction: the base scenario with its three
//! single-knob variants, and the ULA-versus-UCA comparison over two areas.
//!
//! Every run is a pure function of its `ScenarioSpec`, writes its outputs
//! under a caller-chosen directory, and emits a manifest that pins every
//! resolved parameter, so reruns can be checked byte for byte.

use std::f64::consts::PI;
use std::path::Path;

use crate::channel::{sample_ues, synth_channel, ArrayGeometry, RegionSpec, SystemConfig};
use crate::charting::{procrustes_align, run_pipeline, DistanceSource, PipelineOptions};
use crate::design::{
    identifiability_report, neighborhood_axes, radial_ambiguity_bound, AreaSpec,
    IdentifiabilityReport,
};
use crate::io::{config_to_kv, format_f64, write_chart_tsv, KvFile, MANIFEST_FORMAT};
use crate::metrics::{evaluate, MetricsReport};
use crate::plot::scatter_chart_svg;

/// Which of the two scripted experiment families to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    /// Base scenario plus three variants.
    VA,
    /// ULA versus UCA over two areas.
    VB,
}

impl std::str::FromStr for Section {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim_start_matches('\u{a7}').to_ascii_lowercase().as_str() {
            "5a" | "va" | "v.a" | "a" => Ok(Section::VA),
            "5b" | "vb" | "v.b" | "b" => Ok(Section::VB),
            other => Err(format!("unknown section `{other}`; expected 5a or 5b")),
        }
    }
}

/// Single-knob deviations from the base scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VariantFlags {
    /// Skip the sufficient-condition threshold; the graph falls back to
    /// k-nearest neighbors on the raw distance.
    pub no_threshold: bool,
    /// Subcarrier spacing doubled at constant bandwidth (half the
    /// subcarriers), shrinking the unambiguous radial range below the area.
    pub double_delta_f: bool,
    /// Bandwidth reduced at constant subcarrier count, stretching the
    /// radial neighborhood axis so neighborhoods stop being round.
    pub reduced_bandwidth: bool,
}

/// A fully resolved experiment: system, area, user count, and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub config: SystemConfig,
    pub area: AreaSpec,
    pub n_ue: usize,
    pub seed: u64,
    pub flags: VariantFlags,
}

#[derive(Debug, thiserror::Error)]
#[error("scenario `{scenario}` failed during {stage}: {message}")]
pub struct ExperimentError {
    pub scenario: String,
    pub stage: &'static str,
    pub message: String,
}

fn fail(scenario: &str, stage: &'static str, err: impl std::fmt::Display) -> ExperimentError {
    ExperimentError { scenario: scenario.to_string(), stage, message: err.to_string() }
}

const BASE_N_UE: usize = 2838;
const BASE_SEED: u64 = 1;

/// The base system: UCA of 64 antennas, radius 0.42 m, carrier 3 GHz,
/// 16 subcarriers spaced 625 kHz (10 MHz bandwidth). The sampling area is
/// the full identifiable radial interval centered on the round-neighborhood
/// range, over a 2 pi / 3 front sector.
pub fn scenario_base() -> ScenarioSpec {
    let config = SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Uca { na: 64, radius: 0.42 })
        .expect("base parameters are valid");
    // gamma(r) = L_f / (L_a r) = 1 at the round-neighborhood range.
    let axes = neighborhood_axes(&config, 1.0, 0.0).expect("UCA axes are total");
    let r0 = axes.radial / axes.angular;
    let width = radial_ambiguity_bound(&config);
    let area = AreaSpec::new(r0, width, 0.0, 2.0 * PI / 3.0).expect("base area is valid");
    ScenarioSpec {
        name: "base".into(),
        config,
        area,
        n_ue: BASE_N_UE,
        seed: BASE_SEED,
        flags: VariantFlags::default(),
    }
}

/// The three scripted variants, each altering exactly one knob of the
/// base: 1) threshold off, 2) subcarrier spacing doubled at constant
/// bandwidth, 3) bandwidth halved at constant subcarrier count.
pub fn scenario_variants(base: &ScenarioSpec) -> Vec<ScenarioSpec> {
    scenario_variants_with_factor(base, 2.0)
}

/// Same as [`scenario_variants`], with the variant-3 bandwidth reduction
/// factor exposed.
pub fn scenario_variants_with_factor(base: &ScenarioSpec, factor: f64) -> Vec<ScenarioSpec> {
    assert!(factor > 1.0, "bandwidth reduction factor must exceed 1");
    assert!(base.config.ns % 2 == 0, "variant 2 halves the subcarrier count");
    let v1 = ScenarioSpec {
        name: "variant-1-no-threshold".into(),
        flags: VariantFlags { no_threshold: true, ..Default::default() },
        ..base.clone()
    };
    let v2 = ScenarioSpec {
        name: "variant-2-double-spacing".into(),
        config: SystemConfig::new(
            base.config.fc,
            2.0 * base.config.delta_f,
            base.config.ns / 2,
            base.config.array.clone(),
        )
        .expect("doubled spacing stays valid"),
        flags: VariantFlags { double_delta_f: true, ..Default::default() },
        ..base.clone()
    };
    let v3 = ScenarioSpec {
        name: "variant-3-reduced-bandwidth".into(),
        config: SystemConfig::new(
            base.config.fc,
            base.config.delta_f / factor,
            base.config.ns,
            base.config.array.clone(),
        )
        .expect("reduced bandwidth stays valid"),
        flags: VariantFlags { reduced_bandwidth: true, ..Default::default() },
        ..base.clone()
    };
    vec![v1, v2, v3]
}

/// The array-comparison experiment: a 16-antenna half-wavelength ULA
/// against the base 64-antenna UCA, over the full identifiable annulus
/// (identifiable for the UCA only) and over the ULA's maximal alias-free
/// front sector (identifiable for both, contained in the annulus).
pub fn scenario_ula_vs_uca() -> Vec<ScenarioSpec> {
    let base = scenario_base();
    let ula_config =
        SystemConfig::new(base.config.fc, base.config.delta_f, base.config.ns, ArrayGeometry::Ula {
            na: 16,
            spacing: 0.5,
        })
        .expect("comparison ULA is valid");

    let full = AreaSpec::new(base.area.r_center, base.area.radial_size, 0.0, 2.0 * PI)
        .expect("full annulus is valid");
    let ArrayGeometry::Ula { na, spacing } = ula_config.array else { unreachable!() };
    let half = (na as f64 - 1.0) / (2.0 * na as f64 * spacing);
    let contained =
        AreaSpec::new(base.area.r_center, base.area.radial_size, 0.0, 2.0 * half.asin())
            .expect("contained sector is valid");

    let spec = |name: &str, config: &SystemConfig, area: &AreaSpec| ScenarioSpec {
        name: name.into(),
        config: config.clone(),
        area: area.clone(),
        n_ue: BASE_N_UE,
        seed: BASE_SEED,
        flags: VariantFlags::default(),
    };
    vec![
        spec("vb-uca-full-annulus", &base.config, &full),
        spec("vb-ula-full-annulus", &ula_config, &full),
        spec("vb-uca-contained-sector", &base.config, &contained),
        spec("vb-ula-contained-sector", &ula_config, &contained),
    ]
}

/// Everything a finished run produced, ready to serialize.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub scenario: ScenarioSpec,
    pub report: IdentifiabilityReport,
    pub metrics: MetricsReport,
    pub included: usize,
    pub excluded: usize,
    pub graph_edges: usize,
    pub mean_degree: f64,
    pub knn_used: Option<usize>,
    /// (label, file name) pairs of the artifacts written next to the
    /// manifest.
    pub files: Vec<(String, String)>,
    pub tool_version: String,
}

impl RunManifest {
    /// Flat key-value rendering with a fixed key order; byte-stable across
    /// reruns of the same scenario.
    pub fn to_kv(&self) -> KvFile {
        let mut kv = KvFile::new();
        kv.set("format", MANIFEST_FORMAT);
        kv.set("scenario", self.scenario.name.clone());
        kv.set("tool_version", self.tool_version.clone());
        kv.set("seed", self.scenario.seed.to_string());
        kv.set("n_ue", self.scenario.n_ue.to_string());
        for (k, v) in config_to_kv(&self.scenario.config).entries() {
            if k != "format" {
                kv.set(k, v.clone());
            }
        }
        kv.set_f64("area_r_center", self.scenario.area.r_center);
        kv.set_f64("area_radial_size", self.scenario.area.radial_size);
        kv.set_f64("area_angular_center", self.scenario.area.angular_center);
        kv.set_f64("area_angular_span", self.scenario.area.angular_span);
        kv.set("thresholded", bool_text(!self.scenario.flags.no_threshold));
        if let Some(k) = self.knn_used {
            kv.set("knn", k.to_string());
        }
        kv.set_f64("similarity_threshold", self.report.similarity_threshold);
        kv.set_f64("distance_threshold", self.report.distance_threshold);
        kv.set_f64("axis_radial", self.report.axes.radial);
        kv.set_f64("axis_angular", self.report.axes.angular);
        kv.set_f64("axis_angular_arc", self.report.axes.angular_arc);
        kv.set_f64("gamma", self.report.roundness_gamma);
        kv.set_f64("min_density", self.report.min_density);
        kv.set("necessary_ok", bool_text(self.report.necessary_ok));
        if !self.report.violations.is_empty() {
            kv.set("violations", self.report.violations.join(" | "));
        }
        kv.set("included", self.included.to_string());
        kv.set("excluded", self.excluded.to_string());
        kv.set("graph_edges", self.graph_edges.to_string());
        kv.set_f64("mean_degree", self.mean_degree);
        kv.set_f64("tw", self.metrics.tw);
        kv.set_f64("ct", self.metrics.ct);
        kv.set_f64("ks", self.metrics.ks);
        kv.set("k_neighbors", self.metrics.k_neighbors.to_string());
        kv.set("n_scored", self.metrics.n_scored.to_string());
        for (label, file) in &self.files {
            kv.set(&format!("file_{label}"), file.clone());
        }
        kv
    }
}

fn bool_text(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Execute one scenario end to end: synthesize, chart, score, draw, and
/// write `<name>.chart.tsv`, `<name>.chart.svg`, `<name>.truth.svg`, and
/// `<name>.manifest.kv` under `out_dir`.
pub fn run(scenario: &ScenarioSpec, out_dir: &Path) -> Result<RunManifest, ExperimentError> {
    let name = scenario.name.as_str();

    let region = RegionSpec::new(
        scenario.area.r_min(),
        scenario.area.r_max(),
        scenario.area.theta_min(),
        scenario.area.theta_max(),
    )
    .map_err(|e| fail(name, "region setup", e))?;
    let positions = sample_ues(&region, scenario.n_ue, scenario.seed);
    let channels: Vec<_> = positions.iter().map(|p| synth_channel(&scenario.config, p)).collect();

    let report = identifiability_report(&scenario.config, &scenario.area)
        .map_err(|e| fail(name, "identifiability report", e))?;

    let options = PipelineOptions {
        source: DistanceSource::Pi,
        thresholded: !scenario.flags.no_threshold,
        knn: None,
    };
    let pipeline = run_pipeline(&channels, &scenario.config, &options)
        .map_err(|e| fail(name, "charting", e))?;

    let truth: Vec<[f64; 2]> =
        pipeline.included.iter().map(|&i| positions[i].cartesian()).collect();
    let metrics = evaluate(&truth, &pipeline.chart.points, None)
        .map_err(|e| fail(name, "metrics", e))?;

    let azimuths: Vec<f64> = pipeline.included.iter().map(|&i| positions[i].theta).collect();
    let aligned =
        procrustes_align(&pipeline.chart, &truth).map_err(|e| fail(name, "alignment", e))?;
    let chart_svg = scatter_chart_svg(
        &aligned.points,
        &azimuths,
        &format!("{name}: learned chart (aligned)"),
    )
    .map_err(|e| fail(name, "chart figure", e))?;
    let truth_svg =
        scatter_chart_svg(&truth, &azimuths, &format!("{name}: ground-truth positions"))
            .map_err(|e| fail(name, "truth figure", e))?;

    let chart_file = format!("{name}.chart.tsv");
    let chart_svg_file = format!("{name}.chart.svg");
    let truth_svg_file = format!("{name}.truth.svg");
    let manifest_file = format!("{name}.manifest.kv");
    write_chart_tsv(&out_dir.join(&chart_file), &pipeline.included, &pipeline.chart.points)
        .map_err(|e| fail(name, "chart output", e))?;
    std::fs::write(out_dir.join(&chart_svg_file), chart_svg)
        .map_err(|e| fail(name, "chart figure output", e))?;
    std::fs::write(out_dir.join(&truth_svg_file), truth_svg)
        .map_err(|e| fail(name, "truth figure output", e))?;

    let manifest = RunManifest {
        scenario: scenario.clone(),
        report,
        metrics,
        included: pipeline.included.len(),
        excluded: pipeline.excluded,
        graph_edges: pipeline.graph_edges,
        mean_degree: pipeline.mean_degree,
        knn_used: pipeline.knn_used,
        files: vec![
            ("chart".into(), chart_file),
            ("chart_svg".into(), chart_svg_file),
            ("truth_svg".into(), truth_svg_file),
        ],
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    manifest
        .to_kv()
        .write_file(&out_dir.join(&manifest_file))
        .map_err(|e| fail(name, "manifest output", e))?;
    Ok(manifest)
}

/// Run a whole section and write a metric summary table
/// (`<section>-metrics.tsv`) next to the per-run outputs.
pub fn reproduce(section: Section, out_dir: &Path) -> Result<Vec<RunManifest>, ExperimentError> {
    reproduce_with_factor(section, out_dir, 2.0)
}

/// Same as [`reproduce`], with the variant-3 bandwidth reduction factor
/// exposed (ignored by the array-comparison section).
pub fn reproduce_with_factor(
    section: Section,
    out_dir: &Path,
    factor: f64,
) -> Result<Vec<RunManifest>, ExperimentError> {
    let (label, scenarios) = match section {
        Section::VA => {
            let base = scenario_base();
            let mut all = vec![base.clone()];
            all.extend(scenario_variants_with_factor(&base, factor));
            ("va", all)
        }
        Section::VB => ("vb", scenario_ula_vs_uca()),
    };
    let manifests: Vec<RunManifest> =
        scenarios.iter().map(|s| run(s, out_dir)).collect::<Result<_, _>>()?;

    let mut table =
        String::from("# scenario\ttw\tct\tks\tk_neighbors\tincluded\texcluded\tedges\n");
    for m in &manifests {
        table.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            m.scenario.name,
            format_f64(m.metrics.tw),
            format_f64(m.metrics.ct),
            format_f64(m.metrics.ks),
            m.metrics.k_neighbors,
            m.included,
            m.excluded,
            m.graph_edges,
        ));
    }
    std::fs::write(out_dir.join(format!("{label}-metrics.tsv")), table).map_err(|e| {
        ExperimentError {
            scenario: label.to_string(),
            stage: "summary table",
            message: e.to_string(),
        }
    })?;
    Ok(manifests)
}
