//! Channel charting for line-of-sight multicarrier multiantenna systems.
//!
//! The pipeline goes from a system description (carrier, subcarrier grid,
//! antenna array) to a two-dimensional chart of user positions:
//!
//! 1. [`channel`] synthesizes narrowband LoS channel vectors over a
//!    frequency-antenna grid and samples user positions in annular regions.
//! 2. [`kernels`] provides the phase-insensitive similarity/distance, its
//!    radial and angular factors, side-lobe thresholds, and lobe widths.
//! 3. [`design`] turns those kernels into identifiability checks and
//!    parameter design rules (bandwidth, array radius, user density).
//! 4. [`graph`] and [`charting`] build thresholded neighbor graphs, run
//!    shortest-path geodesics, and embed them with classical MDS.
//! 5. [`metrics`] scores charts against ground truth (trustworthiness,
//!    continuity, Kruskal stress).
//! 6. [`experiments`] packages the reference scenarios and ablations;
//!    [`io`] and [`plot`] handle datasets, manifests, and SVG figures.
//!
//! The `cchart` binary exposes the same functionality as subcommands
//! (`design`, `synth`, `chart`, `eval`, `plot`, `reproduce`).

pub mod channel;
pub mod charting;
pub mod cli;
pub mod design;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod kernels;
pub mod metrics;
pub mod plot;
pub mod special;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub use channel::{
    sample_ues, steering_vector, synth_channel, ArrayGeometry, ChannelVector, PolarPosition,
    RegionSpec, SystemConfig,
};
pub use charting::{classical_mds, procrustes_align, run_pipeline, Chart, PipelineOptions};
pub use design::{design, AreaSpec, DesignConstraints, IdentifiabilityReport};
pub use kernels::{pi_distance, pi_similarity, similarity_threshold, DistanceMatrix};
pub use metrics::{continuity, kruskal_stress, trustworthiness, MetricsReport};
