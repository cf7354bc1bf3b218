//! Phase-insensitive channel similarity and its closed-form kernels.
//!
//! The phase-insensitive (PI) similarity of two channel vectors is
//! `s = |h1^H h2| / (|h1| |h2|)`, insensitive to per-measurement global
//! phase and scale; the induced distance is `d = sqrt(2 - 2 s)`. For LoS
//! channels the similarity factors exactly into a radial term (a Dirichlet
//! kernel over the range difference) and an angular term (a Dirichlet kernel
//! in sine-azimuth for linear arrays; a Bessel-J0 law for circular arrays).
//!
//! Thresholding the similarity at the first side-lobe level keeps only
//! comparisons inside the main lobes, where the distance is an honest local
//! proxy for geometry. This module provides the kernels, the thresholds, the
//! main-lobe widths before and after thresholding, and the pairwise distance
//! matrix builders.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

use crate::channel::{ArrayGeometry, ChannelVector, PolarPosition, SystemConfig};
use crate::graph::NeighborGraph;
use crate::special::{bessel_j0, bisect, dirichlet_kernel};
use crate::SPEED_OF_LIGHT;

/// Similarity threshold for circular arrays: the first side-lobe level of
/// the J0 angular kernel, by definition 0.403.
pub const UCA_ANGULAR_THRESHOLD: f64 = 0.403;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("channel vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("channel vector is empty")]
    EmptyVector,
    #[error("channel vector has zero norm")]
    ZeroNorm,
    #[error("operation requires a uniform linear array")]
    NotUla,
    #[error("operation requires a uniform circular array")]
    NotUca,
    #[error("no similarity threshold is defined for arbitrary array geometries")]
    UnsupportedGeometry,
    #[error(
        "array radius too small for an angular null: wavelength*{const_name}/(4 pi R) = {ratio:.3} > 1"
    )]
    ArrayTooSmall { const_name: &'static str, ratio: f64 },
    #[error("need at least 2 channels to build a distance matrix, got {0}")]
    TooFewChannels(usize),
    #[error("the {axis} kernel is degenerate: fewer than 2 samples on that axis")]
    DegenerateKernel { axis: &'static str },
}

// ---------------------------------------------------------------------------
// PI similarity and distance
// ---------------------------------------------------------------------------

/// Phase-insensitive similarity `|h1^H h2| / (|h1| |h2|)`, clamped into
/// [0, 1] (Cauchy-Schwarz bounds it mathematically; clamping absorbs the
/// last-ulp excess of self-similarity).
pub fn pi_similarity(h1: &ChannelVector, h2: &ChannelVector) -> Result<f64, KernelError> {
    if h1.entries.len() != h2.entries.len() {
        return Err(KernelError::LengthMismatch(h1.entries.len(), h2.entries.len()));
    }
    if h1.entries.is_empty() {
        return Err(KernelError::EmptyVector);
    }
    let n1 = h1.norm();
    let n2 = h2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(KernelError::ZeroNorm);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in h1.entries.iter().zip(&h2.entries) {
        acc += a.conj() * b;
    }
    Ok((acc.norm() / (n1 * n2)).clamp(0.0, 1.0))
}

/// Distance induced by the PI similarity: `sqrt(2 - 2 s)`, in [0, sqrt(2)].
pub fn pi_distance(h1: &ChannelVector, h2: &ChannelVector) -> Result<f64, KernelError> {
    Ok(similarity_to_distance(pi_similarity(h1, h2)?))
}

/// Map a similarity in [0, 1] to the induced distance `sqrt(2 - 2 s)`.
pub fn similarity_to_distance(s: f64) -> f64 {
    (2.0 - 2.0 * s).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Closed-form factors
// ---------------------------------------------------------------------------

/// Radial similarity factor `|D_Ns(2 pi B (r1 - r2) / c)|`: unity at equal
/// range, first null at `|r1 - r2| = c/B`, periodic with period `c/delta_f`.
pub fn radial_similarity(config: &SystemConfig, r1: f64, r2: f64) -> f64 {
    let x = 2.0 * PI * config.bandwidth() * (r1 - r2) / SPEED_OF_LIGHT;
    dirichlet_kernel(x, config.ns).abs()
}

/// Angular similarity factor for a uniform linear array:
/// `|D_Na(2 pi spacing Na (sin th1 - sin th2))|`. Symmetric under the
/// mirror map `theta -> pi - theta` (the ULA cannot tell front from back).
pub fn angular_similarity_ula(config: &SystemConfig, th1: f64, th2: f64) -> Result<f64, KernelError> {
    let ArrayGeometry::Ula { na, spacing } = config.array else {
        return Err(KernelError::NotUla);
    };
    let x = 2.0 * PI * spacing * na as f64 * (th1.sin() - th2.sin());
    Ok(dirichlet_kernel(x, na).abs())
}

/// Exact angular similarity factor for a uniform circular array: the
/// magnitude of the discrete sum over elements,
/// `(1/Na) |sum_n exp(j (2 pi / lambda) p_n . (u(th1) - u(th2)))|`.
pub fn angular_similarity_uca(config: &SystemConfig, th1: f64, th2: f64) -> Result<f64, KernelError> {
    let ArrayGeometry::Uca { na, radius } = config.array else {
        return Err(KernelError::NotUca);
    };
    let k = 2.0 * PI / config.wavelength();
    let dc = th1.cos() - th2.cos();
    let ds = th1.sin() - th2.sin();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..na {
        let phi = 2.0 * PI * n as f64 / na as f64;
        acc += Complex64::from_polar(1.0, k * radius * (phi.cos() * dc + phi.sin() * ds));
    }
    Ok((acc.norm() / na as f64).clamp(0.0, 1.0))
}

/// Large-Na approximation of the UCA angular factor:
/// `|J0((4 pi / lambda) R |sin((th1 - th2)/2)|)|`. Depends only on the
/// azimuth difference, so it is rotation invariant.
pub fn angular_similarity_uca_approx(
    config: &SystemConfig,
    th1: f64,
    th2: f64,
) -> Result<f64, KernelError> {
    let ArrayGeometry::Uca { radius, .. } = config.array else {
        return Err(KernelError::NotUca);
    };
    let x = 4.0 * PI / config.wavelength() * radius * ((th1 - th2) / 2.0).sin().abs();
    Ok(bessel_j0(x).abs())
}

/// Closed-form PI similarity for a UCA under the large-Na approximation:
/// radial factor times approximate angular factor.
pub fn pi_similarity_uca_approx(
    config: &SystemConfig,
    p1: &PolarPosition,
    p2: &PolarPosition,
) -> Result<f64, KernelError> {
    Ok(radial_similarity(config, p1.r, p2.r) * angular_similarity_uca_approx(config, p1.theta, p2.theta)?)
}

// ---------------------------------------------------------------------------
// Thresholds and lobe widths
// ---------------------------------------------------------------------------

/// Similarity threshold for a system, returned as
/// `(similarity, distance) = (t, sqrt(2 - 2 t))`.
///
/// ULA: the larger of the two first side-lobe levels `|D_Ns(3 pi)|` and
/// `|D_Na(3 pi)|`. UCA: 0.403 (the J0 side-lobe level) once `Ns > 2`, which
/// makes the Dirichlet side lobe the smaller of the two; otherwise the max
/// of both. Arbitrary geometries have no closed-form kernel and are
/// rejected.
pub fn similarity_threshold(config: &SystemConfig) -> Result<(f64, f64), KernelError> {
    let radial = dirichlet_kernel(3.0 * PI, config.ns).abs();
    let t = match config.array {
        ArrayGeometry::Ula { na, .. } => radial.max(dirichlet_kernel(3.0 * PI, na).abs()),
        ArrayGeometry::Uca { .. } => {
            if config.ns > 2 {
                UCA_ANGULAR_THRESHOLD
            } else {
                radial.max(UCA_ANGULAR_THRESHOLD)
            }
        }
        ArrayGeometry::Arbitrary { .. } => return Err(KernelError::UnsupportedGeometry),
    };
    Ok((t, similarity_to_distance(t)))
}

/// Inversion constants for post-threshold lobe widths, recomputed once at
/// first use from the kernel equations themselves and checked against their
/// reference values 4.238 and 1.692 (see [`lobe_widths`]).
///
/// `radial`: root of the limiting radial form `sin(x/2)/(x/2)` at the exact
/// first side-lobe level of J0. `angular`: root of `J0(y)` at that same
/// level.
pub fn sidelobe_constants() -> (f64, f64) {
    static CONSTS: OnceLock<(f64, f64)> = OnceLock::new();
    *CONSTS.get_or_init(|| {
        let j0_zero = bisect(bessel_j0, 2.0, 3.0, 1e-12);
        // |J0| is unimodal between its first two zeros; golden-section
        // search finds the side-lobe peak.
        let level = {
            let (mut lo, mut hi) = (j0_zero, 5.52);
            let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
            while hi - lo > 1e-12 {
                let m1 = hi - inv_phi * (hi - lo);
                let m2 = lo + inv_phi * (hi - lo);
                if bessel_j0(m1).abs() < bessel_j0(m2).abs() {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            bessel_j0(0.5 * (lo + hi)).abs()
        };
        let radial = bisect(|x| (x / 2.0).sin() / (x / 2.0) - level, 1e-6, 2.0 * PI, 1e-12);
        let angular = bisect(|y| bessel_j0(y) - level, 1e-6, j0_zero, 1e-12);
        assert!(
            (radial - 4.238).abs() < 1e-3 && (angular - 1.692).abs() < 1e-3,
            "side-lobe inversion constants drifted: {radial}, {angular}"
        );
        (radial, angular)
    })
}

/// First zero of J0, recomputed to the accuracy of [`bessel_j0`].
fn j0_first_zero() -> f64 {
    static ZERO: OnceLock<f64> = OnceLock::new();
    *ZERO.get_or_init(|| bisect(bessel_j0, 2.0, 3.0, 1e-12))
}

/// Angular lobe extent; the thresholded ULA lobe splits once it runs past
/// endfire (`|sin| = 1`), where a single width is no longer meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularExtent {
    Lobe(f64),
    Split,
}

impl AngularExtent {
    pub fn lobe(&self) -> Option<f64> {
        match self {
            AngularExtent::Lobe(w) => Some(*w),
            AngularExtent::Split => None,
        }
    }
}

/// Main-lobe widths of the similarity factors for one system.
#[derive(Debug, Clone, Copy)]
pub struct LobeWidths {
    /// Similarity threshold the post-threshold widths refer to.
    pub threshold: f64,
    /// Radial main-lobe width `2c/B`, meters (null to null).
    pub radial: f64,
    /// Radial width where the kernel crosses the threshold, meters.
    pub radial_thresholded: f64,
    /// Radial kernel period `c/delta_f`, meters.
    pub radial_period: f64,
    /// Angular main-lobe width around `theta_ref`, radians.
    pub angular: f64,
    /// Angular width at the threshold crossing, radians.
    pub angular_thresholded: AngularExtent,
}

/// Main-lobe widths before and after thresholding, around a reference
/// azimuth `theta_ref` (only the ULA widths depend on it; pass 0 for the
/// broadside default).
///
/// UCA widths use the large-Na closed forms: the post-threshold radial width
/// is `x* c / (pi B)` and the angular one `4 asin(lambda y* / (4 pi R))`,
/// with `(x*, y*)` from [`sidelobe_constants`]. ULA widths invert the actual
/// finite-order Dirichlet kernels at the system threshold by bisection.
pub fn lobe_widths(config: &SystemConfig, theta_ref: f64) -> Result<LobeWidths, KernelError> {
    // With a single subcarrier (or a single ULA antenna, below) the kernel on
    // that axis is constant 1: there is no lobe to measure and the threshold
    // bisection has no bracket.
    if config.ns < 2 {
        return Err(KernelError::DegenerateKernel { axis: "radial" });
    }
    let (threshold, _) = similarity_threshold(config)?;
    let b = config.bandwidth();
    let radial = 2.0 * SPEED_OF_LIGHT / b;
    let radial_period = SPEED_OF_LIGHT / config.delta_f;
    let lambda = config.wavelength();
    match config.array {
        ArrayGeometry::Uca { radius, .. } => {
            let (xs, ys) = sidelobe_constants();
            let ratio_main = lambda * j0_first_zero() / (4.0 * PI * radius);
            let angular = 4.0 * (ratio_main.min(1.0)).asin();
            let ratio_thr = lambda * ys / (4.0 * PI * radius);
            if ratio_thr > 1.0 {
                return Err(KernelError::ArrayTooSmall { const_name: "y*", ratio: ratio_thr });
            }
            Ok(LobeWidths {
                threshold,
                radial,
                radial_thresholded: xs * SPEED_OF_LIGHT / (PI * b),
                radial_period,
                angular,
                angular_thresholded: AngularExtent::Lobe(4.0 * ratio_thr.asin()),
            })
        }
        ArrayGeometry::Ula { na, spacing } => {
            if na < 2 {
                return Err(KernelError::DegenerateKernel { axis: "angular" });
            }
            // Dirichlet main lobes are strictly decreasing on [0, 2 pi], so
            // the threshold crossing brackets cleanly.
            let x_rad = bisect(|x| dirichlet_kernel(x, config.ns) - threshold, 1e-9, 2.0 * PI, 1e-10);
            let x_ang = bisect(|x| dirichlet_kernel(x, na) - threshold, 1e-9, 2.0 * PI, 1e-10);
            let sine_ref = theta_ref.sin();
            // Pre-threshold lobe: nulls at sin offsets +-1/(Na spacing),
            // clamped at endfire.
            let w_main = 1.0 / (na as f64 * spacing);
            let angular = ((sine_ref + w_main).min(1.0)).asin() - ((sine_ref - w_main).max(-1.0)).asin();
            // Post-threshold lobe in the sine domain.
            let w_thr = x_ang / (2.0 * PI * spacing * na as f64);
            let angular_thresholded = if sine_ref + w_thr > 1.0 || sine_ref - w_thr < -1.0 {
                AngularExtent::Split
            } else {
                AngularExtent::Lobe((sine_ref + w_thr).asin() - (sine_ref - w_thr).asin())
            };
            Ok(LobeWidths {
                threshold,
                radial,
                radial_thresholded: x_rad * SPEED_OF_LIGHT / (PI * b),
                radial_period,
                angular,
                angular_thresholded,
            })
        }
        ArrayGeometry::Arbitrary { .. } => Err(KernelError::UnsupportedGeometry),
    }
}

// ---------------------------------------------------------------------------
// Distance matrices
// ---------------------------------------------------------------------------

/// Which distance a matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    /// PI distance between channel vectors, all pairs.
    Pi,
    /// PI distance with sub-threshold pairs marked absent.
    PiThresholded,
    /// Euclidean distance between ground-truth positions.
    EuclideanTruth,
    /// Shortest-path length through a neighbor graph.
    Geodesic,
}

/// Dense symmetric distance matrix with optional absent entries.
///
/// Absent entries (cut by thresholding) are stored as NaN internally and
/// surfaced as `None`, so a cut pair can never be mistaken for a usable
/// distance by arithmetic downstream.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    kind: DistanceKind,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn filled(n: usize, kind: DistanceKind, value: f64) -> Self {
        Self { n, kind, data: vec![value; n * n] }
    }

    /// All entries absent except the zero diagonal.
    pub fn absent(n: usize, kind: DistanceKind) -> Self {
        let mut m = Self { n, kind, data: vec![f64::NAN; n * n] };
        for i in 0..n {
            m.data[i * n + i] = 0.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.data[i * self.n + j];
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }

    /// Set both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn is_present(&self, i: usize, j: usize) -> bool {
        !self.data[i * self.n + j].is_nan()
    }

    pub(crate) fn from_raw(n: usize, kind: DistanceKind, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, kind, data }
    }
}

/// Flatten channels into separate re/im planes so the pairwise loop
/// autovectorizes.
struct ChannelPlanes {
    re: Vec<f64>,
    im: Vec<f64>,
    dim: usize,
    norms: Vec<f64>,
}

fn channel_planes(channels: &[ChannelVector]) -> Result<ChannelPlanes, KernelError> {
    let dim = channels[0].entries.len();
    if dim == 0 {
        return Err(KernelError::EmptyVector);
    }
    let n = channels.len();
    let mut re = Vec::with_capacity(n * dim);
    let mut im = Vec::with_capacity(n * dim);
    let mut norms = Vec::with_capacity(n);
    for ch in channels {
        if ch.entries.len() != dim {
            return Err(KernelError::LengthMismatch(dim, ch.entries.len()));
        }
        let mut sq = 0.0;
        for z in &ch.entries {
            re.push(z.re);
            im.push(z.im);
            sq += z.norm_sqr();
        }
        if sq == 0.0 {
            return Err(KernelError::ZeroNorm);
        }
        norms.push(sq.sqrt());
    }
    Ok(ChannelPlanes { re, im, dim, norms })
}

#[inline]
fn hermitian_dot_norm(planes: &ChannelPlanes, i: usize, j: usize) -> f64 {
    let d = planes.dim;
    let (ar, ai) = (&planes.re[i * d..(i + 1) * d], &planes.im[i * d..(i + 1) * d]);
    let (br, bi) = (&planes.re[j * d..(j + 1) * d], &planes.im[j * d..(j + 1) * d]);
    let mut rr = 0.0;
    let mut ii = 0.0;
    for k in 0..d {
        rr += ar[k] * br[k] + ai[k] * bi[k];
        ii += ar[k] * bi[k] - ai[k] * br[k];
    }
    (rr * rr + ii * ii).sqrt()
}

/// Pairwise PI distance matrix over a set of channels.
///
/// Rows are computed independently (upper triangle, then mirrored), so the
/// result is deterministic regardless of thread count.
pub fn pi_distance_matrix(channels: &[ChannelVector]) -> Result<DistanceMatrix, KernelError> {
    let n = channels.len();
    if n < 2 {
        return Err(KernelError::TooFewChannels(n));
    }
    let planes = channel_planes(channels)?;
    let mut data = vec![0.0f64; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for j in (i + 1)..n {
            let s = (hermitian_dot_norm(&planes, i, j) / (planes.norms[i] * planes.norms[j]))
                .clamp(0.0, 1.0);
            row[j] = similarity_to_distance(s);
        }
    });
    for i in 0..n {
        for j in (i + 1)..n {
            data[j * n + i] = data[i * n + j];
        }
    }
    Ok(DistanceMatrix::from_raw(n, DistanceKind::Pi, data))
}

/// Thresholded PI distances: matrix plus neighbor graph.
pub struct ThresholdedDistances {
    /// PI distances with sub-threshold pairs absent.
    pub matrix: DistanceMatrix,
    /// Graph with an edge wherever the similarity clears the threshold,
    /// weighted by PI distance.
    pub graph: NeighborGraph,
    /// Similarity threshold used.
    pub threshold: f64,
    /// Set when no pair cleared the threshold; downstream stages cannot do
    /// anything useful with such a graph, so callers should surface this.
    pub all_isolated: bool,
}

/// Build the thresholded distance matrix and neighbor graph for a channel
/// set: an edge is kept iff the PI similarity reaches the system threshold.
pub fn thresholded_distance_matrix(
    channels: &[ChannelVector],
    config: &SystemConfig,
) -> Result<ThresholdedDistances, KernelError> {
    let (t_sim, t_dist) = similarity_threshold(config)?;
    let dense = pi_distance_matrix(channels)?;
    let (matrix, graph) = threshold_matrix(&dense, t_dist);
    let all_isolated = graph.edge_count() == 0;
    Ok(ThresholdedDistances { matrix, graph, threshold: t_sim, all_isolated })
}

/// Apply a distance-domain threshold to a dense PI matrix (distance and
/// similarity thresholds are equivalent through the monotone map
/// `d = sqrt(2 - 2 s)`).
pub(crate) fn threshold_matrix(dense: &DistanceMatrix, t_dist: f64) -> (DistanceMatrix, NeighborGraph) {
    let n = dense.n();
    let mut out = DistanceMatrix::absent(n, DistanceKind::PiThresholded);
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dense.get(i, j).expect("dense PI matrix has all entries");
            if d <= t_dist {
                out.set(i, j, d);
                adjacency[i].push((j as u32, d));
                adjacency[j].push((i as u32, d));
            }
        }
    }
    (out, NeighborGraph::from_adjacency(adjacency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_ues, synth_channel, RegionSpec};
    use proptest::prelude::*;

    fn uca_config() -> SystemConfig {
        SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Uca { na: 64, radius: 0.42 }).unwrap()
    }

    fn ula_config() -> SystemConfig {
        SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Ula { na: 16, spacing: 0.5 }).unwrap()
    }

    fn channel_at(config: &SystemConfig, r: f64, theta: f64) -> ChannelVector {
        synth_channel(config, &PolarPosition::new(r, theta))
    }

    #[test]
    fn self_similarity_is_one() {
        let cfg = uca_config();
        let h = channel_at(&cfg, 296.0, 0.4);
        assert_eq!(pi_similarity(&h, &h).unwrap(), 1.0);
        assert_eq!(pi_distance(&h, &h).unwrap(), 0.0);
    }

    #[test]
    fn input_validation() {
        let cfg = uca_config();
        let h = channel_at(&cfg, 100.0, 0.0);
        let short = ChannelVector { entries: vec![Complex64::new(1.0, 0.0)], position: None };
        assert!(matches!(pi_similarity(&h, &short), Err(KernelError::LengthMismatch(_, _))));
        let empty = ChannelVector { entries: vec![], position: None };
        assert_eq!(pi_similarity(&empty, &empty).unwrap_err(), KernelError::EmptyVector);
        let zero = ChannelVector {
            entries: vec![Complex64::new(0.0, 0.0); h.entries.len()],
            position: None,
        };
        assert_eq!(pi_similarity(&h, &zero).unwrap_err(), KernelError::ZeroNorm);
    }

    #[test]
    fn similarity_factors_exactly() {
        // s = radial * angular for LoS channels; both array types.
        let uca = uca_config();
        let ula = ula_config();
        let pairs = [
            ((300.0, 0.1), (310.0, 0.15)),
            ((100.0, -0.4), (130.0, -0.38)),
            ((296.0, 0.0), (296.0, 1.2)),
            ((200.0, 1.0), (460.0, -1.0)),
        ];
        for ((r1, t1), (r2, t2)) in pairs {
            let s = pi_similarity(&channel_at(&uca, r1, t1), &channel_at(&uca, r2, t2)).unwrap();
            let f = radial_similarity(&uca, r1, r2) * angular_similarity_uca(&uca, t1, t2).unwrap();
            assert!((s - f).abs() < 1e-9, "uca: {s} vs {f}");
            let s = pi_similarity(&channel_at(&ula, r1, t1), &channel_at(&ula, r2, t2)).unwrap();
            let f = radial_similarity(&ula, r1, r2) * angular_similarity_ula(&ula, t1, t2).unwrap();
            assert!((s - f).abs() < 1e-9, "ula: {s} vs {f}");
        }
    }

    #[test]
    fn radial_factor_null_period_and_oracle() {
        let cfg = uca_config();
        let b = cfg.bandwidth();
        let null = SPEED_OF_LIGHT / b;
        let period = SPEED_OF_LIGHT / cfg.delta_f;
        assert!(radial_similarity(&cfg, 300.0, 300.0 + null) < 1e-12);
        assert!((radial_similarity(&cfg, 300.0, 300.0 + period) - 1.0).abs() < 1e-12);
        // Against the inner-product route (magnitude of <f(r1), f(r2)>).
        for k in 0..200 {
            let dr = -600.0 + 6.0 * k as f64;
            let f1 = crate::channel::frequency_signature(&cfg, 300.0);
            let f2 = crate::channel::frequency_signature(&cfg, 300.0 + dr);
            let dot: Complex64 = f1.iter().zip(&f2).map(|(a, b)| a.conj() * b).sum();
            let direct = radial_similarity(&cfg, 300.0, 300.0 + dr);
            assert!((dot.norm() - direct).abs() < 1e-12, "dr = {dr}");
            // Periodicity across the whole profile.
            let shifted = radial_similarity(&cfg, 300.0, 300.0 + dr + period);
            assert!((direct - shifted).abs() < 1e-12);
        }
    }

    #[test]
    fn ula_factor_null_mirror_and_oracle() {
        let cfg = ula_config();
        // First null at sin offset 1/(Na spacing) = 0.125.
        let th2 = 0.125f64.asin();
        assert!(angular_similarity_ula(&cfg, 0.0, th2).unwrap() < 1e-12);
        for (t1, t2) in [(0.3, 0.7), (-1.2, 0.4), (0.0, 2.9)] {
            let a = angular_similarity_ula(&cfg, t1, t2).unwrap();
            // Mirror symmetry theta -> pi - theta.
            let m = angular_similarity_ula(&cfg, PI - t1, PI - t2).unwrap();
            assert!((a - m).abs() < 1e-12);
            // Steering-vector inner product oracle.
            let a1 = crate::channel::steering_vector(&cfg, t1);
            let a2 = crate::channel::steering_vector(&cfg, t2);
            let dot: Complex64 = a1.iter().zip(&a2).map(|(x, y)| x.conj() * y).sum();
            assert!((dot.norm() - a).abs() < 1e-12);
        }
        assert_eq!(angular_similarity_ula(&uca_config(), 0.0, 1.0).unwrap_err(), KernelError::NotUla);
    }

    #[test]
    fn uca_factor_matches_steering_oracle_and_frozen_spots() {
        let cfg = uca_config();
        for (t1, t2) in [(0.0, 0.1), (1.0, -1.0), (0.0, PI), (2.2, 2.2)] {
            let a = angular_similarity_uca(&cfg, t1, t2).unwrap();
            let a1 = crate::channel::steering_vector(&cfg, t1);
            let a2 = crate::channel::steering_vector(&cfg, t2);
            let dot: Complex64 = a1.iter().zip(&a2).map(|(x, y)| x.conj() * y).sum();
            assert!((dot.norm() - a).abs() < 1e-12, "({t1}, {t2})");
        }
        // Frozen spot values (scipy cross-check).
        assert!((angular_similarity_uca(&cfg, 0.0, 0.1).unwrap() - 0.115258115170966).abs() < 1e-10);
        assert!((angular_similarity_uca(&cfg, 1.0, -1.0).unwrap() - 0.113302990360737).abs() < 1e-10);
        assert!((angular_similarity_uca(&cfg, 0.0, PI).unwrap() - 0.019794609275778).abs() < 1e-10);
        assert_eq!(angular_similarity_uca(&ula_config(), 0.0, 1.0).unwrap_err(), KernelError::NotUca);
    }

    #[test]
    fn uca_approximation_is_close_and_rotation_invariant() {
        let cfg = uca_config();
        // Coarse sweep; the dense-grid bound is frozen in the acceptance
        // suite. The approximation error peaks around opposed azimuths.
        let mut worst = 0.0f64;
        for i in 0..60 {
            for j in 0..60 {
                let t1 = -PI + 2.0 * PI * i as f64 / 60.0;
                let t2 = -PI + 2.0 * PI * j as f64 / 60.0;
                let gap = (angular_similarity_uca(&cfg, t1, t2).unwrap()
                    - angular_similarity_uca_approx(&cfg, t1, t2).unwrap())
                .abs();
                worst = worst.max(gap);
            }
        }
        assert!(worst < 2e-3, "worst gap {worst:.3e}");
        // The approximation depends only on the difference.
        let a = angular_similarity_uca_approx(&cfg, 0.2, 0.5).unwrap();
        let b = angular_similarity_uca_approx(&cfg, 0.2 + 1.1, 0.5 + 1.1).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn thresholds_per_geometry() {
        let (t, d) = similarity_threshold(&uca_config()).unwrap();
        assert_eq!(t, 0.403);
        assert!((d - 1.092703070371819).abs() < 1e-12);
        let (t, d) = similarity_threshold(&ula_config()).unwrap();
        assert!((t - 0.215305887279792).abs() < 1e-12);
        assert!((d - 1.252752260201680).abs() < 1e-12);
        // Two subcarriers push the Dirichlet side lobe above 0.403.
        let cfg = SystemConfig::new(3e9, 5e6, 2, ArrayGeometry::Uca { na: 64, radius: 0.42 }).unwrap();
        let (t, _) = similarity_threshold(&cfg).unwrap();
        assert!((t - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let arb = SystemConfig::new(
            3e9,
            625e3,
            16,
            ArrayGeometry::Arbitrary { elements: vec![[-0.5, 0.0], [0.5, 0.0]] },
        )
        .unwrap();
        assert_eq!(similarity_threshold(&arb).unwrap_err(), KernelError::UnsupportedGeometry);
    }

    #[test]
    fn sidelobe_constants_match_frozen_inversions() {
        let (xs, ys) = sidelobe_constants();
        assert!((xs - 4.238032261790852).abs() < 1e-6, "x* = {xs}");
        assert!((ys - 1.691732695044323).abs() < 1e-6, "y* = {ys}");
    }

    #[test]
    fn lobe_widths_uca_base() {
        let w = lobe_widths(&uca_config(), 0.0).unwrap();
        assert_eq!(w.threshold, 0.403);
        assert!((w.radial - 59.9584916).abs() < 1e-6);
        assert!((w.radial_thresholded - 40.442229434).abs() < 1e-4);
        assert!((w.radial_period - 479.6679328).abs() < 1e-6);
        assert!((w.angular - 0.182193988629).abs() < 1e-6);
        let ang = w.angular_thresholded.lobe().unwrap();
        assert!((ang - 0.128146373288).abs() < 1e-6);
    }

    #[test]
    fn lobe_widths_ula() {
        let w = lobe_widths(&ula_config(), 0.0).unwrap();
        assert!((w.radial_thresholded - 48.868061241).abs() < 1e-6);
        assert!((w.angular_thresholded.lobe().unwrap() - 0.204112017462).abs() < 1e-9);
        assert!((w.angular - 2.0 * 0.125f64.asin()).abs() < 1e-12);
        // Near endfire the thresholded lobe runs past |sin| = 1 and splits.
        let w = lobe_widths(&ula_config(), 1.47).unwrap();
        assert_eq!(w.angular_thresholded, AngularExtent::Split);
    }

    #[test]
    fn lobe_widths_reject_tiny_uca() {
        let cfg = SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Uca { na: 64, radius: 0.001 }).unwrap();
        assert!(matches!(
            lobe_widths(&cfg, 0.0).unwrap_err(),
            KernelError::ArrayTooSmall { .. }
        ));
    }

    #[test]
    fn distance_matrix_absent_marker() {
        let mut m = DistanceMatrix::absent(3, DistanceKind::PiThresholded);
        assert_eq!(m.get(0, 0), Some(0.0));
        assert_eq!(m.get(0, 1), None);
        assert!(!m.is_present(0, 1));
        m.set(0, 1, 1.25);
        assert_eq!(m.get(1, 0), Some(1.25));
    }

    #[test]
    fn thresholded_matrix_keeps_close_pairs_only() {
        let cfg = uca_config();
        // Radial line of channels 15 m apart. The thresholded lobe is ~40 m
        // wide, so the crossing sits near a 20 m separation: immediate
        // neighbors (15 m) stay above threshold, second neighbors (30 m) drop
        // below it.
        let channels: Vec<_> = (0..6).map(|i| channel_at(&cfg, 250.0 + 15.0 * i as f64, 0.0)).collect();
        let out = thresholded_distance_matrix(&channels, &cfg).unwrap();
        assert!(!out.all_isolated);
        assert_eq!(out.threshold, 0.403);
        for i in 0..5 {
            assert!(out.matrix.is_present(i, i + 1), "adjacent pair {i}");
            assert!(out.graph.neighbors(i).iter().any(|&(j, _)| j as usize == i + 1));
        }
        for i in 0..4 {
            assert!(!out.matrix.is_present(i, i + 2), "skip pair {i}");
        }
        // Matrix entries match the unthresholded distances where present.
        let dense = pi_distance_matrix(&channels).unwrap();
        assert_eq!(out.matrix.get(2, 3), dense.get(2, 3));
    }

    #[test]
    fn fully_separated_channels_report_isolation() {
        let cfg = uca_config();
        let channels = vec![channel_at(&cfg, 100.0, 0.0), channel_at(&cfg, 400.0, 2.0)];
        let out = thresholded_distance_matrix(&channels, &cfg).unwrap();
        assert!(out.all_isolated);
        assert_eq!(out.graph.edge_count(), 0);
        assert!(pi_distance_matrix(&channels[..1].to_vec()).is_err());
    }

    #[test]
    fn dense_matrix_matches_scalar_route() {
        let cfg = uca_config();
        let region = RegionSpec::new(200.0, 400.0, -0.5, 0.5).unwrap();
        let channels: Vec<_> = sample_ues(&region, 12, 3)
            .iter()
            .map(|p| synth_channel(&cfg, p))
            .collect();
        let m = pi_distance_matrix(&channels).unwrap();
        for i in 0..12 {
            // The matrix pins the diagonal to exactly zero; the scalar route
            // computes s(h, h) a couple of ulps below one, which sqrt(2 - 2s)
            // inflates to ~1e-8, so only off-diagonal entries are comparable.
            assert_eq!(m.get(i, i), Some(0.0));
            for j in 0..12 {
                if i == j {
                    continue;
                }
                let d = pi_distance(&channels[i], &channels[j]).unwrap();
                assert_eq!(m.get(i, j), Some(d));
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    proptest! {
        #[test]
        fn phase_and_scale_invariance(
            r1 in 95.0f64..500.0, t1 in -3.0f64..3.0,
            r2 in 95.0f64..500.0, t2 in -3.0f64..3.0,
            phase in 0.0f64..(2.0 * PI), scale in 0.1f64..10.0,
        ) {
            let cfg = uca_config();
            let h1 = channel_at(&cfg, r1, t1);
            let mut h2 = channel_at(&cfg, r2, t2);
            let s_ref = pi_similarity(&h1, &h2).unwrap();
            let rot = Complex64::from_polar(scale, phase);
            for z in &mut h2.entries { *z *= rot; }
            let s_rot = pi_similarity(&h1, &h2).unwrap();
            prop_assert!((s_ref - s_rot).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&s_ref));
        }

        #[test]
        fn distance_range_and_symmetry(
            r1 in 95.0f64..500.0, t1 in -3.0f64..3.0,
            r2 in 95.0f64..500.0, t2 in -3.0f64..3.0,
        ) {
            let cfg = ula_config();
            let h1 = channel_at(&cfg, r1, t1);
            let h2 = channel_at(&cfg, r2, t2);
            let d12 = pi_distance(&h1, &h2).unwrap();
            let d21 = pi_distance(&h2, &h1).unwrap();
            prop_assert!((d12 - d21).abs() < 1e-12);
            prop_assert!((0.0..=2f64.sqrt() + 1e-12).contains(&d12));
        }
    }
}
