//! Chart construction: geodesic distances over the neighbor graph followed
//! by classical multidimensional scaling, plus Procrustes alignment for
//! visual comparison against ground truth.
//!
//! Everything here is deterministic by construction: shortest paths break
//! ties by node id, the eigensolver starts from a fixed seeded block and
//! applies a fixed sign convention, and no stage depends on thread
//! scheduling.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelVector, SystemConfig};
use crate::graph::NeighborGraph;
use crate::kernels::{
    lobe_widths, pi_distance_matrix, similarity_threshold, threshold_matrix, DistanceKind,
    DistanceMatrix, KernelError,
};

#[derive(Debug, Error)]
pub enum ChartingError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error(
        "graph too fragmented: largest component holds {largest} of {total} nodes; \
         increase user density toward the minimum the design rules give"
    )]
    FragmentedGraph { largest: usize, total: usize },
    #[error("distance matrix has absent entries; geodesic completion required first")]
    AbsentEntries,
    #[error("distance matrix entries must be finite and non-negative")]
    InvalidDistances,
    #[error("point sets have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("point set collapsed to a single location; no alignment exists")]
    DegeneratePoints,
    #[error("channel {0} carries no ground-truth position")]
    MissingGroundTruth(usize),
    #[error("embedding dimension must be at least 1")]
    BadDimension,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

// ---------------------------------------------------------------------------
// Geodesic distances
// ---------------------------------------------------------------------------

/// Geodesic completion of a neighbor graph, restricted to its largest
/// connected component.
#[derive(Debug, Clone)]
pub struct GeodesicResult {
    /// Shortest-path distances between the retained nodes, fully filled.
    pub matrix: DistanceMatrix,
    /// Original node indices of the retained nodes, ascending; row `i` of
    /// `matrix` corresponds to node `nodes[i]`.
    pub nodes: Vec<usize>,
    /// Count of nodes outside the largest component.
    pub excluded: usize,
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: u32,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed on distance so BinaryHeap pops the nearest node first;
        // ties resolved by node id so the settle order is reproducible.
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("path lengths are finite")
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All-pairs shortest paths within the largest connected component.
///
/// Errors out when the largest component covers less than half the nodes:
/// a chart of a minority fragment would silently misrepresent the data set,
/// and the density rule exists precisely to prevent this situation.
pub fn geodesic_distances(graph: &NeighborGraph) -> Result<GeodesicResult, ChartingError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(ChartingError::EmptyGraph);
    }
    let (label, size) = graph.largest_component();
    if 2 * size < n {
        return Err(ChartingError::FragmentedGraph { largest: size, total: n });
    }
    let nodes = graph.component_nodes(label);
    let m = nodes.len();
    let mut compact = vec![u32::MAX; n];
    for (new, &old) in nodes.iter().enumerate() {
        compact[old] = new as u32;
    }

    // Per-source searches are independent; each writes only its own row.
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|src| {
            let mut dist = vec![f64::INFINITY; m];
            dist[src] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(HeapItem { dist: 0.0, node: src as u32 });
            while let Some(HeapItem { dist: d, node }) = heap.pop() {
                let u = node as usize;
                if d > dist[u] {
                    continue;
                }
                for &(nb, w) in graph.neighbors(nodes[u]) {
                    let v = compact[nb as usize] as usize;
                    let cand = d + w;
                    if cand < dist[v] {
                        dist[v] = cand;
                        heap.push(HeapItem { dist: cand, node: v as u32 });
                    }
                }
            }
            dist
        })
        .collect();

    // Exact arithmetic would make the rows symmetric; floating-point sums
    // along reversed paths can differ in the last ulp, so take the minimum.
    let mut matrix = DistanceMatrix::filled(m, DistanceKind::Geodesic, 0.0);
    for i in 0..m {
        for j in (i + 1)..m {
            matrix.set(i, j, rows[i][j].min(rows[j][i]));
        }
    }
    Ok(GeodesicResult { matrix, nodes, excluded: n - m })
}

// ---------------------------------------------------------------------------
// Classical MDS
// ---------------------------------------------------------------------------

/// A low-dimensional embedding plus bookkeeping about how it was obtained.
#[derive(Debug, Clone)]
pub struct Chart {
    /// One 2D location per embedded point.
    pub points: Vec<[f64; 2]>,
    /// Which distance produced the chart.
    pub source: DistanceKind,
    /// Whether the chart has been Procrustes-aligned to ground truth.
    pub aligned: bool,
    /// Set when the input distances carry noticeable negative eigenvalue
    /// mass, i.e. they are not Euclidean-embeddable. Informational only.
    pub non_euclidean: bool,
    /// Leading eigenvalues backing the coordinates.
    pub eigenvalues: Vec<f64>,
}

/// Cyclic Jacobi eigendecomposition of a small dense symmetric matrix
/// (row-major, `p` x `p`). Returns eigenvalues descending with matching
/// eigenvector columns (row-major `p` x `p`).
fn jacobi_eigen(mut g: Vec<f64>, p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![0.0; p * p];
    for i in 0..p {
        u[i * p + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in 0..p {
            scale = scale.max(g[r * p + r].abs());
            for c in (r + 1)..p {
                off = off.max(g[r * p + c].abs());
            }
        }
        if off <= 1e-15 * scale.max(1e-300) {
            break;
        }
        for r in 0..p {
            for c in (r + 1)..p {
                let grc = g[r * p + c];
                if grc.abs() <= 1e-300 {
                    continue;
                }
                let tau = (g[c * p + c] - g[r * p + r]) / (2.0 * grc);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                // G <- J^T G J on rows/columns r and c.
                for k in 0..p {
                    let grk = g[r * p + k];
                    let gck = g[c * p + k];
                    g[r * p + k] = cos * grk - sin * gck;
                    g[c * p + k] = sin * grk + cos * gck;
                }
                for k in 0..p {
                    let gkr = g[k * p + r];
                    let gkc = g[k * p + c];
                    g[k * p + r] = cos * gkr - sin * gkc;
                    g[k * p + c] = sin * gkr + cos * gkc;
                }
                for k in 0..p {
                    let ukr = u[k * p + r];
                    let ukc = u[k * p + c];
                    u[k * p + r] = cos * ukr - sin * ukc;
                    u[k * p + c] = sin * ukr + cos * ukc;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        g[b * p + b].partial_cmp(&g[a * p + a]).expect("finite eigenvalues").then(a.cmp(&b))
    });
    let vals: Vec<f64> = order.iter().map(|&i| g[i * p + i]).collect();
    let mut vecs = vec![0.0; p * p];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..p {
            vecs[k * p + new] = u[k * p + old];
        }
    }
    (vals, vecs)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass over the
/// columns of a row-major `n` x `p` block.
fn orthonormalize(v: &mut [f64], n: usize, p: usize) {
    for c in 0..p {
        for _pass in 0..2 {
            for prev in 0..c {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += v[i * p + c] * v[i * p + prev];
                }
                for i in 0..n {
                    v[i * p + c] -= dot * v[i * p + prev];
                }
            }
        }
        let mut norm = 0.0;
        for i in 0..n {
            norm += v[i * p + c] * v[i * p + c];
        }
        let norm = norm.sqrt();
        if norm > 1e-300 {
            for i in 0..n {
                v[i * p + c] /= norm;
            }
        } else {
            // Column vanished inside the span of the others; restart it
            // from a deterministic basis vector and redo the projections.
            for i in 0..n {
                v[i * p + c] = if i == c % n { 1.0 } else { 0.0 };
            }
            for prev in 0..c {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += v[i * p + c] * v[i * p + prev];
                }
                for i in 0..n {
                    v[i * p + c] -= dot * v[i * p + prev];
                }
            }
            let mut norm = 0.0;
            for i in 0..n {
                norm += v[i * p + c] * v[i * p + c];
            }
            let norm = norm.sqrt().max(1e-300);
            for i in 0..n {
                v[i * p + c] /= norm;
            }
        }
    }
}

/// `w = (B + sigma I) v` for a row-major block `v` (`n` x `p`), B dense
/// row-major. Parallel over rows of B; each row's accumulation order is
/// fixed, so the product is reproducible.
fn shifted_mul(b: &[f64], sigma: f64, v: &[f64], n: usize, p: usize) -> Vec<f64> {
    let mut w = vec![0.0; n * p];
    w.par_chunks_mut(p).enumerate().for_each(|(i, out)| {
        let row = &b[i * n..(i + 1) * n];
        let mut acc = [0.0f64; 8];
        debug_assert!(p <= 8);
        for (j, &bij) in row.iter().enumerate() {
            let vr = &v[j * p..j * p + p];
            for c in 0..p {
                acc[c] += bij * vr[c];
            }
        }
        for c in 0..p {
            out[c] = acc[c] + sigma * v[i * p + c];
        }
    });
    w
}

/// Classical MDS: double-center the squared distances and embed with the
/// top eigenpairs.
///
/// The eigensolver is shifted subspace iteration on `B + sigma I` (which a
/// Gershgorin bound makes positive semidefinite) with a Rayleigh-Ritz
/// rotation each step; the block is two columns wider than requested so the
/// target eigenpairs converge at the gap beyond them. Coordinates follow a
/// fixed sign convention: the first entry of each eigenvector whose
/// magnitude exceeds 1e-12 is made positive.
pub fn classical_mds(d: &DistanceMatrix, dim: usize) -> Result<Chart, ChartingError> {
    if dim < 1 {
        return Err(ChartingError::BadDimension);
    }
    let n = d.n();
    if n == 0 {
        return Err(ChartingError::EmptyGraph);
    }
    if n == 1 {
        return Ok(Chart {
            points: vec![[0.0, 0.0]],
            source: d.kind(),
            aligned: false,
            non_euclidean: false,
            eigenvalues: vec![0.0; dim],
        });
    }

    // B = -1/2 J D^2 J via row/column mean subtraction.
    let mut sq = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j).ok_or(ChartingError::AbsentEntries)?;
            if !v.is_finite() || v < 0.0 {
                return Err(ChartingError::InvalidDistances);
            }
            sq[i * n + j] = v * v;
        }
    }
    let mut row_mean = vec![0.0; n];
    for i in 0..n {
        row_mean[i] = sq[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64;
    }
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let mut b = sq;
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (b[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }

    // Gershgorin shift making B + sigma I PSD.
    let sigma = (0..n)
        .map(|i| b[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);

    let p = (dim + 2).min(n);
    let mut v = {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6d6473);
        let mut v: Vec<f64> = (0..n * p).map(|_| rng.random::<f64>() - 0.5).collect();
        orthonormalize(&mut v, n, p);
        v
    };

    let mut theta = vec![0.0; p];
    for _iter in 0..1000 {
        let w = shifted_mul(&b, sigma, &v, n, p);
        // Rayleigh-Ritz on the current block.
        let mut g = vec![0.0; p * p];
        for r in 0..p {
            for c in 0..p {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += v[i * p + r] * w[i * p + c];
                }
                g[r * p + c] = dot;
            }
        }
        for r in 0..p {
            for c in (r + 1)..p {
                let s = 0.5 * (g[r * p + c] + g[c * p + r]);
                g[r * p + c] = s;
                g[c * p + r] = s;
            }
        }
        let (vals, rot) = jacobi_eigen(g, p);
        theta.copy_from_slice(&vals);
        // Rotate both blocks into the Ritz basis.
        let rotate = |m: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n * p];
            for i in 0..n {
                let row = &m[i * p..(i + 1) * p];
                let dst = &mut out[i * p..(i + 1) * p];
                for c in 0..p {
                    let mut acc = 0.0;
                    for r in 0..p {
                        acc += row[r] * rot[r * p + c];
                    }
                    dst[c] = acc;
                }
            }
            out
        };
        let v_ritz = rotate(&v);
        let w_ritz = rotate(&w);

        // Residuals of the eigenpairs that will carry coordinates.
        let scale = theta[0].abs().max(1e-300);
        let mut converged = true;
        for c in 0..dim.min(p) {
            let mut res = 0.0;
            for i in 0..n {
                let r = w_ritz[i * p + c] - theta[c] * v_ritz[i * p + c];
                res += r * r;
            }
            if res.sqrt() > 1e-12 * scale {
                converged = false;
                break;
            }
        }
        if converged {
            v = v_ritz;
            break;
        }
        // Power step: take the multiplied block into the next iteration.
        v = w_ritz;
        orthonormalize(&mut v, n, p);
    }

    // Eigenvalues of B itself, with the sign convention applied on the
    // vectors before scaling.
    let lambda: Vec<f64> = theta.iter().map(|t| t - sigma).collect();
    for c in 0..p {
        let lead = (0..n).map(|i| v[i * p + c]).find(|x| x.abs() > 1e-12);
        if let Some(x) = lead {
            if x < 0.0 {
                for i in 0..n {
                    v[i * p + c] = -v[i * p + c];
                }
            }
        }
    }

    let trace_b: f64 = (0..n).map(|i| b[i * n + i]).sum();
    let top_sum: f64 = lambda.iter().sum();
    let tol = 1e-8 * lambda[0].abs().max(1.0);
    let non_euclidean =
        (trace_b - top_sum) < -tol || lambda.iter().take(p).any(|&l| l < -tol);

    let mut points = vec![[0.0f64; 2]; n];
    for (c, point_axis) in (0..dim.min(2)).enumerate() {
        // Eigenvalues below the numerical floor carry no geometry, only
        // iteration noise amplified by the square root; zero them so
        // collinear inputs embed exactly on a line.
        let lc = if lambda[c] <= 1e-12 * lambda[0].max(0.0) { 0.0 } else { lambda[c] };
        let s = lc.sqrt();
        for i in 0..n {
            points[i][point_axis] = v[i * p + c] * s;
        }
    }
    Ok(Chart {
        points,
        source: d.kind(),
        aligned: false,
        non_euclidean,
        eigenvalues: lambda[..dim.min(p)].to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Procrustes alignment
// ---------------------------------------------------------------------------

/// SVD of a 2x2 matrix via the rotation-angle closed form: returns
/// `(u, [s1, s2], v)` with `m = u * diag(s) * v^T`, singular values
/// descending and non-negative, `u`/`v` orthogonal.
fn svd2(m: [[f64; 2]; 2]) -> ([[f64; 2]; 2], [f64; 2], [[f64; 2]; 2]) {
    let e = (m[0][0] + m[1][1]) / 2.0;
    let f = (m[0][0] - m[1][1]) / 2.0;
    let g = (m[1][0] + m[0][1]) / 2.0;
    let h = (m[1][0] - m[0][1]) / 2.0;
    let q = (e * e + h * h).sqrt();
    let r = (f * f + g * g).sqrt();
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let beta = (a2 - a1) / 2.0;
    let gamma = (a2 + a1) / 2.0;
    let rot = |t: f64| -> [[f64; 2]; 2] {
        let (s, c) = t.sin_cos();
        [[c, -s], [s, c]]
    };
    let u = rot(gamma);
    let v = rot(-beta);
    let s1 = q + r;
    let mut s2 = q - r;
    let mut v = v;
    if s2 < 0.0 {
        // Fold the sign into the second right-singular vector.
        s2 = -s2;
        v[0][1] = -v[0][1];
        v[1][1] = -v[1][1];
    }
    (u, [s1, s2], v)
}

fn mat2_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mat2_t(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Align a chart to ground-truth positions with the least-squares
/// similarity transform (rotation or reflection, uniform scale,
/// translation). Metrics do not need this; it exists so charts can be drawn
/// over the truth.
pub fn procrustes_align(chart: &Chart, truth: &[[f64; 2]]) -> Result<Chart, ChartingError> {
    let n = chart.points.len();
    if truth.len() != n {
        return Err(ChartingError::LengthMismatch(n, truth.len()));
    }
    if n == 0 {
        return Err(ChartingError::EmptyGraph);
    }
    let centroid = |pts: &[[f64; 2]]| -> [f64; 2] {
        let mut c = [0.0, 0.0];
        for p in pts {
            c[0] += p[0];
            c[1] += p[1];
        }
        [c[0] / pts.len() as f64, c[1] / pts.len() as f64]
    };
    let cx = centroid(&chart.points);
    let cy = centroid(truth);

    // Cross-covariance A = sum x~ y~^T and the chart's centered energy.
    let mut a = [[0.0f64; 2]; 2];
    let mut sxx = 0.0;
    for (x, y) in chart.points.iter().zip(truth) {
        let xt = [x[0] - cx[0], x[1] - cx[1]];
        let yt = [y[0] - cy[0], y[1] - cy[1]];
        a[0][0] += xt[0] * yt[0];
        a[0][1] += xt[0] * yt[1];
        a[1][0] += xt[1] * yt[0];
        a[1][1] += xt[1] * yt[1];
        sxx += xt[0] * xt[0] + xt[1] * xt[1];
    }
    if sxx == 0.0 {
        return Err(ChartingError::DegeneratePoints);
    }
    let (u, s, v) = svd2(a);
    // Best orthogonal map maximizes trace(R A): R = V U^T, reflections
    // allowed.
    let rot = mat2_mul(v, mat2_t(u));
    let scale = (s[0] + s[1]) / sxx;

    let points = chart
        .points
        .iter()
        .map(|x| {
            let xt = [x[0] - cx[0], x[1] - cx[1]];
            [
                scale * (rot[0][0] * xt[0] + rot[0][1] * xt[1]) + cy[0],
                scale * (rot[1][0] * xt[0] + rot[1][1] * xt[1]) + cy[1],
            ]
        })
        .collect();
    Ok(Chart { points, aligned: true, ..chart.clone() })
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Which distance feeds the neighbor graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceSource {
    /// PI channel distance.
    Pi,
    /// Euclidean distance between ground-truth positions (reference
    /// pipeline; requires tagged channels).
    EuclideanTruth,
}

/// Pipeline controls. `thresholded` selects the identifiability threshold
/// for the PI source; the ground-truth source always uses the radius rule
/// and ignores it.
#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub source: DistanceSource,
    pub thresholded: bool,
    /// Neighbor count for the unthresholded PI graph; when unset, matches
    /// the mean degree the thresholded graph would have had on the same
    /// data, so the two variants spend the same edge budget.
    pub knn: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { source: DistanceSource::Pi, thresholded: true, knn: None }
    }
}

/// A finished chart plus everything needed to interpret and reproduce it.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub chart: Chart,
    /// Original channel indices the chart rows correspond to (nodes outside
    /// the largest graph component are dropped).
    pub included: Vec<usize>,
    pub excluded: usize,
    pub graph_edges: usize,
    pub mean_degree: f64,
    /// The k used for the unthresholded PI graph, when that path ran.
    pub knn_used: Option<usize>,
}

/// Symmetrized k-nearest-neighbor graph over a dense distance matrix
/// (union rule: an edge exists when either endpoint selects the other).
fn knn_graph(matrix: &DistanceMatrix, k: usize) -> NeighborGraph {
    let n = matrix.n();
    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    let mut selected: Vec<(u32, u32)> = Vec::with_capacity(n * k);
    for i in 0..n {
        let mut order: Vec<u32> = (0..n as u32).filter(|&j| j as usize != i).collect();
        order.sort_by(|&a, &b| {
            let da = matrix.get(i, a as usize).expect("dense matrix");
            let db = matrix.get(i, b as usize).expect("dense matrix");
            da.partial_cmp(&db).expect("finite distances").then(a.cmp(&b))
        });
        for &j in order.iter().take(k) {
            let (a, b) = (i as u32, j);
            selected.push((a.min(b), a.max(b)));
        }
    }
    selected.sort_unstable();
    selected.dedup();
    for (a, b) in selected {
        let d = matrix.get(a as usize, b as usize).expect("dense matrix");
        adjacency[a as usize].push((b, d));
        adjacency[b as usize].push((a, d));
    }
    NeighborGraph::from_adjacency(adjacency)
}

/// Dense Euclidean distances between tagged positions, plus the
/// radius-rule neighbor graph (`L'_f / 2`).
fn euclidean_truth_graph(
    channels: &[ChannelVector],
    config: &SystemConfig,
) -> Result<(DistanceMatrix, NeighborGraph), ChartingError> {
    let n = channels.len();
    let mut pts = Vec::with_capacity(n);
    for (i, ch) in channels.iter().enumerate() {
        let pos = ch.position.ok_or(ChartingError::MissingGroundTruth(i))?;
        pts.push(pos.cartesian());
    }
    let mut matrix = DistanceMatrix::filled(n, DistanceKind::EuclideanTruth, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = pts[i][0] - pts[j][0];
            let dy = pts[i][1] - pts[j][1];
            matrix.set(i, j, (dx * dx + dy * dy).sqrt());
        }
    }
    let radius = lobe_widths(config, 0.0)?.radial_thresholded / 2.0;
    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = matrix.get(i, j).expect("dense matrix");
            if d <= radius {
                adjacency[i].push((j as u32, d));
                adjacency[j].push((i as u32, d));
            }
        }
    }
    Ok((matrix, NeighborGraph::from_adjacency(adjacency)))
}

/// Distance matrix -> neighbor graph -> geodesics -> MDS, composed per the
/// options. The chart covers the largest component; `included` maps its
/// rows back to channel indices.
pub fn run_pipeline(
    channels: &[ChannelVector],
    config: &SystemConfig,
    options: &PipelineOptions,
) -> Result<PipelineRun, ChartingError> {
    let n = channels.len();
    if n == 0 {
        return Err(ChartingError::EmptyGraph);
    }
    if n == 1 {
        // A single observation charts to a single point; there is no graph
        // to build.
        let source = match options.source {
            DistanceSource::Pi if options.thresholded => DistanceKind::PiThresholded,
            DistanceSource::Pi => DistanceKind::Pi,
            DistanceSource::EuclideanTruth => DistanceKind::EuclideanTruth,
        };
        return Ok(PipelineRun {
            chart: Chart {
                points: vec![[0.0, 0.0]],
                source,
                aligned: false,
                non_euclidean: false,
                eigenvalues: vec![0.0, 0.0],
            },
            included: vec![0],
            excluded: 0,
            graph_edges: 0,
            mean_degree: 0.0,
            knn_used: None,
        });
    }

    let (graph, knn_used) = match options.source {
        DistanceSource::EuclideanTruth => {
            let (_matrix, graph) = euclidean_truth_graph(channels, config)?;
            (graph, None)
        }
        DistanceSource::Pi => {
            let dense = pi_distance_matrix(channels)?;
            let (_t_sim, t_dist) = similarity_threshold(config)?;
            let (_, thresholded) = threshold_matrix(&dense, t_dist);
            if options.thresholded {
                (thresholded, None)
            } else {
                // Unthresholded ablation: same edge budget as the threshold
                // would have spent, but chosen purely by raw-PI proximity.
                let k = options
                    .knn
                    .unwrap_or_else(|| (thresholded.mean_degree().round() as usize).max(1));
                (knn_graph(&dense, k.min(n - 1)), Some(k.min(n - 1)))
            }
        }
    };

    let geo = geodesic_distances(&graph)?;
    let mut chart = classical_mds(&geo.matrix, 2)?;
    chart.source = match options.source {
        DistanceSource::Pi if options.thresholded => DistanceKind::PiThresholded,
        DistanceSource::Pi => DistanceKind::Pi,
        DistanceSource::EuclideanTruth => DistanceKind::EuclideanTruth,
    };
    Ok(PipelineRun {
        chart,
        included: geo.nodes,
        excluded: geo.excluded,
        graph_edges: graph.edge_count(),
        mean_degree: graph.mean_degree(),
        knn_used,
    })
}
