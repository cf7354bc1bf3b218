//! Chart-quality scores: trustworthiness, continuity, Kruskal stress.
//!
//! Trustworthiness penalizes chart neighbors that are not spatial neighbors
//! (false neighbors); continuity penalizes spatial neighbors missing from
//! the chart. Both follow the rank-based definitions of Venna and Kaski,
//! with ties broken by point index so results are reproducible. Kruskal
//! stress-1 measures global distance distortion under the best uniform
//! scale, making it similarity-invariant like the rank scores.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("point sets have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("neighborhood size k = {k} outside 1 <= k < n/2 for n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("all pairwise distances are zero in the {0} point set")]
    Degenerate(&'static str),
}

/// The three scores plus the parameters that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    /// Trustworthiness in [0, 1], higher is better.
    pub tw: f64,
    /// Continuity in [0, 1], higher is better.
    pub ct: f64,
    /// Kruskal stress-1, >= 0, lower is better.
    pub ks: f64,
    /// Rank-metric neighborhood size used for TW and CT.
    pub k_neighbors: usize,
    /// Number of points scored.
    pub n_scored: usize,
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Indices of all points other than `i`, nearest first, ties by index.
fn neighbor_order(points: &[[f64; 2]], i: usize) -> Vec<u32> {
    let mut idx: Vec<u32> =
        (0..points.len() as u32).filter(|&j| j as usize != i).collect();
    idx.sort_by(|&a, &b| {
        let da = dist2(points[i], points[a as usize]);
        let db = dist2(points[i], points[b as usize]);
        da.partial_cmp(&db).expect("finite distances").then(a.cmp(&b))
    });
    idx
}

/// Shared penalty kernel: sum over i of (rank_a(i, j) - k) for every j that
/// is a k-neighbor of i under `b` but not under `a`. Integer accumulation
/// keeps the parallel sum independent of thread scheduling.
fn rank_penalty(a: &[[f64; 2]], b: &[[f64; 2]], k: usize) -> u64 {
    let n = a.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a_order = neighbor_order(a, i);
            let b_order = neighbor_order(b, i);
            let mut rank_a = vec![0u32; n];
            let mut a_nn = vec![false; n];
            for (pos, &j) in a_order.iter().enumerate() {
                rank_a[j as usize] = pos as u32 + 1;
            }
            for &j in &a_order[..k] {
                a_nn[j as usize] = true;
            }
            let mut pen = 0u64;
            for &j in &b_order[..k] {
                if !a_nn[j as usize] {
                    pen += (rank_a[j as usize] as u64) - k as u64;
                }
            }
            pen
        })
        .sum()
}

fn check_rank_inputs(truth: &[[f64; 2]], chart: &[[f64; 2]], k: usize) -> Result<(), MetricsError> {
    if truth.len() != chart.len() {
        return Err(MetricsError::LengthMismatch(truth.len(), chart.len()));
    }
    let n = truth.len();
    if k < 1 || 2 * k >= n {
        return Err(MetricsError::KOutOfRange { k, n });
    }
    Ok(())
}

/// Trustworthiness: 1 minus the normalized penalty over chart neighbors
/// that are not spatial neighbors, each weighted by how far down the
/// spatial ranking it actually sits.
pub fn trustworthiness(
    truth: &[[f64; 2]],
    chart: &[[f64; 2]],
    k: usize,
) -> Result<f64, MetricsError> {
    check_rank_inputs(truth, chart, k)?;
    let n = truth.len() as f64;
    let kf = k as f64;
    let pen = rank_penalty(truth, chart, k) as f64;
    Ok(1.0 - 2.0 / (n * kf * (2.0 * n - 3.0 * kf - 1.0)) * pen)
}

/// Continuity: the mirror score, penalizing spatial neighbors missing from
/// the chart with their chart-ranking excess.
pub fn continuity(truth: &[[f64; 2]], chart: &[[f64; 2]], k: usize) -> Result<f64, MetricsError> {
    check_rank_inputs(truth, chart, k)?;
    let n = truth.len() as f64;
    let kf = k as f64;
    let pen = rank_penalty(chart, truth, k) as f64;
    Ok(1.0 - 2.0 / (n * kf * (2.0 * n - 3.0 * kf - 1.0)) * pen)
}

/// Kruskal stress-1 with the closed-form optimal uniform scale applied to
/// the chart:
/// `KS = sqrt(sum (beta d_chart - d_truth)^2 / sum d_truth^2)` with
/// `beta = sum(d d_chart) / sum(d_chart^2)`.
///
/// Serial accumulation in pair order keeps the value bit-reproducible.
pub fn kruskal_stress(truth: &[[f64; 2]], chart: &[[f64; 2]]) -> Result<f64, MetricsError> {
    if truth.len() != chart.len() {
        return Err(MetricsError::LengthMismatch(truth.len(), chart.len()));
    }
    let n = truth.len();
    let mut sum_t2 = 0.0;
    let mut sum_c2 = 0.0;
    let mut sum_tc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dt = dist2(truth[i], truth[j]).sqrt();
            let dc = dist2(chart[i], chart[j]).sqrt();
            sum_t2 += dt * dt;
            sum_c2 += dc * dc;
            sum_tc += dt * dc;
        }
    }
    if sum_t2 == 0.0 {
        return Err(MetricsError::Degenerate("truth"));
    }
    if sum_c2 == 0.0 {
        return Err(MetricsError::Degenerate("chart"));
    }
    let beta = sum_tc / sum_c2;
    // Explicit residual pass: the one-pass algebraic form cancels
    // catastrophically for near-perfect charts.
    let mut num = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dt = dist2(truth[i], truth[j]).sqrt();
            let dc = dist2(chart[i], chart[j]).sqrt();
            let r = beta * dc - dt;
            num += r * r;
        }
    }
    Ok((num / sum_t2).sqrt())
}

/// Default rank-metric neighborhood: 5% of n, at least 1, and small enough
/// that `k < n/2` stays satisfiable.
pub fn default_k(n: usize) -> usize {
    let five_percent = (0.05 * n as f64).round() as usize;
    let cap = if n >= 4 { (n - 1) / 2 } else { 1 };
    five_percent.clamp(1, cap)
}

/// All three scores in one report.
pub fn evaluate(
    truth: &[[f64; 2]],
    chart: &[[f64; 2]],
    k: Option<usize>,
) -> Result<MetricsReport, MetricsError> {
    let k = k.unwrap_or_else(|| default_k(truth.len()));
    Ok(MetricsReport {
        tw: trustworthiness(truth, chart, k)?,
        ct: continuity(truth, chart, k)?,
        ks: kruskal_stress(truth, chart)?,
        k_neighbors: k,
        n_scored: truth.len(),
    })
}
