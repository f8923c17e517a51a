//! Cluster quality: uniformity of the normalized submatrix, densities, and
//! coverage aggregates over a decomposition.
//!
//! A cluster `S` of size `k` is read as the `k x k` submatrix of the
//! normalized adjacency matrix restricted to its internal edges, with entry
//! `1/sqrt(d_s d_t)` (degrees from G) on each internal edge and zero
//! elsewhere. Every quantity below looks at the `k(k-1)` off-diagonal slots;
//! the matrix is symmetric, so unordered pairs give the same fractions.

use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{Cluster, Decomposition};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::sum::compensated_sum;

/// Bisection steps for every largest-feasible-alpha search.
pub const SEARCH_ITERATIONS: usize = 40;

/// Relative slack when comparing an entry against a multiple of the mean,
/// so that a matrix of identical entries compares equal to its own mean.
const MEAN_SLACK: f64 = 1e-12;

/// Largest `alpha` in `[0, 1]` with `feasible(alpha)`, for a downward-closed
/// predicate with `feasible(0)`. Returns the lower end of the final bracket.
pub fn largest_feasible(feasible: impl Fn(f64) -> bool) -> f64 {
    if feasible(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..SEARCH_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Nonzero off-diagonal entries of a cluster submatrix, one per unordered pair.
#[derive(Clone, Debug)]
struct Entries {
    /// Number of unordered pairs, `k(k-1)/2`.
    pairs: usize,
    k: usize,
    /// Sorted ascending.
    values: Vec<f64>,
}

impl Entries {
    fn new(k: usize, mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self {
            pairs: k * k.saturating_sub(1) / 2,
            k,
            values,
        }
    }

    fn count_in(&self, lo: f64, hi: f64) -> usize {
        let a = self.values.partition_point(|&x| x < lo);
        let b = self.values.partition_point(|&x| x <= hi);
        b.saturating_sub(a)
    }

    /// At least an `alpha` fraction of slots lie in
    /// `[alpha/(k-1), 1/(alpha (k-1))]`.
    fn alpha_uniform(&self, alpha: f64) -> bool {
        if self.pairs == 0 {
            return false;
        }
        if alpha <= 0.0 {
            return true;
        }
        let km1 = (self.k - 1) as f64;
        let inside = self.count_in(alpha / km1, 1.0 / (alpha * km1));
        inside as f64 >= alpha * self.pairs as f64
    }
}

struct ClusterMatrix {
    whole: Entries,
    /// Closed in-cluster neighborhood of each member.
    neighborhoods: Vec<Entries>,
    all_values_sum: f64,
}

fn entry(graph: &Graph, s: VertexId, t: VertexId) -> f64 {
    1.0 / (graph.deg(s) as f64 * graph.deg(t) as f64).sqrt()
}

impl ClusterMatrix {
    fn new(graph: &Graph, vertices: &[VertexId], edges: &[EdgeId], with_neighborhoods: bool) -> Result<Self> {
        let k = vertices.len();
        if k < 2 {
            return Err(Error::UndefinedMetric(format!(
                "uniformity needs at least 2 vertices, got {k}"
            )));
        }
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(Error::UndefinedMetric("cluster lists a vertex twice".into()));
        }
        let pos = |v: VertexId| sorted.binary_search(&v).ok();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut values = Vec::with_capacity(edges.len());
        for &e in edges {
            let (u, v) = graph.edge(e);
            let (Some(i), Some(j)) = (pos(u), pos(v)) else {
                return Err(Error::UndefinedMetric(format!("edge {e} leaves the cluster")));
            };
            values.push(entry(graph, u, v));
            if with_neighborhoods {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        let all_values_sum = compensated_sum(values.iter().copied());
        let whole = Entries::new(k, values);
        let neighborhoods = if with_neighborhoods {
            let mut member = vec![false; k];
            (0..k)
                .map(|i| {
                    let mut closed = adj[i].clone();
                    closed.push(i);
                    closed.sort_unstable();
                    for &x in &closed {
                        member[x] = true;
                    }
                    let mut vals = Vec::new();
                    for &x in &closed {
                        for &y in &adj[x] {
                            if y > x && member[y] {
                                vals.push(entry(graph, sorted[x], sorted[y]));
                            }
                        }
                    }
                    for &x in &closed {
                        member[x] = false;
                    }
                    Entries::new(closed.len(), vals)
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            whole,
            neighborhoods,
            all_values_sum,
        })
    }

    fn strongly_uniform(&self, alpha: f64) -> bool {
        if !self.whole.alpha_uniform(alpha) {
            return false;
        }
        let good = self.neighborhoods.iter().filter(|n| n.alpha_uniform(alpha)).count();
        good as f64 >= alpha * self.neighborhoods.len() as f64
    }

    fn empirically_uniform(&self, alpha: f64) -> bool {
        let w = &self.whole;
        let mean = self.all_values_sum / w.pairs as f64;
        let cutoff = alpha * mean * (1.0 - MEAN_SLACK);
        let above = w.values.len() - w.values.partition_point(|&x| x < cutoff);
        above as f64 >= alpha * w.pairs as f64
    }
}

/// Largest `alpha` such that at least an `alpha` fraction of the off-diagonal
/// entries lie in `[alpha/(k-1), 1/(alpha (k-1))]`.
pub fn def_uniformity(graph: &Graph, vertices: &[VertexId], edges: &[EdgeId]) -> Result<f64> {
    let m = ClusterMatrix::new(graph, vertices, edges, false)?;
    Ok(largest_feasible(|a| m.whole.alpha_uniform(a)))
}

/// Largest `alpha` such that the cluster is `alpha`-uniform and at least an
/// `alpha` fraction of members `s` have an `alpha`-uniform submatrix on their
/// closed in-cluster neighborhood `{s} ∪ N(s, S)`.
pub fn strong_uniformity(graph: &Graph, vertices: &[VertexId], edges: &[EdgeId]) -> Result<f64> {
    let m = ClusterMatrix::new(graph, vertices, edges, true)?;
    Ok(largest_feasible(|a| m.strongly_uniform(a)))
}

/// Largest `alpha` such that at least an `alpha` fraction of the
/// off-diagonal entries are at least `alpha` times the mean off-diagonal
/// entry (zeros included in the mean). Zero for a cluster without edges.
pub fn empirical_uniformity(graph: &Graph, vertices: &[VertexId], edges: &[EdgeId]) -> Result<f64> {
    let m = ClusterMatrix::new(graph, vertices, edges, false)?;
    if m.whole.values.is_empty() {
        return Ok(0.0);
    }
    Ok(largest_feasible(|a| m.empirically_uniform(a)))
}

/// `|edges| / C(k,2)`.
pub fn edge_density(k: usize, edge_count: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::UndefinedMetric(format!(
            "edge density needs at least 2 vertices, got {k}"
        )));
    }
    Ok(edge_count as f64 / (k * (k - 1) / 2) as f64)
}

/// `|triangles| / C(k,3)`.
pub fn triangle_density(k: usize, triangle_count: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::UndefinedMetric(format!(
            "triangle density needs at least 3 vertices, got {k}"
        )));
    }
    Ok(triangle_count as f64 / (k * (k - 1) * (k - 2) / 6) as f64)
}

pub fn cluster_densities(k: usize, edge_count: usize, triangle_count: usize) -> (Result<f64>, Result<f64>) {
    (edge_density(k, edge_count), triangle_density(k, triangle_count))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterMetrics {
    pub cluster_id: usize,
    pub round: usize,
    pub size: usize,
    pub internal_edges: usize,
    pub internal_triangles: usize,
    /// `None` when the cluster has fewer than 2 vertices.
    pub def_uniformity: Option<f64>,
    pub strong_uniformity: Option<f64>,
    pub empirical_uniformity: Option<f64>,
    pub edge_density: Option<f64>,
    /// `None` when the cluster has fewer than 3 vertices.
    pub triangle_density: Option<f64>,
    /// `2 * wt(internal edges)`.
    pub frobenius_weight: f64,
    pub internal_triangle_weight: f64,
    /// `internal_triangle_weight <= frobenius_weight / 6`.
    pub triangle_bound_holds: bool,
}

/// `wt(T_S) <= ||A|_S||^2 / 6`, up to rounding.
pub fn triangle_frobenius_bound(triangle_weight: f64, frobenius_weight: f64) -> bool {
    triangle_weight <= frobenius_weight / 6.0 * (1.0 + 1e-12)
}

pub fn cluster_metrics(graph: &Graph, cluster_id: usize, cluster: &Cluster) -> ClusterMetrics {
    let k = cluster.size();
    let (vs, es) = (&cluster.vertices, &cluster.internal_edges);
    let frobenius_weight = cluster.frobenius_weight();
    ClusterMetrics {
        cluster_id,
        round: cluster.round,
        size: k,
        internal_edges: es.len(),
        internal_triangles: cluster.internal_triangle_count,
        def_uniformity: def_uniformity(graph, vs, es).ok(),
        strong_uniformity: strong_uniformity(graph, vs, es).ok(),
        empirical_uniformity: empirical_uniformity(graph, vs, es).ok(),
        edge_density: edge_density(k, es.len()).ok(),
        triangle_density: triangle_density(k, cluster.internal_triangle_count).ok(),
        frobenius_weight,
        internal_triangle_weight: cluster.internal_triangle_weight,
        triangle_bound_holds: triangle_frobenius_bound(cluster.internal_triangle_weight, frobenius_weight),
    }
}

/// Metrics for every cluster, in cluster order.
pub fn all_cluster_metrics(graph: &Graph, decomposition: &Decomposition) -> Vec<ClusterMetrics> {
    decomposition
        .clusters
        .par_iter()
        .enumerate()
        .map(|(i, c)| cluster_metrics(graph, i, c))
        .collect()
}

/// Mean, 10th percentile (nearest rank) and minimum of a sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Spread {
    pub mean: f64,
    pub p10: f64,
    pub min: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.1 * sorted.len() as f64).ceil() as usize).max(1);
        Self {
            mean: compensated_sum(sorted.iter().copied()) / sorted.len() as f64,
            p10: sorted[rank - 1],
            min: sorted[0],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub cluster_count: usize,
    pub vertex_count: usize,
    pub vertices_in_clusters: usize,
    pub pct_vertices_in_clusters: f64,
    /// `100 * wt(T_X) / wt(T)`.
    pub pct_triangle_weight: f64,
    /// `100 * sum of cluster Frobenius weights / (2 wt(E))`.
    pub coverage_pct: f64,
    pub size_min: usize,
    pub size_max: usize,
    pub size_mean: f64,
    pub def_uniformity: Spread,
    pub strong_uniformity: Spread,
    pub empirical_uniformity: Spread,
    pub edge_density: Spread,
    pub small_clusters: usize,
    pub degenerate_extractions: usize,
    pub guarantee_failures: usize,
    pub triangle_bound_failures: usize,
}

fn pct(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        100.0 * num / den
    } else {
        0.0
    }
}

pub fn summarize(decomposition: &Decomposition, metrics: &[ClusterMetrics]) -> DecompositionSummary {
    let clusters = &decomposition.clusters;
    let sizes: Vec<usize> = clusters.iter().map(Cluster::size).collect();
    let in_clusters: usize = sizes.iter().sum();
    let frobenius = compensated_sum(metrics.iter().map(|m| m.frobenius_weight));
    let spread = |f: fn(&ClusterMetrics) -> Option<f64>| Spread::of(&metrics.iter().filter_map(f).collect::<Vec<_>>());
    DecompositionSummary {
        cluster_count: clusters.len(),
        vertex_count: decomposition.vertex_count,
        vertices_in_clusters: in_clusters,
        pct_vertices_in_clusters: pct(in_clusters as f64, decomposition.vertex_count as f64),
        pct_triangle_weight: pct(decomposition.ledger.extracted, decomposition.total_triangle_weight),
        coverage_pct: pct(frobenius, 2.0 * decomposition.total_edge_weight),
        size_min: sizes.iter().copied().min().unwrap_or(0),
        size_max: sizes.iter().copied().max().unwrap_or(0),
        size_mean: if sizes.is_empty() {
            0.0
        } else {
            in_clusters as f64 / sizes.len() as f64
        },
        def_uniformity: spread(|m| m.def_uniformity),
        strong_uniformity: spread(|m| m.strong_uniformity),
        empirical_uniformity: spread(|m| m.empirical_uniformity),
        edge_density: spread(|m| m.edge_density),
        small_clusters: clusters.iter().filter(|c| c.small).count(),
        degenerate_extractions: clusters.iter().filter(|c| c.extraction.degenerate).count(),
        guarantee_failures: clusters.iter().filter(|c| !c.extraction.guarantee.holds).count(),
        triangle_bound_failures: metrics.iter().filter(|m| !m.triangle_bound_holds).count(),
    }
}
