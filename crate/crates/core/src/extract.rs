//! One extraction step: grow a cluster around the minimum-degree live vertex.
//!
//! With pivot `v` of minimum degree in G among live vertices:
//!
//! * `L` holds the live neighbors `u` of `v` with `d_u <= 2 d_v / epsilon`;
//! * `rho_w` is the weight of live triangles `(w, u, u')` with `u, u'` in `L`;
//! * the sweep set `C` is the shortest prefix of vertices sorted by
//!   descending `rho` whose mass reaches half of the total;
//! * the cluster is `{v} ∪ L ∪ C`.

use std::collections::HashMap;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::index::{TriangleId, TriangleIndex};
use crate::sum::CompensatedSum;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionResult {
    pub pivot: VertexId,
    /// Sorted ascending.
    pub low_set: Vec<VertexId>,
    /// In sweep order (descending `rho`, then ascending id).
    pub sweep_set: Vec<VertexId>,
    /// `{pivot} ∪ L ∪ C`, sorted ascending.
    pub cluster: Vec<VertexId>,
    /// Every vertex with nonzero `rho`, in sweep order.
    pub rho: Vec<(VertexId, f64)>,
    pub rho_total: f64,
    /// Weight of live triangles with all three vertices in the cluster.
    pub internal_triangle_weight: f64,
    /// Weight of live triangles with at least one vertex in the cluster.
    pub incident_triangle_weight: f64,
    /// `rho_total` was zero and the cluster fell back to `{pivot} ∪ L`.
    pub degenerate: bool,
}

impl ExtractionResult {
    pub fn contains(&self, v: VertexId) -> bool {
        self.cluster.binary_search(&v).is_ok()
    }
}

/// Extracts around [`TriangleIndex::min_degree_live_vertex`].
pub fn extract(index: &TriangleIndex<'_>, epsilon: f64) -> Result<ExtractionResult> {
    if index.live_edge_count() == 0 {
        return Err(Error::EmptySubgraph);
    }
    let pivot = index.min_degree_live_vertex().ok_or(Error::EmptySubgraph)?;
    Ok(extract_at(index, epsilon, pivot))
}

/// Extraction with an explicit pivot.
pub fn extract_at(index: &TriangleIndex<'_>, epsilon: f64, pivot: VertexId) -> ExtractionResult {
    let graph = index.graph();
    let limit = 2.0 * graph.deg(pivot) as f64 / epsilon;
    let mut low_set: Vec<VertexId> = index
        .live_neighbors(pivot)
        .map(|(u, _)| u)
        .filter(|&u| graph.deg(u) as f64 <= limit)
        .collect();
    low_set.sort_unstable();

    let in_low = |x: VertexId| low_set.binary_search(&x).is_ok();
    let mut rho_map: HashMap<VertexId, f64> = HashMap::new();
    for &u in &low_set {
        for (u2, e) in index.live_neighbors(u) {
            if u2 <= u || !in_low(u2) {
                continue;
            }
            for t in index.live_triangles_of(e) {
                let apex = index
                    .triangle(t)
                    .vertices()
                    .into_iter()
                    .find(|&x| x != u && x != u2)
                    .unwrap();
                *rho_map.entry(apex).or_insert(0.0) += index.triangle_weight(t);
            }
        }
    }
    let mut rho: Vec<(VertexId, f64)> = rho_map.into_iter().filter(|&(_, r)| r > 0.0).collect();
    rho.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let rho_total = rho.iter().map(|&(_, r)| r).collect::<CompensatedSum>().value();

    let mut sweep_set = Vec::new();
    let mut acc = CompensatedSum::new();
    for &(w, r) in &rho {
        if acc.value() >= 0.5 * rho_total {
            break;
        }
        acc.add(r);
        sweep_set.push(w);
    }

    let degenerate = rho_total == 0.0;
    if degenerate {
        warn!(
            "degenerate extraction at pivot {} (|L| = {}): no triangle weight inside L; falling back to pivot plus L",
            graph.label(pivot),
            low_set.len()
        );
    }

    let mut cluster: Vec<VertexId> = std::iter::once(pivot)
        .chain(low_set.iter().copied())
        .chain(sweep_set.iter().copied())
        .collect();
    cluster.sort_unstable();
    cluster.dedup();

    let (internal, incident) = triangle_tallies(index, &cluster);
    ExtractionResult {
        pivot,
        low_set,
        sweep_set,
        cluster,
        rho,
        rho_total,
        internal_triangle_weight: internal,
        incident_triangle_weight: incident,
        degenerate,
    }
}

/// Live triangles meeting the sorted vertex set `set`, ascending by id.
pub fn live_triangles_meeting(index: &TriangleIndex<'_>, set: &[VertexId]) -> Vec<TriangleId> {
    let mut ids = Vec::new();
    for &x in set {
        for (_, e) in index.live_neighbors(x) {
            ids.extend(index.live_triangles_of(e));
        }
    }
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// `(inside, meeting)` live triangle weight for the sorted vertex set `set`.
pub fn triangle_tallies(index: &TriangleIndex<'_>, set: &[VertexId]) -> (f64, f64) {
    let mut internal = CompensatedSum::new();
    let mut incident = CompensatedSum::new();
    for t in live_triangles_meeting(index, set) {
        let w = index.triangle_weight(t);
        incident.add(w);
        if index
            .triangle(t)
            .vertices()
            .iter()
            .all(|x| set.binary_search(x).is_ok())
        {
            internal.add(w);
        }
    }
    (internal.value(), incident.value())
}

/// Outcome of checking `internal >= (epsilon^8 / 2000) * incident`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GuaranteeReport {
    pub internal_triangle_weight: f64,
    pub incident_triangle_weight: f64,
    pub required_fraction: f64,
    /// `internal / incident`, absent when nothing meets the cluster.
    pub ratio: Option<f64>,
    pub holds: bool,
}

pub fn guarantee_fraction(epsilon: f64) -> f64 {
    epsilon.powi(8) / 2000.0
}

pub fn verify_extraction_guarantee(result: &ExtractionResult, epsilon: f64) -> GuaranteeReport {
    check_guarantee(
        result.internal_triangle_weight,
        result.incident_triangle_weight,
        epsilon,
    )
}

pub fn check_guarantee(internal: f64, incident: f64, epsilon: f64) -> GuaranteeReport {
    let required_fraction = guarantee_fraction(epsilon);
    GuaranteeReport {
        internal_triangle_weight: internal,
        incident_triangle_weight: incident,
        required_fraction,
        ratio: (incident > 0.0).then(|| internal / incident),
        holds: internal >= required_fraction * incident,
    }
}
