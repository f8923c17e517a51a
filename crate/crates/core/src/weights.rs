//! Edge and triangle weights, and the spectral transitivity computed from
//! them.
//!
//! With degrees `d` taken from the loaded graph, `wt(e) = 1/(d_u d_v)` and
//! `wt(t) = 1/(d_u d_v d_w)`. The squared Frobenius norm of the normalized
//! adjacency matrix is `2 wt(E)` and the trace of its cube is `6 wt(T)`, so
//! `tau = sum(lambda^3) / sum(lambda^2) = 3 wt(T) / wt(E)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::sum::compensated_sum;
use crate::triangles::Triangle;

pub type Weight = f64;

pub fn edge_weight(graph: &Graph, e: EdgeId) -> Weight {
    graph.edge_weight(e)
}

pub fn triangle_weight(graph: &Graph, t: &Triangle) -> Weight {
    t.weight(graph)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauReport {
    #[serde(rename = "edge_weight_total")]
    pub total_edge_weight: f64,
    #[serde(rename = "triangle_weight_total")]
    pub total_triangle_weight: f64,
    pub tau: f64,
}

impl TauReport {
    pub fn from_totals(total_edge_weight: f64, total_triangle_weight: f64) -> Result<Self> {
        if total_edge_weight <= 0.0 {
            return Err(Error::UndefinedTau);
        }
        Ok(Self {
            total_edge_weight,
            total_triangle_weight,
            tau: 3.0 * total_triangle_weight / total_edge_weight,
        })
    }

    /// `||A||_F^2 = 2 wt(E)`.
    pub fn frobenius_norm_sq(&self) -> f64 {
        2.0 * self.total_edge_weight
    }
}

pub fn total_edge_weight(graph: &Graph) -> f64 {
    compensated_sum((0..graph.edge_count() as EdgeId).map(|e| graph.edge_weight(e)))
}

pub fn total_triangle_weight(graph: &Graph, triangles: &[Triangle]) -> f64 {
    compensated_sum(triangles.iter().map(|t| t.weight(graph)))
}

/// `triangles` must be the full enumeration of `graph`.
pub fn compute_tau(graph: &Graph, triangles: &[Triangle]) -> Result<TauReport> {
    if graph.edge_count() == 0 {
        return Err(Error::UndefinedTau);
    }
    TauReport::from_totals(total_edge_weight(graph), total_triangle_weight(graph, triangles))
}
