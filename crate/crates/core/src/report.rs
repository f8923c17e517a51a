//! Output documents: `clusters.json`, `clusters.csv`, `metrics.csv` and
//! `summary.json`. Field order is fixed by the structs below, so identical
//! runs produce identical bytes.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::clean::CleanMode;
use crate::decompose::{CleanStats, ClusterEdges, Decomposition, TriangleLedger};
use crate::error::{Error, Result};
use crate::extract::GuaranteeReport;
use crate::graph::Graph;
use crate::metrics::{ClusterMetrics, DecompositionSummary};
use crate::weights::TauReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub epsilon: f64,
    pub clean_mode: CleanMode,
    pub max_passes: usize,
    pub cluster_edges: ClusterEdges,
}

impl RunInfo {
    pub fn of(d: &Decomposition) -> Self {
        Self {
            vertices: d.vertex_count,
            edges: d.edge_count,
            triangles: d.triangle_count,
            epsilon: d.config.clean.epsilon,
            clean_mode: d.config.clean.mode,
            max_passes: d.config.clean.max_passes,
            cluster_edges: d.config.cluster_edges,
        }
    }
}

#[derive(Serialize)]
struct ClusterRecord<'a> {
    cluster_id: usize,
    round: usize,
    size: usize,
    small: bool,
    pivot: &'a str,
    pivot_degree: usize,
    low_set_size: usize,
    sweep_set_size: usize,
    degenerate: bool,
    subgraph_clean: bool,
    internal_edges: usize,
    internal_edge_weight: f64,
    internal_triangles: usize,
    internal_triangle_weight: f64,
    credited_triangle_weight: f64,
    guarantee: &'a GuaranteeReport,
    vertices: Vec<&'a str>,
}

#[derive(Serialize)]
struct ClustersDocument<'a> {
    format_version: u32,
    run: RunInfo,
    tau: Option<&'a TauReport>,
    ledger: &'a TriangleLedger,
    cleaning: &'a CleanStats,
    clusters: Vec<ClusterRecord<'a>>,
}

fn finish_json<W: Write>(mut out: W, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Metadata, ledger and every cluster with original vertex labels.
pub fn write_clusters_json<W: Write>(graph: &Graph, d: &Decomposition, out: W) -> Result<()> {
    let clusters = d
        .clusters
        .iter()
        .enumerate()
        .map(|(i, c)| ClusterRecord {
            cluster_id: i,
            round: c.round,
            size: c.size(),
            small: c.small,
            pivot: graph.label(c.extraction.pivot),
            pivot_degree: c.extraction.pivot_degree,
            low_set_size: c.extraction.low_set_size,
            sweep_set_size: c.extraction.sweep_set_size,
            degenerate: c.extraction.degenerate,
            subgraph_clean: c.extraction.subgraph_clean,
            internal_edges: c.internal_edges.len(),
            internal_edge_weight: c.internal_edge_weight,
            internal_triangles: c.internal_triangle_count,
            internal_triangle_weight: c.internal_triangle_weight,
            credited_triangle_weight: c.credited_triangle_weight,
            guarantee: &c.extraction.guarantee,
            vertices: c.vertices.iter().map(|&v| graph.label(v)).collect(),
        })
        .collect();
    finish_json(
        out,
        &ClustersDocument {
            format_version: FORMAT_VERSION,
            run: RunInfo::of(d),
            tau: d.tau.as_ref(),
            ledger: &d.ledger,
            cleaning: &d.clean,
            clusters,
        },
    )
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Serialize)]
struct MembershipRow<'a> {
    vertex_label: &'a str,
    cluster_id: usize,
    round: usize,
}

/// One `vertex_label,cluster_id,round` row per clustered vertex.
pub fn write_clusters_csv<W: Write>(graph: &Graph, d: &Decomposition, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if d.clusters.is_empty() {
        w.write_record(["vertex_label", "cluster_id", "round"])
            .map_err(csv_error)?;
    }
    for (i, c) in d.clusters.iter().enumerate() {
        for &v in &c.vertices {
            w.serialize(MembershipRow {
                vertex_label: graph.label(v),
                cluster_id: i,
                round: c.round,
            })
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub const METRICS_HEADER: [&str; 13] = [
    "cluster_id",
    "round",
    "size",
    "internal_edges",
    "internal_triangles",
    "def_uniformity",
    "strong_uniformity",
    "empirical_uniformity",
    "edge_density",
    "triangle_density",
    "frobenius_weight",
    "internal_triangle_weight",
    "triangle_bound_holds",
];

/// One row per cluster; undefined metrics are empty fields.
pub fn write_metrics_csv<W: Write>(metrics: &[ClusterMetrics], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if metrics.is_empty() {
        w.write_record(METRICS_HEADER).map_err(csv_error)?;
    }
    for m in metrics {
        w.serialize(m).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct SummaryDocument<'a> {
    pub format_version: u32,
    pub run: RunInfo,
    pub tau: Option<&'a TauReport>,
    pub ledger: &'a TriangleLedger,
    pub cleaning: &'a CleanStats,
    pub summary: &'a DecompositionSummary,
}

pub fn write_summary_json<W: Write>(d: &Decomposition, summary: &DecompositionSummary, out: W) -> Result<()> {
    finish_json(
        out,
        &SummaryDocument {
            format_version: FORMAT_VERSION,
            run: RunInfo::of(d),
            tau: d.tau.as_ref(),
            ledger: &d.ledger,
            cleaning: &d.clean,
            summary,
        },
    )
}

/// Plain-text table of the headline aggregates.
pub fn summary_table(summary: &DecompositionSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>9} {:>8} {:>9} {:>9} {:>6} {:>6} {:>8} {:>9} {:>9}",
        "#clusters", "%vtx", "%tri-wt", "coverage", "min", "max", "mean", "unif-avg", "unif-p10"
    );
    let _ = writeln!(
        s,
        "{:>9} {:>8.2} {:>9.2} {:>9.2} {:>6} {:>6} {:>8.2} {:>9.3} {:>9.3}",
        summary.cluster_count,
        summary.pct_vertices_in_clusters,
        summary.pct_triangle_weight,
        summary.coverage_pct,
        summary.size_min,
        summary.size_max,
        summary.size_mean,
        summary.empirical_uniformity.mean,
        summary.empirical_uniformity.p10
    );
    s
}
