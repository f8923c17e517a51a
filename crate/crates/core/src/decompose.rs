//! The full decomposition loop: clean, extract a cluster, delete it, repeat
//! until no live edge survives cleaning.
//!
//! Every triangle of G dies exactly once and is credited when it dies:
//! during cleaning to `T_C`, during cluster deletion to `T_X` when all three
//! vertices lie in the cluster and to `T_R` otherwise.

use log::{debug, info};
use serde::Serialize;

use crate::clean::{clean_exact_from, clean_passes, is_unclean, CleanConfig, CleanLedger, CleanMode};
use crate::error::{Error, Result};
use crate::extract::{extract, verify_extraction_guarantee, GuaranteeReport};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::index::TriangleIndex;
use crate::sum::CompensatedSum;
use crate::triangles::{enumerate_triangles, Triangle};
use crate::weights::{total_edge_weight, total_triangle_weight, TauReport};

/// Which edges count as internal to a cluster.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ClusterEdges {
    /// Edges still live in `H` when the cluster was extracted.
    #[default]
    #[serde(rename = "live")]
    Live,
    /// Every edge of G with both ends in the cluster.
    #[serde(rename = "g-induced")]
    Induced,
}

impl std::str::FromStr for ClusterEdges {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "live" => Ok(ClusterEdges::Live),
            "g-induced" | "induced" => Ok(ClusterEdges::Induced),
            other => Err(Error::Config(format!("unknown cluster edge mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DecomposeConfig {
    pub clean: CleanConfig,
    pub cluster_edges: ClusterEdges,
}

impl DecomposeConfig {
    pub fn new(clean: CleanConfig) -> Self {
        Self {
            clean,
            cluster_edges: ClusterEdges::Live,
        }
    }
}

/// Per-extraction diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionStats {
    pub pivot: VertexId,
    pub pivot_degree: usize,
    pub low_set_size: usize,
    pub sweep_set_size: usize,
    pub rho_total: f64,
    pub degenerate: bool,
    /// Every live edge passed the clean test when extraction ran.
    pub subgraph_clean: bool,
    pub guarantee: GuaranteeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    /// 1-based iteration of the decomposition loop that produced the cluster.
    pub round: usize,
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
    pub internal_edges: Vec<EdgeId>,
    pub internal_edge_weight: f64,
    /// Triangles spanned by `internal_edges`.
    pub internal_triangle_count: usize,
    pub internal_triangle_weight: f64,
    /// Weight credited to `T_X` when the cluster was removed.
    pub credited_triangle_weight: f64,
    pub extraction: ExtractionStats,
    /// Fewer than three vertices.
    pub small: bool,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Squared Frobenius norm of the cluster's submatrix: `2 * wt(internal edges)`.
    pub fn frobenius_weight(&self) -> f64 {
        2.0 * self.internal_edge_weight
    }
}

/// Weight of `T_C`, `T_X` and `T_R`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TriangleLedger {
    #[serde(rename = "wt_T_C")]
    pub cleaned: f64,
    #[serde(rename = "wt_T_X")]
    pub extracted: f64,
    #[serde(rename = "wt_T_R")]
    pub cut: f64,
}

impl TriangleLedger {
    pub fn total(&self) -> f64 {
        self.cleaned + self.extracted + self.cut
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CleanStats {
    pub edges_removed: usize,
    pub edge_weight_removed: f64,
    pub triangle_weight_removed: f64,
    /// Largest `destroyed / (epsilon * wt(e))` over single removals.
    pub worst_removal_ratio: f64,
    /// Passes mode: sweeps that removed something, summed over rounds.
    pub productive_sweeps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub clusters: Vec<Cluster>,
    pub ledger: TriangleLedger,
    /// Absent for a graph without edges.
    pub tau: Option<TauReport>,
    pub config: DecomposeConfig,
    pub clean: CleanStats,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub triangle_count: usize,
    pub total_edge_weight: f64,
    pub total_triangle_weight: f64,
    /// Largest gap between incremental and recomputed per-edge triangle
    /// weight over the edges still live at the end (normally none).
    pub final_drift: f64,
}

impl Decomposition {
    /// Cluster index of every vertex, `None` outside all clusters.
    pub fn assignment(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.vertex_count];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in &c.vertices {
                out[v as usize] = Some(i);
            }
        }
        out
    }
}

/// Enumerates triangles and decomposes with live internal edges.
pub fn decompose(graph: &Graph, config: &CleanConfig) -> Result<Decomposition> {
    decompose_with(graph, enumerate_triangles(graph), &DecomposeConfig::new(*config))
}

/// `triangles` must be the full enumeration of `graph`.
pub fn decompose_with(graph: &Graph, triangles: Vec<Triangle>, config: &DecomposeConfig) -> Result<Decomposition> {
    config.clean.validate()?;
    let eps = config.clean.epsilon;
    let triangle_count = triangles.len();
    let wt_e = total_edge_weight(graph);
    let wt_t = total_triangle_weight(graph, &triangles);
    let tau = if graph.edge_count() == 0 {
        None
    } else {
        Some(TauReport::from_totals(wt_e, wt_t)?)
    };

    let mut index = TriangleIndex::build(graph, triangles)?;
    let mut clean_ledger = CleanLedger::default();
    let mut productive_sweeps = 0;
    let mut extracted = CompensatedSum::new();
    let mut cut = CompensatedSum::new();
    let mut clusters = Vec::new();
    let mut in_cluster = vec![false; graph.vertex_count()];
    let mut seeds: Vec<EdgeId> = index.live_edges().collect();
    let mut updates = Vec::new();
    let mut dying = Vec::new();

    loop {
        let subgraph_clean = match config.clean.mode {
            CleanMode::Exact => {
                clean_exact_from(&mut index, &config.clean, &mut clean_ledger, std::mem::take(&mut seeds));
                true
            }
            CleanMode::Passes => {
                productive_sweeps += clean_passes(&mut index, &config.clean, &mut clean_ledger);
                index.live_edges().all(|e| !is_unclean(&index, e, eps))
            }
        };
        if index.live_edge_count() == 0 {
            break;
        }

        let result = extract(&index, eps)?;
        let round = clusters.len() + 1;
        for &v in &result.cluster {
            in_cluster[v as usize] = true;
        }
        let (internal_edges, internal_triangle_count, internal_triangle_weight) = match config.cluster_edges {
            ClusterEdges::Live => {
                let edges = live_internal_edges(&index, &result.cluster, &in_cluster);
                let count = count_live_internal_triangles(&index, &result.cluster, &in_cluster);
                (edges, count, result.internal_triangle_weight)
            }
            ClusterEdges::Induced => {
                let edges = induced_edges(graph, &result.cluster, &in_cluster);
                let (count, weight) = induced_triangles(graph, &result.cluster, &in_cluster);
                (edges, count, weight)
            }
        };
        let internal_edge_weight = internal_edges
            .iter()
            .map(|&e| graph.edge_weight(e))
            .collect::<CompensatedSum>();

        dying.clear();
        updates.clear();
        for &v in &result.cluster {
            index.delete_vertex_with(v, &mut |t, w| dying.push((t, w)), &mut updates);
        }
        let mut credited = CompensatedSum::new();
        for &(t, w) in &dying {
            if triangle_inside(&index.triangle(t).vertices(), &in_cluster) {
                credited.add(w);
            } else {
                cut.add(w);
            }
        }
        extracted.add(credited.value());
        for &v in &result.cluster {
            in_cluster[v as usize] = false;
        }
        if config.clean.mode == CleanMode::Exact {
            seeds = updates.iter().map(|u| u.edge).collect();
        }

        let guarantee = verify_extraction_guarantee(&result, eps);
        debug!(
            "round {round}: pivot {} |L|={} |C|={} |X|={} ratio={:?} holds={}",
            graph.label(result.pivot),
            result.low_set.len(),
            result.sweep_set.len(),
            result.cluster.len(),
            guarantee.ratio,
            guarantee.holds
        );
        clusters.push(Cluster {
            round,
            small: result.cluster.len() < 3,
            internal_edges,
            internal_edge_weight: internal_edge_weight.value(),
            internal_triangle_count,
            internal_triangle_weight,
            credited_triangle_weight: credited.value(),
            extraction: ExtractionStats {
                pivot: result.pivot,
                pivot_degree: graph.deg(result.pivot),
                low_set_size: result.low_set.len(),
                sweep_set_size: result.sweep_set.len(),
                rho_total: result.rho_total,
                degenerate: result.degenerate,
                subgraph_clean,
                guarantee,
            },
            vertices: result.cluster,
        });
    }

    info!(
        "decomposition finished: {} clusters, {} edges removed by cleaning",
        clusters.len(),
        clean_ledger.edges_removed()
    );
    Ok(Decomposition {
        clusters,
        ledger: TriangleLedger {
            cleaned: clean_ledger.triangle_weight_removed(),
            extracted: extracted.value(),
            cut: cut.value(),
        },
        tau,
        config: *config,
        clean: CleanStats {
            edges_removed: clean_ledger.edges_removed(),
            edge_weight_removed: clean_ledger.edge_weight_removed(),
            triangle_weight_removed: clean_ledger.triangle_weight_removed(),
            worst_removal_ratio: clean_ledger.worst_removal_ratio(),
            productive_sweeps,
        },
        vertex_count: graph.vertex_count(),
        edge_count: graph.edge_count(),
        triangle_count,
        total_edge_weight: wt_e,
        total_triangle_weight: wt_t,
        final_drift: index.max_drift(),
    })
}

fn triangle_inside(vertices: &[VertexId; 3], in_cluster: &[bool]) -> bool {
    vertices.iter().all(|&x| in_cluster[x as usize])
}

fn live_internal_edges(index: &TriangleIndex<'_>, cluster: &[VertexId], in_cluster: &[bool]) -> Vec<EdgeId> {
    let mut edges: Vec<EdgeId> = cluster
        .iter()
        .flat_map(|&u| {
            index
                .live_neighbors(u)
                .filter(move |&(w, _)| w > u && in_cluster[w as usize])
                .map(|(_, e)| e)
        })
        .collect();
    edges.sort_unstable();
    edges
}

fn count_live_internal_triangles(index: &TriangleIndex<'_>, cluster: &[VertexId], in_cluster: &[bool]) -> usize {
    crate::extract::live_triangles_meeting(index, cluster)
        .into_iter()
        .filter(|&t| triangle_inside(&index.triangle(t).vertices(), in_cluster))
        .count()
}

fn induced_edges(graph: &Graph, cluster: &[VertexId], in_cluster: &[bool]) -> Vec<EdgeId> {
    let mut edges: Vec<EdgeId> = cluster
        .iter()
        .flat_map(|&u| {
            graph
                .neighbors(u)
                .iter()
                .zip(graph.incident_edges(u))
                .filter(move |&(&w, _)| w > u && in_cluster[w as usize])
                .map(|(_, &e)| e)
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Count and weight of the triangles of G inside the cluster.
fn induced_triangles(graph: &Graph, cluster: &[VertexId], in_cluster: &[bool]) -> (usize, f64) {
    let mut count = 0;
    let mut weight = CompensatedSum::new();
    for &u in cluster {
        let up: Vec<VertexId> = graph
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&w| w > u && in_cluster[w as usize])
            .collect();
        for (i, &v) in up.iter().enumerate() {
            for &w in &up[i + 1..] {
                if graph.has_edge(v, w) {
                    count += 1;
                    weight.add(Triangle::new(u, v, w).weight(graph));
                }
            }
        }
    }
    (count, weight.value())
}

/// Residuals of the triangle partition identity and the cleaning budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerReport {
    pub total_triangle_weight: f64,
    pub ledger: TriangleLedger,
    /// `|wt(T_C) + wt(T_X) + wt(T_R) - wt(T)|`.
    pub partition_residual: f64,
    pub partition_tolerance: f64,
    pub partition_holds: bool,
    /// `epsilon * wt(E)`.
    pub clean_budget: f64,
    /// `wt(T_C) - epsilon * wt(E)`; nonpositive when the budget holds.
    pub clean_budget_slack: f64,
    pub clean_budget_holds: bool,
}

impl LedgerReport {
    pub fn holds(&self) -> bool {
        self.partition_holds && self.clean_budget_holds
    }
}

/// Recomputes `wt(T)` and `wt(E)` from `graph` and `triangles` and checks
/// the decomposition's ledger against them.
pub fn ledger_check(decomposition: &Decomposition, graph: &Graph, triangles: &[Triangle]) -> LedgerReport {
    let wt_t = total_triangle_weight(graph, triangles);
    let wt_e = total_edge_weight(graph);
    let ledger = decomposition.ledger;
    let partition_residual = (ledger.total() - wt_t).abs();
    let partition_tolerance = 1e-9 * wt_t;
    let clean_budget = decomposition.config.clean.epsilon * wt_e;
    LedgerReport {
        total_triangle_weight: wt_t,
        ledger,
        partition_residual,
        partition_tolerance,
        partition_holds: partition_residual <= partition_tolerance,
        clean_budget,
        clean_budget_slack: ledger.cleaned - clean_budget,
        clean_budget_holds: ledger.cleaned <= clean_budget,
    }
}
