//! Spectral transitivity and the spectral triadic decomposition of
//! undirected graphs.

pub mod clean;
pub mod decompose;
pub mod error;
pub mod extract;
pub mod graph;
pub mod index;
pub mod metrics;
pub mod report;
pub mod spectral;
pub mod sum;
pub mod triangles;
pub mod weights;

pub use clean::{CleanConfig, CleanLedger, CleanMode};
pub use decompose::{decompose, decompose_with, ledger_check, Cluster, ClusterEdges, DecomposeConfig, Decomposition};
pub use error::{Error, Result};
pub use extract::{extract, ExtractionResult};
pub use graph::{load_edge_list, load_edge_list_file, EdgeId, Graph, IngestOptions, IngestReport, VertexId};
pub use index::TriangleIndex;
pub use metrics::{all_cluster_metrics, summarize, ClusterMetrics, DecompositionSummary};
pub use triangles::{enumerate_triangles, Triangle};
pub use weights::{compute_tau, TauReport};
