//! Dense normalized adjacency matrices and a cyclic Jacobi eigensolver, used
//! to check the combinatorial weights against the spectrum on small graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::sum::compensated_sum;
use crate::triangles::Triangle;

pub const DEFAULT_DENSE_LIMIT: usize = 2000;
/// Convergence threshold on the off-diagonal Frobenius norm.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;

/// Symmetric matrix with `1/sqrt(d_i d_j)` on each selected edge (degrees
/// from G) and zeros elsewhere, including the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAdjacency {
    /// Row `i` corresponds to `vertices[i]`.
    pub vertices: Vec<VertexId>,
    /// Row-major `n x n`.
    pub entries: Vec<f64>,
}

impl NormalizedAdjacency {
    /// The submatrix on `subset` (every vertex when `None`) over all edges of
    /// G inside it.
    pub fn build(graph: &Graph, subset: Option<&[VertexId]>, dense_limit: usize) -> Result<Self> {
        let vertices = subset_vertices(graph, subset)?;
        check_limit(vertices.len(), dense_limit)?;
        let mut m = Self::zeros(vertices);
        let n = m.n();
        for i in 0..n {
            let u = m.vertices[i];
            for &w in graph.neighbors(u) {
                if let Ok(j) = m.vertices.binary_search(&w) {
                    m.entries[i * n + j] = entry(graph, u, w);
                }
            }
        }
        Ok(m)
    }

    /// The submatrix on the sorted, duplicate-free `vertices` over the given
    /// edges only.
    pub fn from_edges(graph: &Graph, vertices: &[VertexId], edges: &[EdgeId], dense_limit: usize) -> Result<Self> {
        let vertices = subset_vertices(graph, Some(vertices))?;
        check_limit(vertices.len(), dense_limit)?;
        let mut m = Self::zeros(vertices);
        let n = m.n();
        for &e in edges {
            if e as usize >= graph.edge_count() {
                return Err(Error::Config(format!("edge id {e} out of range")));
            }
            let (u, w) = graph.edge(e);
            let (Ok(i), Ok(j)) = (m.vertices.binary_search(&u), m.vertices.binary_search(&w)) else {
                return Err(Error::Config(format!(
                    "edge {e} has an endpoint outside the vertex set"
                )));
            };
            let x = entry(graph, u, w);
            m.entries[i * n + j] = x;
            m.entries[j * n + i] = x;
        }
        Ok(m)
    }

    fn zeros(vertices: Vec<VertexId>) -> Self {
        let n = vertices.len();
        Self {
            vertices,
            entries: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n() + j]
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|x| x * x))
    }
}

fn entry(graph: &Graph, u: VertexId, w: VertexId) -> f64 {
    1.0 / (graph.deg(u) as f64 * graph.deg(w) as f64).sqrt()
}

fn subset_vertices(graph: &Graph, subset: Option<&[VertexId]>) -> Result<Vec<VertexId>> {
    let mut vs: Vec<VertexId> = match subset {
        Some(s) => s.to_vec(),
        None => (0..graph.vertex_count() as VertexId).collect(),
    };
    vs.sort_unstable();
    vs.dedup();
    if let Some(&v) = vs.last() {
        if v as usize >= graph.vertex_count() {
            return Err(Error::InvalidVertex(v as usize));
        }
    }
    Ok(vs)
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::DenseLimit { n, limit })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub sweeps: usize,
}

impl Spectrum {
    pub fn power_sum(&self, p: i32) -> f64 {
        compensated_sum(self.eigenvalues.iter().map(|l| l.powi(p)))
    }

    pub fn trace(&self) -> f64 {
        self.power_sum(1)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |r, l| r.max(l.abs()))
    }

    /// `sum(lambda^3) / sum(lambda^2)`, `None` for the zero matrix.
    pub fn tau(&self) -> Option<f64> {
        let sq = self.power_sum(2);
        (sq > 0.0).then(|| self.power_sum(3) / sq)
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Every eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn eigenvalues(matrix: &NormalizedAdjacency) -> Result<Spectrum> {
    symmetric_eigenvalues(matrix.entries.clone(), matrix.n())
}

/// Eigenvalues of the symmetric row-major `n x n` matrix `a`, descending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Spectrum> {
    assert_eq!(a.len(), n * n, "matrix is not n x n");
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a, n);
    while off >= OFF_DIAGONAL_TOLERANCE {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a, n);
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    Ok(Spectrum { eigenvalues, sweeps })
}

/// Spectral side against combinatorial side for one vertex subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub sum_sq: f64,
    /// `2 * wt(E(S))`.
    pub expected_sum_sq: f64,
    pub sum_cube: f64,
    /// `6 * wt(T(S))`.
    pub expected_sum_cube: f64,
    pub sum_sq_holds: bool,
    pub sum_cube_holds: bool,
    /// `wt(T(S)) <= sum_sq / 6`.
    pub triangle_bound_holds: bool,
    pub trace: f64,
    pub spectral_radius: f64,
    pub trace_holds: bool,
    pub radius_holds: bool,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.sum_sq_holds && self.sum_cube_holds && self.triangle_bound_holds && self.trace_holds && self.radius_holds
    }
}

/// `|a - b| <= 1e-8 + 1e-8 * |b|`.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 + 1e-8 * b.abs()
}

/// Edge and triangle weight of the subgraph of G induced on sorted `vertices`.
pub fn induced_weights(graph: &Graph, vertices: &[VertexId]) -> (f64, f64) {
    let inside = |x: VertexId| vertices.binary_search(&x).is_ok();
    let mut edges = Vec::new();
    let mut tris = Vec::new();
    for &u in vertices {
        let up: Vec<VertexId> = graph
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&w| w > u && inside(w))
            .collect();
        for (i, &v) in up.iter().enumerate() {
            edges.push(graph.edge_weight(graph.edge_id(u, v).unwrap()));
            for &w in &up[i + 1..] {
                if graph.has_edge(v, w) {
                    tris.push(Triangle::new(u, v, w).weight(graph));
                }
            }
        }
    }
    (compensated_sum(edges), compensated_sum(tris))
}

/// Checks `sum(lambda^2) = 2 wt(E(S))`, `sum(lambda^3) = 6 wt(T(S))`,
/// `wt(T(S)) <= ||A|_S||^2 / 6`, zero trace and spectral radius at most 1
/// on the submatrix induced by `subset` (all of G when `None`).
pub fn verify_identities(graph: &Graph, subset: Option<&[VertexId]>, dense_limit: usize) -> Result<IdentityReport> {
    let matrix = NormalizedAdjacency::build(graph, subset, dense_limit)?;
    let spectrum = eigenvalues(&matrix)?;
    let (wt_e, wt_t) = induced_weights(graph, &matrix.vertices);
    let sum_sq = spectrum.power_sum(2);
    let sum_cube = spectrum.power_sum(3);
    let trace = spectrum.trace();
    let spectral_radius = spectrum.spectral_radius();
    Ok(IdentityReport {
        n: matrix.n(),
        sum_sq,
        expected_sum_sq: 2.0 * wt_e,
        sum_cube,
        expected_sum_cube: 6.0 * wt_t,
        sum_sq_holds: close(sum_sq, 2.0 * wt_e),
        sum_cube_holds: close(sum_cube, 6.0 * wt_t),
        triangle_bound_holds: wt_t <= sum_sq / 6.0 + 1e-12,
        trace,
        spectral_radius,
        trace_holds: trace.abs() <= 1e-9,
        radius_holds: spectral_radius <= 1.0 + 1e-9,
    })
}
