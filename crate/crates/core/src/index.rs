//! The live subgraph `H` under edge deletion.
//!
//! Triangle ids index the immutable enumeration; liveness of edges and
//! triangles is tracked in bitmaps. Each edge keeps the list of triangle ids
//! containing it, the number of those still live, and the running sum of
//! their weights. Deleting an edge visits its list once, so the total work of
//! deleting every edge is `O(T)`.

use std::cell::Cell;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::triangles::Triangle;

pub type TriangleId = u32;

/// A changed per-edge incident triangle weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeUpdate {
    pub edge: EdgeId,
    pub tri_weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeleteOutcome {
    /// The edge was live; lists every other edge whose incident triangle
    /// weight changed, with its new value.
    Deleted(Vec<EdgeUpdate>),
    /// The edge was already dead; nothing changed.
    AlreadyDead,
}

/// Live vertices ordered by `(degree in G, id)`. Vertices only ever leave
/// `H`, so the position of the first live entry never moves backwards.
#[derive(Clone, Debug)]
struct MinDegreeQueue {
    order: Vec<VertexId>,
    cursor: Cell<usize>,
}

impl MinDegreeQueue {
    fn new(graph: &Graph) -> Self {
        let mut order: Vec<VertexId> = (0..graph.vertex_count() as VertexId).collect();
        order.sort_by_key(|&v| (graph.deg(v), v));
        Self {
            order,
            cursor: Cell::new(0),
        }
    }

    fn first_live(&self, live: impl Fn(VertexId) -> bool) -> Option<VertexId> {
        let mut i = self.cursor.get();
        while i < self.order.len() && !live(self.order[i]) {
            i += 1;
        }
        self.cursor.set(i);
        self.order.get(i).copied()
    }
}

#[derive(Clone, Debug)]
pub struct TriangleIndex<'g> {
    graph: &'g Graph,
    triangles: Vec<Triangle>,
    tri_edges: Vec<[EdgeId; 3]>,
    tri_weight: Vec<f64>,
    tri_live: FixedBitSet,
    edge_offsets: Vec<usize>,
    edge_tris: Vec<TriangleId>,
    edge_live: FixedBitSet,
    edge_live_tris: Vec<u32>,
    edge_tri_weight: Vec<f64>,
    vertex_live_degree: Vec<u32>,
    live_edges: usize,
    live_triangles: usize,
    live_vertices: usize,
    queue: MinDegreeQueue,
}

impl<'g> TriangleIndex<'g> {
    /// Indexes the full enumeration `triangles` of `graph`; every edge starts
    /// live.
    pub fn build(graph: &'g Graph, triangles: Vec<Triangle>) -> Result<Self> {
        let mut all = FixedBitSet::with_capacity(graph.edge_count());
        all.insert_range(..);
        Self::build_with_live_edges(graph, triangles, all)
    }

    /// Indexes `graph` as if exactly the edges in `live` survive. Used as the
    /// rebuild-from-scratch reference for a mutated index.
    pub fn build_on_subgraph(graph: &'g Graph, triangles: Vec<Triangle>, live: &[EdgeId]) -> Result<Self> {
        let mut set = FixedBitSet::with_capacity(graph.edge_count());
        for &e in live {
            if e as usize >= graph.edge_count() {
                return Err(Error::CorruptInput(format!("edge id {e} out of range")));
            }
            set.insert(e as usize);
        }
        Self::build_with_live_edges(graph, triangles, set)
    }

    fn build_with_live_edges(graph: &'g Graph, triangles: Vec<Triangle>, edge_live: FixedBitSet) -> Result<Self> {
        let m = graph.edge_count();
        let n = graph.vertex_count();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut tri_weight = Vec::with_capacity(triangles.len());
        let mut per_edge = vec![0usize; m];
        for (i, t) in triangles.iter().enumerate() {
            let [a, b, c] = t.vertices();
            if !(a < b && b < c) || c as usize >= n {
                return Err(Error::CorruptInput(format!(
                    "triangle {i} has invalid vertices {:?}",
                    t.vertices()
                )));
            }
            if i > 0 && triangles[i - 1] >= *t {
                return Err(Error::CorruptInput(format!(
                    "triangle {i} is out of order or duplicated"
                )));
            }
            let mut ids = [0; 3];
            for (slot, (u, v)) in ids.iter_mut().zip(t.pairs()) {
                *slot = graph.edge_id(u, v).ok_or_else(|| {
                    Error::CorruptInput(format!(
                        "triangle {i} {:?} references missing edge ({u}, {v})",
                        t.vertices()
                    ))
                })?;
                per_edge[*slot as usize] += 1;
            }
            tri_edges.push(ids);
            tri_weight.push(t.weight(graph));
        }

        let mut edge_offsets = Vec::with_capacity(m + 1);
        edge_offsets.push(0);
        for c in &per_edge {
            edge_offsets.push(edge_offsets.last().unwrap() + c);
        }
        let mut fill = edge_offsets[..m].to_vec();
        let mut edge_tris = vec![0; *edge_offsets.last().unwrap()];
        for (t, ids) in tri_edges.iter().enumerate() {
            for &e in ids {
                edge_tris[fill[e as usize]] = t as TriangleId;
                fill[e as usize] += 1;
            }
        }

        let mut tri_live = FixedBitSet::with_capacity(triangles.len());
        let mut edge_live_tris = vec![0u32; m];
        let mut edge_tri_weight = vec![0.0; m];
        for (t, ids) in tri_edges.iter().enumerate() {
            if ids.iter().all(|&e| edge_live.contains(e as usize)) {
                tri_live.insert(t);
                for &e in ids {
                    edge_live_tris[e as usize] += 1;
                    edge_tri_weight[e as usize] += tri_weight[t];
                }
            }
        }
        let mut vertex_live_degree = vec![0u32; n];
        for e in edge_live.ones() {
            let (u, v) = graph.edge(e as EdgeId);
            vertex_live_degree[u as usize] += 1;
            vertex_live_degree[v as usize] += 1;
        }
        let live_edges = edge_live.count_ones(..);
        let live_triangles = tri_live.count_ones(..);
        let live_vertices = vertex_live_degree.iter().filter(|&&d| d > 0).count();

        Ok(Self {
            graph,
            triangles,
            tri_edges,
            tri_weight,
            tri_live,
            edge_offsets,
            edge_tris,
            edge_live,
            edge_live_tris,
            edge_tri_weight,
            vertex_live_degree,
            live_edges,
            live_triangles,
            live_vertices,
            queue: MinDegreeQueue::new(graph),
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, t: TriangleId) -> &Triangle {
        &self.triangles[t as usize]
    }

    pub fn triangle_weight(&self, t: TriangleId) -> f64 {
        self.tri_weight[t as usize]
    }

    pub fn triangle_edges(&self, t: TriangleId) -> [EdgeId; 3] {
        self.tri_edges[t as usize]
    }

    pub fn is_edge_live(&self, e: EdgeId) -> bool {
        self.edge_live.contains(e as usize)
    }

    pub fn is_triangle_live(&self, t: TriangleId) -> bool {
        self.tri_live.contains(t as usize)
    }

    pub fn is_vertex_live(&self, v: VertexId) -> bool {
        self.vertex_live_degree[v as usize] > 0
    }

    /// Number of live edges at `v`.
    pub fn live_degree(&self, v: VertexId) -> usize {
        self.vertex_live_degree[v as usize] as usize
    }

    /// Incrementally maintained `wt(T_H(e))`.
    #[inline]
    pub fn tri_weight(&self, e: EdgeId) -> f64 {
        self.edge_tri_weight[e as usize]
    }

    pub fn live_triangles_on_edge(&self, e: EdgeId) -> usize {
        self.edge_live_tris[e as usize] as usize
    }

    pub fn live_edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn live_triangle_count(&self) -> usize {
        self.live_triangles
    }

    pub fn live_vertex_count(&self) -> usize {
        self.live_vertices
    }

    /// Live edges in ascending id order.
    pub fn live_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_live.ones().map(|e| e as EdgeId)
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.graph.vertex_count() as VertexId).filter(|&v| self.is_vertex_live(v))
    }

    /// Live triangle ids containing `e`, ascending.
    pub fn live_triangles_of(&self, e: EdgeId) -> impl Iterator<Item = TriangleId> + '_ {
        let e = e as usize;
        self.edge_tris[self.edge_offsets[e]..self.edge_offsets[e + 1]]
            .iter()
            .copied()
            .filter(|&t| self.tri_live.contains(t as usize))
    }

    /// `(neighbor, edge)` pairs for live edges at `v`.
    pub fn live_neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .zip(self.graph.incident_edges(v).iter().copied())
            .filter(|&(_, e)| self.is_edge_live(e))
    }

    /// Live vertex of minimum degree in G, smallest id on ties.
    pub fn min_degree_live_vertex(&self) -> Option<VertexId> {
        self.queue.first_live(|v| self.is_vertex_live(v))
    }

    /// Deletes `e` from `H`.
    pub fn delete_edge(&mut self, e: EdgeId) -> DeleteOutcome {
        let mut updates = Vec::new();
        if !self.delete_edge_with(e, &mut |_, _| {}, &mut updates) {
            return DeleteOutcome::AlreadyDead;
        }
        // Keep the last (final) value per edge, in ascending edge order.
        updates.sort_by_key(|u| u.edge);
        let mut out: Vec<EdgeUpdate> = Vec::with_capacity(updates.len());
        for u in updates {
            match out.last_mut() {
                Some(last) if last.edge == u.edge => *last = u,
                _ => out.push(u),
            }
        }
        for u in &mut out {
            u.tri_weight = self.tri_weight(u.edge);
        }
        DeleteOutcome::Deleted(out)
    }

    /// Deletes `e`, calling `on_triangle(id, weight)` for every triangle that
    /// dies and appending one [`EdgeUpdate`] per decrement. Returns `false`
    /// if `e` was already dead.
    pub fn delete_edge_with(
        &mut self,
        e: EdgeId,
        on_triangle: &mut impl FnMut(TriangleId, f64),
        updates: &mut Vec<EdgeUpdate>,
    ) -> bool {
        let ei = e as usize;
        if !self.edge_live.contains(ei) {
            return false;
        }
        self.edge_live.set(ei, false);
        self.live_edges -= 1;
        let (u, v) = self.graph.edge(e);
        for x in [u, v] {
            let d = &mut self.vertex_live_degree[x as usize];
            *d -= 1;
            if *d == 0 {
                self.live_vertices -= 1;
            }
        }

        for k in self.edge_offsets[ei]..self.edge_offsets[ei + 1] {
            let t = self.edge_tris[k] as usize;
            if !self.tri_live.contains(t) {
                continue;
            }
            self.tri_live.set(t, false);
            self.live_triangles -= 1;
            let w = self.tri_weight[t];
            on_triangle(t as TriangleId, w);
            for other in self.tri_edges[t] {
                let oi = other as usize;
                self.edge_live_tris[oi] -= 1;
                if other == e {
                    continue;
                }
                if self.edge_live_tris[oi] == 0 {
                    self.edge_tri_weight[oi] = 0.0;
                } else {
                    self.edge_tri_weight[oi] -= w;
                }
                updates.push(EdgeUpdate {
                    edge: other,
                    tri_weight: self.edge_tri_weight[oi],
                });
            }
        }
        debug_assert_eq!(self.edge_live_tris[ei], 0);
        self.edge_tri_weight[ei] = 0.0;
        true
    }

    /// Deletes every live edge at `v`.
    pub fn delete_vertex(&mut self, v: VertexId) {
        let mut updates = Vec::new();
        self.delete_vertex_with(v, &mut |_, _| {}, &mut updates);
    }

    pub fn delete_vertex_with(
        &mut self,
        v: VertexId,
        on_triangle: &mut impl FnMut(TriangleId, f64),
        updates: &mut Vec<EdgeUpdate>,
    ) {
        let graph = self.graph;
        for &e in graph.incident_edges(v) {
            self.delete_edge_with(e, on_triangle, updates);
        }
    }

    /// `wt(T_H(e))` summed afresh over the live triangle list, in the same
    /// order the build uses.
    pub fn exact_tri_weight(&self, e: EdgeId) -> f64 {
        let mut s = 0.0;
        for t in self.live_triangles_of(e) {
            s += self.tri_weight[t as usize];
        }
        s
    }

    /// Replaces every incremental value by its exact recomputation.
    pub fn recompute_all(&mut self) {
        for e in 0..self.graph.edge_count() as EdgeId {
            self.edge_tri_weight[e as usize] = if self.is_edge_live(e) {
                self.exact_tri_weight(e)
            } else {
                0.0
            };
        }
    }

    /// Largest absolute gap between incremental and exact values.
    pub fn max_drift(&self) -> f64 {
        self.live_edges()
            .map(|e| (self.tri_weight(e) - self.exact_tri_weight(e)).abs())
            .fold(0.0, f64::max)
    }

    /// Checks every structural invariant by brute force.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let mut live_deg = vec![0u32; self.graph.vertex_count()];
        for e in self.live_edges() {
            let (u, v) = self.graph.edge(e);
            live_deg[u as usize] += 1;
            live_deg[v as usize] += 1;
        }
        if live_deg != self.vertex_live_degree {
            return Err("live vertex degrees disagree with live edges".into());
        }
        if self.live_edges != self.edge_live.count_ones(..)
            || self.live_triangles != self.tri_live.count_ones(..)
            || self.live_vertices != live_deg.iter().filter(|&&d| d > 0).count()
        {
            return Err("live counters disagree with bitmaps".into());
        }
        let mut counts = vec![0u32; self.graph.edge_count()];
        for (t, ids) in self.tri_edges.iter().enumerate() {
            let should_live = ids.iter().all(|&e| self.is_edge_live(e));
            if should_live != self.tri_live.contains(t) {
                return Err(format!("triangle {t} liveness disagrees with its edges"));
            }
            if should_live {
                for &e in ids {
                    counts[e as usize] += 1;
                }
            }
        }
        if counts != self.edge_live_tris {
            return Err("per-edge live triangle counts are wrong".into());
        }
        Ok(())
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        use std::mem::size_of;
        let t = self.triangles.len();
        let m = self.graph.edge_count();
        let n = self.graph.vertex_count();
        t * (size_of::<Triangle>() + size_of::<[EdgeId; 3]>() + size_of::<f64>())
            + t / 8
            + self.edge_tris.len() * size_of::<TriangleId>()
            + (m + 1) * size_of::<usize>()
            + m * (size_of::<u32>() + size_of::<f64>())
            + m / 8
            + n * (size_of::<u32>() + size_of::<VertexId>())
    }
}
