//! Triangle enumeration over a degeneracy orientation, plus a versioned
//! binary dump of the triangle list.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Three distinct vertices, stored in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle([VertexId; 3]);

impl Triangle {
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        Triangle(t)
    }

    pub fn vertices(&self) -> [VertexId; 3] {
        self.0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    /// The three vertex pairs, each smaller id first: `(a,b)`, `(a,c)`, `(b,c)`.
    pub fn pairs(&self) -> [(VertexId, VertexId); 3] {
        let [a, b, c] = self.0;
        [(a, b), (a, c), (b, c)]
    }

    /// `1 / (d_a d_b d_c)` with degrees from `graph`.
    pub fn weight(&self, graph: &Graph) -> f64 {
        let [a, b, c] = self.0;
        1.0 / (graph.deg(a) as f64 * graph.deg(b) as f64 * graph.deg(c) as f64)
    }
}

/// Minimum-degree peeling order.
#[derive(Clone, Debug)]
pub struct DegeneracyOrder {
    /// Vertices in removal order.
    pub order: Vec<VertexId>,
    /// `rank[v]` is the position of `v` in `order`.
    pub rank: Vec<u32>,
    pub degeneracy: usize,
}

/// Repeatedly removes a vertex of minimum remaining degree, breaking ties by
/// the smallest id.
pub fn degeneracy_order(graph: &Graph) -> DegeneracyOrder {
    let n = graph.vertex_count();
    let mut remaining: Vec<usize> = (0..n as VertexId).map(|v| graph.deg(v)).collect();
    let mut buckets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); graph.max_degree() + 1];
    for v in 0..n {
        buckets[remaining[v]].insert(v as VertexId);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut rank = vec![0u32; n];
    let mut degeneracy = 0;
    let mut floor = 0;
    for step in 0..n {
        while buckets[floor].is_empty() {
            floor += 1;
        }
        let v = buckets[floor].pop_first().unwrap();
        degeneracy = degeneracy.max(floor);
        removed[v as usize] = true;
        order.push(v);
        rank[v as usize] = step as u32;
        for &u in graph.neighbors(v) {
            let u_idx = u as usize;
            if removed[u_idx] {
                continue;
            }
            let d = remaining[u_idx];
            buckets[d].remove(&u);
            remaining[u_idx] = d - 1;
            buckets[d - 1].insert(u);
        }
        // Removing v lowers neighbor degrees by one at most.
        floor = floor.saturating_sub(1);
    }
    DegeneracyOrder {
        order,
        rank,
        degeneracy,
    }
}

/// Lists every triangle exactly once, sorted.
///
/// Each edge is oriented from the endpoint peeled earlier to the one peeled
/// later, so every out-list has at most `degeneracy` entries and a triangle is
/// found only from its earliest vertex. Work is `O(m * degeneracy)`.
pub fn enumerate_triangles(graph: &Graph) -> Vec<Triangle> {
    let n = graph.vertex_count();
    let ordering = degeneracy_order(graph);
    let rank = &ordering.rank;
    let out: Vec<Vec<VertexId>> = (0..n as VertexId)
        .into_par_iter()
        .map(|u| {
            graph
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&w| rank[w as usize] > rank[u as usize])
                .collect()
        })
        .collect();

    let mut triangles: Vec<Triangle> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let out_u = &out[u];
            let mut found = Vec::new();
            for &v in out_u {
                let out_v = &out[v as usize];
                let (mut i, mut j) = (0, 0);
                while i < out_u.len() && j < out_v.len() {
                    match out_u[i].cmp(&out_v[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            found.push(Triangle::new(u as VertexId, v, out_u[i]));
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
            found
        })
        .collect();
    triangles.par_sort_unstable();
    triangles
}

const DUMP_MAGIC: &[u8; 8] = b"TRIADIC\0";
const DUMP_VERSION: u32 = 1;

/// Writes the triangle dump: magic, format version, then `n`, `m`, `T` as
/// little-endian `u64`, then each triangle as three little-endian `u32`.
pub fn write_triangle_dump<W: Write>(graph: &Graph, triangles: &[Triangle], mut out: W) -> Result<()> {
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&DUMP_VERSION.to_le_bytes())?;
    for count in [graph.vertex_count(), graph.edge_count(), triangles.len()] {
        out.write_all(&(count as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(12 * triangles.len());
    for t in triangles {
        for v in t.vertices() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Reads a dump written by [`write_triangle_dump`], checking the header
/// against `graph` and each triangle's vertex order. Edge existence is
/// checked later by [`crate::index::TriangleIndex::build`].
pub fn read_triangle_dump<R: Read>(graph: &Graph, mut input: R) -> Result<Vec<Triangle>> {
    let corrupt = |msg: String| Error::CorruptInput(msg);
    let mut header = [0u8; 8 + 4 + 24];
    input
        .read_exact(&mut header)
        .map_err(|e| corrupt(format!("truncated header: {e}")))?;
    if &header[..8] != DUMP_MAGIC {
        return Err(corrupt("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if version != DUMP_VERSION {
        return Err(corrupt(format!("unsupported dump version {version}")));
    }
    let field = |i: usize| u64::from_le_bytes(header[12 + 8 * i..20 + 8 * i].try_into().unwrap());
    let (n, m, count) = (field(0), field(1), field(2));
    if n != graph.vertex_count() as u64 || m != graph.edge_count() as u64 {
        return Err(corrupt(format!(
            "dump is for a graph with n={n}, m={m}; loaded graph has n={}, m={}",
            graph.vertex_count(),
            graph.edge_count()
        )));
    }
    let expected = count
        .checked_mul(12)
        .ok_or_else(|| corrupt(format!("implausible triangle count {count}")))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() as u64 != expected {
        return Err(corrupt(format!(
            "expected {expected} bytes of triangle data, found {}",
            body.len()
        )));
    }
    let mut triangles = Vec::with_capacity(count as usize);
    for (i, chunk) in body.chunks_exact(12).enumerate() {
        let v = |k: usize| u32::from_le_bytes(chunk[4 * k..4 * k + 4].try_into().unwrap());
        let raw = [v(0), v(1), v(2)];
        if !(raw[0] < raw[1] && raw[1] < raw[2]) || raw[2] as u64 >= n {
            return Err(corrupt(format!("triangle {i} has invalid vertices {raw:?}")));
        }
        let t = Triangle(raw);
        if triangles.last().is_some_and(|prev| *prev >= t) {
            return Err(corrupt(format!("triangle {i} is out of order or duplicated")));
        }
        triangles.push(t);
    }
    Ok(triangles)
}
