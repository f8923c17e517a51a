#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triadic::{Graph, Triangle, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi G(n, p).
pub fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_edges(n, pairs).unwrap()
}

/// Planted cliques of random sizes joined by sparse random noise.
pub fn planted(communities: usize, max_size: usize, noise: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut pairs = Vec::new();
    let mut base = 0u32;
    for _ in 0..communities {
        let k = rng.gen_range(3..=max_size) as u32;
        let keep = rng.gen_range(0.6..=1.0);
        for u in 0..k {
            for v in u + 1..k {
                if rng.gen_bool(keep) {
                    pairs.push((base + u, base + v));
                }
            }
        }
        base += k;
    }
    let n = base as usize;
    let extra = (noise * n as f64) as usize;
    for _ in 0..extra {
        let u = rng.gen_range(0..base);
        let v = rng.gen_range(0..base);
        pairs.push((u, v));
    }
    Graph::from_edges(n, pairs).unwrap()
}

/// Every vertex triple, checked against the adjacency matrix.
pub fn brute_triangles(g: &Graph) -> Vec<Triangle> {
    let n = g.vertex_count() as VertexId;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in b + 1..n {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    out.push(Triangle::new(a, b, c));
                }
            }
        }
    }
    out
}

/// Degrees recounted from the edge list.
pub fn brute_degrees(g: &Graph) -> Vec<usize> {
    let mut d = vec![0; g.vertex_count()];
    for &(u, v) in g.edges() {
        d[u as usize] += 1;
        d[v as usize] += 1;
    }
    d
}

/// `3 wt(T) / wt(E)` with plain sums over brute-force degrees.
pub fn brute_tau(g: &Graph) -> f64 {
    let d = brute_degrees(g);
    let f = |v: VertexId| d[v as usize] as f64;
    let we: f64 = g.edges().iter().map(|&(u, v)| 1.0 / (f(u) * f(v))).sum();
    let wt: f64 = brute_triangles(g)
        .iter()
        .map(|t| {
            let [a, b, c] = t.vertices();
            1.0 / (f(a) * f(b) * f(c))
        })
        .sum();
    3.0 * wt / we
}

pub fn complete(n: u32) -> Graph {
    Graph::from_edges(n as usize, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}
