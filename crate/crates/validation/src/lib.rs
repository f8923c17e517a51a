//! Brute-force reference computations used to check `triadic` from the
//! outside: nothing here calls into the library's algorithms, only its graph
//! container.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triadic::{Graph, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

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

/// Dense random communities joined by `noise * n` random edges.
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
    for _ in 0..(noise * base as f64) as usize {
        pairs.push((rng.gen_range(0..base), rng.gen_range(0..base)));
    }
    Graph::from_edges(base as usize, pairs).unwrap()
}

pub fn complete(n: u32) -> Graph {
    Graph::from_edges(n as usize, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

/// Disjoint cliques of the given sizes, consecutive ids.
pub fn cliques(sizes: &[u32]) -> Graph {
    let mut pairs = Vec::new();
    let mut base = 0;
    for &k in sizes {
        for u in 0..k {
            for v in u + 1..k {
                pairs.push((base + u, base + v));
            }
        }
        base += k;
    }
    Graph::from_edges(base as usize, pairs).unwrap()
}

pub type Pair = (VertexId, VertexId);

/// Adjacency matrix rebuilt from the edge list.
pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u as usize][v as usize] = true;
        a[v as usize][u as usize] = true;
    }
    a
}

pub fn degrees(g: &Graph) -> Vec<f64> {
    adjacency(g)
        .iter()
        .map(|row| row.iter().filter(|&&x| x).count() as f64)
        .collect()
}

/// Every vertex triple of the adjacency matrix, lexicographic.
#[allow(clippy::needless_range_loop)]
pub fn triangles(g: &Graph) -> Vec<[VertexId; 3]> {
    let a = adjacency(g);
    let n = a.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if !a[x][y] {
                continue;
            }
            for z in y + 1..n {
                if a[x][z] && a[y][z] {
                    out.push([x as VertexId, y as VertexId, z as VertexId]);
                }
            }
        }
    }
    out
}

pub fn pairs_of(t: &[VertexId; 3]) -> [Pair; 3] {
    [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
}

/// `(wt(E), wt(T))` with plain summation.
pub fn weights(g: &Graph) -> (f64, f64) {
    let d = degrees(g);
    let f = |v: VertexId| d[v as usize];
    let we = g.edges().iter().map(|&(u, v)| 1.0 / (f(u) * f(v))).sum();
    let wt = triangles(g).iter().map(|t| 1.0 / (f(t[0]) * f(t[1]) * f(t[2]))).sum();
    (we, wt)
}

pub fn tau(g: &Graph) -> f64 {
    let (we, wt) = weights(g);
    3.0 * wt / we
}

/// Dense normalized adjacency over `vertices`, with entries only on `edges`.
pub fn dense_matrix(g: &Graph, vertices: &[VertexId], edges: &[Pair]) -> Vec<Vec<f64>> {
    let d = degrees(g);
    let k = vertices.len();
    let mut m = vec![vec![0.0; k]; k];
    for &(u, v) in edges {
        let i = vertices.iter().position(|&x| x == u).unwrap();
        let j = vertices.iter().position(|&x| x == v).unwrap();
        let x = 1.0 / (d[u as usize] * d[v as usize]).sqrt();
        m[i][j] = x;
        m[j][i] = x;
    }
    m
}

/// `trace(M^p)` by repeated multiplication.
pub fn trace_power(m: &[Vec<f64>], p: usize) -> f64 {
    let n = m.len();
    let mut acc = m.to_vec();
    for _ in 1..p {
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    next[i][j] += acc[i][k] * m[k][j];
                }
            }
        }
        acc = next;
    }
    (0..n).map(|i| acc[i][i]).sum()
}

pub fn is_connected(g: &Graph) -> bool {
    let a = adjacency(g);
    let n = a.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in 0..n {
            if a[x][y] && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every labelled graph on `n` vertices, by edge mask.
pub fn all_graphs(n: u32) -> impl Iterator<Item = Graph> {
    let slots: Vec<Pair> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << slots.len()).map(move |mask| {
        let chosen = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p);
        Graph::from_edges(n as usize, chosen).unwrap()
    })
}

/// Live triangles of `tris` under the edge set `live`.
pub fn alive(tris: &[[VertexId; 3]], live: &BTreeSet<Pair>) -> Vec<[VertexId; 3]> {
    tris.iter()
        .filter(|t| pairs_of(t).iter().all(|p| live.contains(p)))
        .copied()
        .collect()
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `sum(1/d) < eps` in exact arithmetic, with `eps` taken at its exact
/// binary value. An edge `uv` is unclean exactly when the degrees of its
/// live apexes satisfy this, since every term shares the factor `1/(d_u d_v)`.
pub fn reciprocal_sum_below(apex_degrees: &[u64], eps: f64) -> bool {
    let (mut num, mut den) = (0u128, 1u128);
    for &d in apex_degrees {
        let d = d as u128;
        let l = den / gcd(den, d) * d;
        num = num * (l / den) + l / d;
        den = l;
        let g = gcd(num, den);
        (num, den) = (num / g, den / g);
    }
    // eps = mantissa * 2^exp exactly.
    let bits = eps.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1075;
    let mantissa = ((bits & ((1 << 52) - 1)) | (1 << 52)) as u128;
    assert!((-127..0).contains(&exp), "epsilon {eps} outside the supported range");
    let lhs = num.checked_shl((-exp) as u32).filter(|x| x >> (-exp) as u32 == num);
    match (lhs, mantissa.checked_mul(den)) {
        (Some(l), Some(r)) => l < r,
        _ => panic!("exact comparison overflowed"),
    }
}

/// Removes every unclean edge at once, recomputing from scratch, until none
/// is left. Cleanliness is decided exactly. Returns the destroyed triangle
/// weight.
pub fn clean_to_fixpoint(g: &Graph, tris: &[[VertexId; 3]], live: &mut BTreeSet<Pair>, eps: f64) -> f64 {
    let d = degrees(g);
    let w = |t: &[VertexId; 3]| 1.0 / (d[t[0] as usize] * d[t[1] as usize] * d[t[2] as usize]);
    let mut destroyed = 0.0;
    loop {
        let now = alive(tris, live);
        let mut apexes = std::collections::BTreeMap::<Pair, Vec<u64>>::new();
        for t in &now {
            for (i, p) in pairs_of(t).into_iter().enumerate() {
                apexes.entry(p).or_default().push(d[t[2 - i] as usize] as u64);
            }
        }
        let bad: Vec<Pair> = live
            .iter()
            .copied()
            .filter(|p| reciprocal_sum_below(apexes.get(p).map_or(&[][..], Vec::as_slice), eps))
            .collect();
        if bad.is_empty() {
            return destroyed;
        }
        for p in &bad {
            live.remove(p);
        }
        destroyed += now
            .iter()
            .filter(|t| pairs_of(t).iter().any(|p| !live.contains(p)))
            .map(w)
            .sum::<f64>();
    }
}

/// Per extraction: `(internal, incident)` live triangle weight of each given
/// cluster, replaying exact cleaning before each one and deleting the
/// cluster after it.
pub fn replay_extractions(g: &Graph, clusters: &[Vec<VertexId>], eps: f64) -> Vec<(f64, f64)> {
    let d = degrees(g);
    let w = |t: &[VertexId; 3]| 1.0 / (d[t[0] as usize] * d[t[1] as usize] * d[t[2] as usize]);
    let tris = triangles(g);
    let mut live: BTreeSet<Pair> = g.edges().iter().copied().collect();
    let mut out = Vec::new();
    for c in clusters {
        clean_to_fixpoint(g, &tris, &mut live, eps);
        let inside = |x: &VertexId| c.binary_search(x).is_ok();
        let (mut internal, mut incident) = (0.0, 0.0);
        for t in alive(&tris, &live) {
            let k = t.iter().filter(|x| inside(x)).count();
            if k > 0 {
                incident += w(&t);
            }
            if k == 3 {
                internal += w(&t);
            }
        }
        out.push((internal, incident));
        live.retain(|(a, b)| !inside(a) && !inside(b));
    }
    out
}

/// Ordered off-diagonal slots of `m` on the index set `idx`.
fn slots(m: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let mut out = Vec::new();
    for &i in idx {
        for &j in idx {
            if i != j {
                out.push(m[i][j]);
            }
        }
    }
    out
}

/// At least an `alpha` fraction of the slots of `m` on `idx` lie in
/// `[alpha/(k-1), 1/(alpha (k-1))]`.
pub fn uniform(m: &[Vec<f64>], idx: &[usize], alpha: f64) -> bool {
    let k = idx.len();
    if k < 2 {
        return false;
    }
    let km1 = (k - 1) as f64;
    let s = slots(m, idx);
    let inside = s
        .iter()
        .filter(|&&x| x >= alpha / km1 && (alpha == 0.0 || x <= 1.0 / (alpha * km1)))
        .count();
    inside as f64 >= alpha * s.len() as f64
}

/// Uniform, and uniform on the closed neighborhood of at least an `alpha`
/// fraction of members.
pub fn strongly_uniform(m: &[Vec<f64>], alpha: f64) -> bool {
    let k = m.len();
    let all: Vec<usize> = (0..k).collect();
    if !uniform(m, &all, alpha) {
        return false;
    }
    let good = (0..k)
        .filter(|&s| {
            let closed: Vec<usize> = (0..k).filter(|&t| t == s || m[s][t] > 0.0).collect();
            uniform(m, &closed, alpha)
        })
        .count();
    good as f64 >= alpha * k as f64
}

/// At least an `alpha` fraction of slots are at least `alpha` times the mean.
pub fn empirically_uniform(m: &[Vec<f64>], alpha: f64) -> bool {
    let all: Vec<usize> = (0..m.len()).collect();
    let s = slots(m, &all);
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let above = s.iter().filter(|&&x| x >= alpha * mean * (1.0 - 1e-12)).count();
    above as f64 >= alpha * s.len() as f64
}

/// Largest `j / steps` that is feasible, or `None` when the feasible grid
/// points are not a prefix.
pub fn grid_max(steps: usize, feasible: impl Fn(f64) -> bool) -> Option<f64> {
    let flags: Vec<bool> = (0..=steps).map(|j| feasible(j as f64 / steps as f64)).collect();
    let last = flags.iter().rposition(|&f| f).unwrap_or(0);
    flags[..=last].iter().all(|&f| f).then_some(last as f64 / steps as f64)
}

/// Directory holding the benchmark edge lists: `TRIADIC_DATA_DIR`, or
/// `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    std::env::var_os("TRIADIC_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            Path::new(env!("CARGO_MANIFEST_DIR"))
                .parent()
                .unwrap()
                .parent()
                .unwrap()
                .join("data")
        })
}

const EXTENSIONS: [&str; 8] = [
    ".edges",
    ".txt",
    ".mtx",
    ".tsv",
    ".edges.gz",
    ".txt.gz",
    ".mtx.gz",
    ".tsv.gz",
];

/// First existing `<dir>/<name><ext>` for the known extensions.
pub fn find_dataset(dir: &Path, name: &str) -> Option<PathBuf> {
    EXTENSIONS
        .iter()
        .map(|ext| dir.join(format!("{name}{ext}")))
        .find(|p| p.is_file())
}
