//! Immutable undirected simple graphs and SNAP-style edge list ingestion.
//!
//! Vertex ids are dense (`0..n`) and assigned in first-seen order of the
//! input tokens. Degrees are fixed at load time: every edge and triangle
//! weight downstream refers to these degrees, never to degrees in a
//! subgraph.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;

/// Bijection between dense internal ids and the labels read from input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexLabelMap {
    labels: Vec<String>,
    ids: HashMap<String, VertexId>,
}

impl VertexLabelMap {
    /// Labels `"0"`, `"1"`, ... for graphs built directly from ids.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::default();
        for v in 0..n {
            map.intern(&v.to_string());
        }
        map
    }

    fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as VertexId;
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v as usize]
    }

    pub fn id(&self, label: &str) -> Option<VertexId> {
        self.ids.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct IngestOptions {
    /// Require every vertex token to be a non-negative integer.
    pub integer_labels: bool,
}

/// Line accounting for a single load.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestReport {
    pub lines: usize,
    pub comment_lines: usize,
    pub blank_lines: usize,
    pub pair_lines: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
    /// Lines that carried tokens beyond the first two (weights, timestamps).
    pub extra_column_lines: usize,
}

/// Undirected simple graph in compressed adjacency form.
#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    incident: Vec<EdgeId>,
    edges: Vec<(VertexId, VertexId)>,
    labels: VertexLabelMap,
}

impl Graph {
    /// Builds a graph on `n` vertices labelled by their ids. Self-loops and
    /// duplicate pairs (in either orientation) are discarded.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut canonical = Vec::new();
        for (u, v) in pairs {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::InvalidVertex(x as usize));
                }
            }
            if u != v {
                canonical.push((u.min(v), u.max(v)));
            }
        }
        canonical.sort_unstable();
        canonical.dedup();
        Ok(Self::from_canonical(n, canonical, VertexLabelMap::identity(n)))
    }

    /// `edges` must be sorted, deduplicated, and oriented `u < v`.
    fn from_canonical(n: usize, edges: Vec<(VertexId, VertexId)>, labels: VertexLabelMap) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; 2 * edges.len()];
        let mut incident = vec![0; 2 * edges.len()];
        // Edges are in lexicographic order, so every list fills in ascending
        // neighbor order without a separate sort.
        for (id, &(u, v)) in edges.iter().enumerate() {
            for (a, b) in [(u, v), (v, u)] {
                let slot = &mut fill[a as usize];
                neighbors[*slot] = b;
                incident[*slot] = id as EdgeId;
                *slot += 1;
            }
        }
        Self {
            offsets,
            neighbors,
            incident,
            edges,
            labels,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Degree of `v` in the loaded graph.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.vertex_count() {
            return Err(Error::InvalidVertex(v));
        }
        Ok(self.deg(v as VertexId))
    }

    /// Unchecked degree lookup for hot paths.
    #[inline]
    pub fn deg(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor list.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids parallel to [`Graph::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        let v = v as usize;
        &self.incident[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Endpoints of `e`, smaller id first.
    #[inline]
    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e as usize]
    }

    /// All edges in canonical order; the position of a pair is its edge id.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u as usize >= self.vertex_count() || v as usize >= self.vertex_count() {
            return None;
        }
        let (a, b) = if self.deg(u) <= self.deg(v) { (u, v) } else { (v, u) };
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|i| self.incident_edges(a)[i])
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn labels(&self) -> &VertexLabelMap {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        self.labels.label(v)
    }

    /// `1 / (d_u d_v)` with degrees from this graph.
    #[inline]
    pub fn edge_weight(&self, e: EdgeId) -> f64 {
        let (u, v) = self.edge(e);
        1.0 / (self.deg(u) as f64 * self.deg(v) as f64)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count() as VertexId)
            .map(|v| self.deg(v))
            .max()
            .unwrap_or(0)
    }
}

/// Reads a whitespace-separated edge list. Lines whose first non-blank
/// character is `#` or `%` are comments; tokens after the first two on a line
/// are ignored. A MatrixMarket banner causes the size line that follows it to
/// be skipped.
pub fn load_edge_list<R: BufRead>(reader: R, options: &IngestOptions) -> Result<(Graph, IngestReport)> {
    let mut report = IngestReport::default();
    let mut labels = VertexLabelMap::default();
    let mut pairs = Vec::new();
    let mut skip_size_line = false;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        report.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            report.blank_lines += 1;
            continue;
        }
        if trimmed.starts_with('#') || trimmed.starts_with('%') {
            if lineno == 1 && trimmed.starts_with("%%MatrixMarket") {
                skip_size_line = true;
            }
            report.comment_lines += 1;
            continue;
        }
        if skip_size_line {
            skip_size_line = false;
            report.comment_lines += 1;
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two vertex tokens, found {trimmed:?}"),
            });
        };
        if tokens.next().is_some() {
            report.extra_column_lines += 1;
        }
        report.pair_lines += 1;
        let u = intern_token(&mut labels, a, options, lineno)?;
        let v = intern_token(&mut labels, b, options, lineno)?;
        if u == v {
            report.self_loops_dropped += 1;
        } else {
            pairs.push((u.min(v), u.max(v)));
        }
    }

    if report.pair_lines == 0 {
        return Err(Error::EmptyInput);
    }
    let read = pairs.len();
    pairs.sort_unstable();
    pairs.dedup();
    report.duplicate_edges_dropped = read - pairs.len();
    let n = labels.len();
    Ok((Graph::from_canonical(n, pairs, labels), report))
}

fn intern_token(labels: &mut VertexLabelMap, token: &str, options: &IngestOptions, line: usize) -> Result<VertexId> {
    if options.integer_labels {
        let value: u64 = token.parse().map_err(|_| Error::Parse {
            line,
            message: format!("vertex token {token:?} is not a non-negative integer"),
        })?;
        Ok(labels.intern(&value.to_string()))
    } else {
        Ok(labels.intern(token))
    }
}

/// Opens `path` (transparently gunzipping `*.gz`) and loads it.
pub fn load_edge_list_file(path: &Path, options: &IngestOptions) -> Result<(Graph, IngestReport)> {
    let file = File::open(path)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    load_edge_list(BufReader::with_capacity(1 << 16, reader), options)
}

/// Writes one `u v` line per edge, in canonical edge order, using the
/// original labels. Reloading the output reproduces the same labelled edge
/// set.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    for &(u, v) in graph.edges() {
        writeln!(out, "{} {}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}
