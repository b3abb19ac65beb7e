//! Finite weighted metric graphs.
//!
//! Each edge carries a positive length and is traversable in both directions,
//! so a graph is a one-dimensional length space: points live on edges as
//! `(edge, arclength offset)` pairs. The module provides subdivision at
//! interior points, shortest-path (geodesic) distance with an optional path
//! witness, and the dual sup-distance over slope-bounded vertex assignments,
//! which coincides with the geodesic distance on connected graphs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Distance comparisons treat values this close as equal.
pub const DISTANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub len: f64,
}

/// A point on an edge, identified by its arclength offset from the edge's
/// first endpoint. Offsets 0 and `len` denote the endpoints themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: EdgeId,
    pub offset: f64,
}

/// One traversed stretch of an original edge inside a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub edge: EdgeId,
    /// Traversal direction relative to the edge's stored orientation.
    pub forward: bool,
    pub length: f64,
}

/// A geodesic witness: consecutive segments share a vertex and no vertex
/// repeats, so the total length is the path length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathDesc {
    pub segments: Vec<PathSegment>,
}

impl PathDesc {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
    allow_parallel: bool,
    allow_loops: bool,
}

impl WeightedGraph {
    /// Builds a validated graph. Parallel edges and self-loops are rejected;
    /// use [`WeightedGraph::with_flags`] to permit them.
    pub fn new(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::with_flags(vertex_count, edges, false, false)
    }

    pub fn with_flags(
        vertex_count: usize,
        edges: &[(usize, usize, f64)],
        allow_parallel: bool,
        allow_loops: bool,
    ) -> Result<Self> {
        let mut g = WeightedGraph {
            vertex_count,
            edges: Vec::with_capacity(edges.len()),
            adjacency: vec![Vec::new(); vertex_count],
            allow_parallel,
            allow_loops,
        };
        for &(u, v, len) in edges {
            g.push_edge(u, v, len)?;
        }
        Ok(g)
    }

    fn push_edge(&mut self, u: usize, v: usize, len: f64) -> Result<EdgeId> {
        if len <= 0.0 || !len.is_finite() {
            return Err(Error::NonpositiveLength(len));
        }
        if u >= self.vertex_count {
            return Err(Error::DanglingEndpoint(u));
        }
        if v >= self.vertex_count {
            return Err(Error::DanglingEndpoint(v));
        }
        if u == v && !self.allow_loops {
            return Err(Error::SelfLoop(u));
        }
        if !self.allow_parallel && self.adjacency[u].iter().any(|&(_, w)| w == v) {
            return Err(Error::DuplicateEdge(u, v));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, len });
        self.adjacency[u].push((id, v));
        if u != v {
            self.adjacency[v].push((id, u));
        }
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges.get(id).ok_or(Error::InvalidEdge(id))
    }

    pub fn length(&self, id: EdgeId) -> Result<f64> {
        Ok(self.edge(id)?.len)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.len).sum()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adjacency[v]
    }

    /// Validates a point against this graph.
    pub fn point(&self, edge: EdgeId, offset: f64) -> Result<GraphPoint> {
        let len = self.length(edge)?;
        if !(0.0..=len).contains(&offset) {
            return Err(Error::OffsetOutOfRange { edge, offset, len });
        }
        Ok(GraphPoint { edge, offset })
    }

    /// A point that is a vertex, expressed on some incident edge.
    pub fn vertex_point(&self, v: VertexId) -> Result<GraphPoint> {
        if v >= self.vertex_count {
            return Err(Error::InvalidVertex(v));
        }
        for (id, e) in self.edges.iter().enumerate() {
            if e.u == v {
                return Ok(GraphPoint { edge: id, offset: 0.0 });
            }
            if e.v == v {
                return Ok(GraphPoint { edge: id, offset: e.len });
            }
        }
        Err(Error::InvalidInput(format!("vertex {v} is isolated")))
    }

    /// Splits edges at the given interior points, turning each into a new
    /// vertex. Endpoint offsets are no-ops and map to the existing vertex.
    /// Coincident offsets on one edge collapse to a single new vertex.
    pub fn subdivide_at(&self, pts: &[GraphPoint]) -> Result<Subdivision> {
        // validate first
        for p in pts {
            self.point(p.edge, p.offset)?;
        }
        let mut by_edge: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.edges.len()];
        for (i, p) in pts.iter().enumerate() {
            by_edge[p.edge].push((p.offset, i));
        }
        let mut point_vertex = vec![usize::MAX; pts.len()];
        let mut new_edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut edge_origin: Vec<(EdgeId, f64, f64)> = Vec::new();
        let mut next_vertex = self.vertex_count;

        for (eid, edge) in self.edges.iter().enumerate() {
            let mut cuts = std::mem::take(&mut by_edge[eid]);
            cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            // resolve endpoint hits and deduplicate interior cuts
            let mut interior: Vec<(f64, Vec<usize>)> = Vec::new();
            for (off, idx) in cuts {
                if off <= DISTANCE_TOL {
                    point_vertex[idx] = edge.u;
                } else if off >= edge.len - DISTANCE_TOL {
                    point_vertex[idx] = edge.v;
                } else if let Some(last) = interior
                    .last_mut()
                    .filter(|(o, _)| (off - *o).abs() <= DISTANCE_TOL)
                {
                    last.1.push(idx);
                } else {
                    interior.push((off, vec![idx]));
                }
            }
            let mut prev_vertex = edge.u;
            let mut prev_off = 0.0;
            for (off, idxs) in &interior {
                let v_new = next_vertex;
                next_vertex += 1;
                for &i in idxs {
                    point_vertex[i] = v_new;
                }
                new_edges.push((prev_vertex, v_new, off - prev_off));
                edge_origin.push((eid, prev_off, *off));
                prev_vertex = v_new;
                prev_off = *off;
            }
            new_edges.push((prev_vertex, edge.v, edge.len - prev_off));
            edge_origin.push((eid, prev_off, edge.len));
        }

        let graph = WeightedGraph::with_flags(next_vertex, &new_edges, true, self.allow_loops)?;
        Ok(Subdivision {
            graph,
            point_vertex,
            edge_origin,
        })
    }

    /// Single-source shortest-path distances (and predecessor edges) over
    /// nonnegative edge lengths.
    pub fn shortest_paths(&self, source: VertexId) -> ShortestPaths {
        let mut dist = vec![f64::INFINITY; self.vertex_count];
        let mut pred: Vec<Option<(EdgeId, VertexId)>> = vec![None; self.vertex_count];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapItem { dist: 0.0, vertex: source });
        while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(eid, w) in &self.adjacency[v] {
                let nd = d + self.edges[eid].len;
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = Some((eid, v));
                    heap.push(HeapItem { dist: nd, vertex: w });
                }
            }
        }
        ShortestPaths { dist, pred }
    }

    /// Geodesic distance between two points; `f64::INFINITY` when the points
    /// lie in different components.
    pub fn geodesic_distance(&self, p: GraphPoint, q: GraphPoint) -> Result<f64> {
        Ok(self.geodesic_path(p, q)?.map_or(f64::INFINITY, |(d, _)| d))
    }

    /// Geodesic distance together with a path witness; `None` when the points
    /// are disconnected.
    pub fn geodesic_path(&self, p: GraphPoint, q: GraphPoint) -> Result<Option<(f64, PathDesc)>> {
        self.point(p.edge, p.offset)?;
        self.point(q.edge, q.offset)?;
        let sub = self.subdivide_at(&[p, q])?;
        let src = sub.point_vertex[0];
        let dst = sub.point_vertex[1];
        let sp = sub.graph.shortest_paths(src);
        if !sp.dist[dst].is_finite() {
            return Ok(None);
        }
        // walk predecessors dst -> src and map onto original edges
        let mut segs: Vec<PathSegment> = Vec::new();
        let mut v = dst;
        while v != src {
            let (eid, prev) = sp.pred[v].expect("predecessor chain broken");
            let (orig, lo, hi) = sub.edge_origin[eid];
            let sub_edge = &sub.graph.edges()[eid];
            // traversal prev -> v; stored orientation runs lo -> hi
            let forward = sub_edge.u == prev;
            segs.push(PathSegment {
                edge: orig,
                forward,
                length: hi - lo,
            });
            v = prev;
        }
        segs.reverse();
        // merge contiguous pieces of the same original edge
        let mut merged: Vec<PathSegment> = Vec::new();
        for s in segs {
            if let Some(last) = merged
                .last_mut()
                .filter(|last| last.edge == s.edge && last.forward == s.forward)
            {
                last.length += s.length;
            } else {
                merged.push(s);
            }
        }
        Ok(Some((sp.dist[dst], PathDesc { segments: merged })))
    }

    /// Sup of `f(p) - f(q)` over vertex assignments satisfying
    /// `|f(u) - f(v)| <= len(e)` for every edge, after subdividing at `p`
    /// and `q`. By linear-programming duality this is the shortest-path
    /// distance, and it is computed through that dual; disconnected inputs
    /// are an error.
    pub fn lipschitz_sup_distance(&self, p: GraphPoint, q: GraphPoint) -> Result<f64> {
        let sub = self.subdivide_at(&[p, q])?;
        let sp = sub.graph.shortest_paths(sub.point_vertex[0]);
        let d = sp.dist[sub.point_vertex[1]];
        if !d.is_finite() {
            return Err(Error::Disconnected);
        }
        Ok(d)
    }

    /// Parses the text edge-list format:
    ///
    /// ```text
    /// # comments and blank lines are ignored
    /// vertices N
    /// u v length
    /// ```
    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut vertex_count: Option<usize> = None;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            if vertex_count.is_none() {
                let kw = tokens.next().unwrap_or("");
                if kw != "vertices" {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected `vertices N` header, found `{kw}`"),
                    });
                }
                let n = tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or(Error::Parse {
                        line: lineno + 1,
                        msg: "missing or invalid vertex count".into(),
                    })?;
                vertex_count = Some(n);
                continue;
            }
            fn tok<'a>(t: Option<&'a str>, line: usize, what: &str) -> Result<&'a str> {
                t.ok_or(Error::Parse {
                    line,
                    msg: format!("missing {what} token"),
                })
            }
            let u: usize = tok(tokens.next(), lineno + 1, "source")?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: "invalid source vertex".into(),
                })?;
            let v: usize = tok(tokens.next(), lineno + 1, "target")?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: "invalid target vertex".into(),
                })?;
            let len: f64 = tok(tokens.next(), lineno + 1, "length")?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: "invalid length".into(),
                })?;
            edges.push((u, v, len));
        }
        let n = vertex_count.ok_or(Error::Parse {
            line: 0,
            msg: "missing `vertices N` header".into(),
        })?;
        WeightedGraph::new(n, &edges)
    }

    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.len));
        }
        out
    }
}

/// Result of [`WeightedGraph::subdivide_at`].
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: WeightedGraph,
    /// Vertex in the new graph for each input point, in input order.
    pub point_vertex: Vec<VertexId>,
    /// For each new edge: originating edge and the offset interval it covers.
    pub edge_origin: Vec<(EdgeId, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<Option<(EdgeId, VertexId)>>,
}

struct HeapItem {
    dist: f64,
    vertex: VertexId,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist
    }
}
impl Eq for HeapItem {}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("distances are finite")
    }
}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
