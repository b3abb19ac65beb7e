//! Finitely summable trees at finite truncation depth.
//!
//! A rooted tree with positive edge lengths embeds into sequence space by
//! sending a vertex to the indicator of its root path weighted by edge
//! lengths; the metric `d_p` is the l^p norm of coordinate differences and
//! is independent of the base vertex. The flagship example is the Cayley
//! tree of the free group on two generators, drawn in the plane with
//! generator steps `(±1/2, 0), (0, ±1/2)` and each new edge at half the
//! size of its parent, heading away from the parent direction.

use std::collections::HashMap;

use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::zeta::GeometricLengthFamily;
use crate::{Error, Result};

/// Depth cap for generated trees.
pub const DEPTH_CAP: usize = 14;

/// A point on a tree edge; the offset is measured from the parent endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreePoint {
    pub edge: EdgeId,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Tree {
    graph: WeightedGraph,
    root: VertexId,
    /// Parent vertex and connecting edge; `None` for the root.
    parent: Vec<Option<(VertexId, EdgeId)>>,
    depth: Vec<u32>,
    /// For each edge, whether `edge.u` is the parent endpoint.
    parent_is_u: Vec<bool>,
    /// Plane coordinates (for generated drawings).
    coords: Option<Vec<(f64, f64)>>,
    /// Incoming generator letter per vertex (Cayley trees).
    letters: Option<Vec<u8>>,
}

impl Tree {
    /// Validates that the graph is a tree (connected, `|E| = |V| - 1`) and
    /// roots it at `root`.
    pub fn from_graph(graph: WeightedGraph, root: VertexId) -> Result<Self> {
        let n = graph.vertex_count();
        if root >= n {
            return Err(Error::InvalidVertex(root));
        }
        if graph.edge_count() + 1 != n {
            return Err(Error::NotATree(format!(
                "{} edges for {} vertices",
                graph.edge_count(),
                n
            )));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0u32; n];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut visited = 0usize;
        while let Some(v) = stack.pop() {
            visited += 1;
            for &(eid, w) in graph.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, eid));
                    depth[w] = depth[v] + 1;
                    stack.push(w);
                }
            }
        }
        if visited != n {
            return Err(Error::NotATree("graph is not connected".into()));
        }
        let parent_is_u = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(eid, e)| {
                // the child endpoint is the one whose parent edge is eid
matches!(parent[e.v], Some((_, pe)) if pe == eid)
            })
            .collect();
        Ok(Tree {
            graph,
            root,
            parent,
            depth,
            parent_is_u,
            coords: None,
            letters: None,
        })
    }

    /// Truncated Cayley tree of the free group on two generators: reduced
    /// words of length at most `depth`, with `4 * 3^(n-1)` edges of length
    /// `2^(-n)` at level `n`, drawn in the plane by half-size compass steps.
    pub fn cayley_f2(depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidInput("depth must be at least 1".into()));
        }
        if depth > DEPTH_CAP {
            return Err(Error::DepthOverCap {
                depth,
                cap: DEPTH_CAP,
            });
        }
        const DIRS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        let mut coords = vec![(0.0, 0.0)];
        let mut letters = vec![u8::MAX];
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut frontier: Vec<usize> = vec![0];
        for level in 1..=depth {
            let step = 0.5f64.powi(level as i32);
            let mut next = Vec::with_capacity(frontier.len() * 3);
            for &v in &frontier {
                let incoming = letters[v];
                for letter in 0..4u8 {
                    if incoming != u8::MAX && letter == (incoming + 2) % 4 {
                        continue; // no immediate backtracking in reduced words
                    }
                    let id = coords.len();
                    let (dx, dy) = DIRS[letter as usize];
                    let (x, y) = coords[v];
                    coords.push((x + dx * step, y + dy * step));
                    letters.push(letter);
                    edges.push((v, id, step));
                    next.push(id);
                }
            }
            frontier = next;
        }
        let graph = WeightedGraph::new(coords.len(), &edges)?;
        let mut tree = Tree::from_graph(graph, 0)?;
        tree.coords = Some(coords);
        tree.letters = Some(letters);
        Ok(tree)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn depth_of(&self, v: VertexId) -> Result<u32> {
        self.depth
            .get(v)
            .copied()
            .ok_or(Error::InvalidVertex(v))
    }

    /// Level of an edge: the depth of its child endpoint.
    pub fn edge_level(&self, e: EdgeId) -> Result<u32> {
        let edge = self.graph.edge(e)?;
        let child = if self.parent_is_u[e] { edge.v } else { edge.u };
        Ok(self.depth[child])
    }

    pub fn parent_of(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.parent.get(v).copied().flatten()
    }

    pub fn plane_coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    /// Reduced word of a Cayley-tree vertex (`e` for the identity; capital
    /// letters are inverses).
    pub fn vertex_word(&self, v: VertexId) -> Result<String> {
        let letters = self
            .letters
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("tree carries no word labels".into()))?;
        if v >= letters.len() {
            return Err(Error::InvalidVertex(v));
        }
        if v == self.root {
            return Ok("e".into());
        }
        const NAMES: [char; 4] = ['a', 'b', 'A', 'B'];
        let mut chars = Vec::new();
        let mut cur = v;
        while cur != self.root {
            chars.push(NAMES[letters[cur] as usize]);
            cur = self.parent[cur].expect("non-root has a parent").0;
        }
        chars.reverse();
        Ok(chars.into_iter().collect())
    }

    /// Edge counts grouped by level.
    pub fn edge_census(&self) -> Vec<(u32, usize)> {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for e in 0..self.graph.edge_count() {
            *counts.entry(self.edge_level(e).expect("edge ids in range")).or_default() += 1;
        }
        let mut out: Vec<(u32, usize)> = counts.into_iter().collect();
        out.sort_unstable();
        out
    }

    pub fn point(&self, edge: EdgeId, offset: f64) -> Result<TreePoint> {
        let len = self.graph.length(edge)?;
        if !(0.0..=len).contains(&offset) {
            return Err(Error::OffsetOutOfRange { edge, offset, len });
        }
        Ok(TreePoint { edge, offset })
    }

    fn endpoints_parent_child(&self, e: EdgeId) -> (VertexId, VertexId) {
        let edge = &self.graph.edges()[e];
        if self.parent_is_u[e] {
            (edge.u, edge.v)
        } else {
            (edge.v, edge.u)
        }
    }

    fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("deeper vertex has a parent").0;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("deeper vertex has a parent").0;
        }
        while a != b {
            a = self.parent[a].expect("non-root differs from lca").0;
            b = self.parent[b].expect("non-root differs from lca").0;
        }
        a
    }

    /// Hop count of the unique vertex path.
    pub fn hops_between(&self, a: VertexId, b: VertexId) -> u32 {
        let l = self.lca(a, b);
        self.depth[a] + self.depth[b] - 2 * self.depth[l]
    }

    /// Edges of the unique path between two vertices.
    pub fn path_edges(&self, a: VertexId, b: VertexId) -> Vec<EdgeId> {
        let l = self.lca(a, b);
        let mut edges = Vec::new();
        let mut v = a;
        while v != l {
            let (p, e) = self.parent[v].expect("below lca");
            edges.push(e);
            v = p;
        }
        let mut tail = Vec::new();
        let mut w = b;
        while w != l {
            let (p, e) = self.parent[w].expect("below lca");
            tail.push(e);
            w = p;
        }
        tail.reverse();
        edges.extend(tail);
        edges
    }

    /// Base-`u` embedding with exponent `p`.
    pub fn embed(&self, base: VertexId, p: f64) -> Result<LpEmbedding<'_>> {
        if base >= self.graph.vertex_count() {
            return Err(Error::InvalidVertex(base));
        }
        if p < 1.0 || p.is_nan() {
            return Err(Error::InvalidExponent(p));
        }
        Ok(LpEmbedding {
            tree: self,
            base,
            exponent: p,
        })
    }

    /// l^p distance between two points; the value does not depend on the
    /// base vertex of the embedding.
    pub fn dp_distance(&self, x: TreePoint, y: TreePoint, p: f64) -> Result<f64> {
        self.embed(self.root, p)?.distance(x, y)
    }

    /// Sup-norm distance: the largest coordinate difference along the
    /// connecting path.
    pub fn dinf_distance(&self, x: TreePoint, y: TreePoint) -> Result<f64> {
        let emb = self.embed(self.root, 1.0)?;
        let diff = emb.coordinate_differences(x, y)?;
        Ok(diff.into_iter().fold(0.0f64, |m, (_, d)| m.max(d)))
    }

    /// Geodesic (path-length) distance between two points.
    pub fn geodesic_distance(&self, x: TreePoint, y: TreePoint) -> Result<f64> {
        Ok(self
            .embed(self.root, 1.0)?
            .coordinate_differences(x, y)?
            .into_iter()
            .map(|(_, d)| d)
            .sum())
    }

    /// Compares `d_p` computed in the base-`u` and base-`v` embeddings over
    /// the given point pairs. The rebasing map keeps each point on its edge
    /// and re-anchors the partial coordinate at the endpoint nearest the new
    /// base, so discrepancies measure only floating-point noise.
    pub fn rebase_isometry_check(
        &self,
        u: VertexId,
        v: VertexId,
        pairs: &[(TreePoint, TreePoint)],
        p: f64,
    ) -> Result<RebaseReport> {
        if u == v {
            return Err(Error::InvalidInput(
                "rebase check needs two distinct base vertices".into(),
            ));
        }
        let eu = self.embed(u, p)?;
        let ev = self.embed(v, p)?;
        let mut max_disc = 0.0f64;
        for &(x, y) in pairs {
            let du = eu.distance(x, y)?;
            let dv = ev.distance(x, y)?;
            max_disc = max_disc.max((du - dv).abs());
        }
        Ok(RebaseReport {
            pairs: pairs.len(),
            max_discrepancy: max_disc,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RebaseReport {
    pub pairs: usize,
    pub max_discrepancy: f64,
}

/// Sparse l^p embedding anchored at a base vertex: a vertex maps to the sum
/// of `length(e) * delta_e` over its base path; a point on an edge carries a
/// partial coordinate measured from the endpoint nearest the base.
pub struct LpEmbedding<'t> {
    tree: &'t Tree,
    pub base: VertexId,
    pub exponent: f64,
}

impl LpEmbedding<'_> {
    /// Sparse coordinates of a vertex: full edge lengths along the base path.
    pub fn vertex_coords(&self, w: VertexId) -> Result<Vec<(EdgeId, f64)>> {
        if w >= self.tree.graph.vertex_count() {
            return Err(Error::InvalidVertex(w));
        }
        Ok(self
            .tree
            .path_edges(self.base, w)
            .into_iter()
            .map(|e| (e, self.tree.graph.edges()[e].len))
            .collect())
    }

    /// Sparse coordinates of a point on an edge.
    pub fn point_coords(&self, x: TreePoint) -> Result<Vec<(EdgeId, f64)>> {
        self.tree.point(x.edge, x.offset)?;
        let (par, chi) = self.tree.endpoints_parent_child(x.edge);
        let len = self.tree.graph.edges()[x.edge].len;
        // anchor at the endpoint nearest the base
        let anchor = if self.tree.hops_between(self.base, par)
            <= self.tree.hops_between(self.base, chi)
        {
            par
        } else {
            chi
        };
        let partial = if anchor == par { x.offset } else { len - x.offset };
        let mut coords = self.vertex_coords(anchor)?;
        if partial > 0.0 {
            coords.push((x.edge, partial));
        }
        Ok(coords)
    }

    /// Nonzero coordinate differences between two points.
    pub fn coordinate_differences(
        &self,
        x: TreePoint,
        y: TreePoint,
    ) -> Result<Vec<(EdgeId, f64)>> {
        let mut map: HashMap<EdgeId, f64> = HashMap::new();
        for (e, c) in self.point_coords(x)? {
            *map.entry(e).or_default() += c;
        }
        for (e, c) in self.point_coords(y)? {
            *map.entry(e).or_default() -= c;
        }
        Ok(map
            .into_iter()
            .filter(|&(_, d)| d != 0.0)
            .map(|(e, d)| (e, d.abs()))
            .collect())
    }

    /// l^p norm of the coordinate difference.
    pub fn distance(&self, x: TreePoint, y: TreePoint) -> Result<f64> {
        let diffs = self.coordinate_differences(x, y)?;
        let p = self.exponent;
        let sum: f64 = diffs.iter().map(|&(_, d)| d.powf(p)).sum();
        Ok(sum.powf(1.0 / p))
    }
}

/// Per-exponent summability data for a geometric family: cumulative partial
/// sums of `sum count(n) length(n)^s` over the first levels, and the closed
/// form `c0 l0^s / (1 - m rho^s)` when the series converges (`None` when it
/// diverges).
#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityRow {
    pub s: f64,
    pub partial_sums: Vec<f64>,
    pub closed_form: Option<f64>,
}

pub fn summability_profile(
    fam: &GeometricLengthFamily,
    s_values: &[f64],
    partial_levels: u32,
) -> Vec<SummabilityRow> {
    s_values
        .iter()
        .map(|&s| {
            let mut partial_sums = Vec::with_capacity(partial_levels as usize);
            let mut acc = 0.0;
            for n in 1..=partial_levels {
                acc += fam.count(n) * fam.length(n).powf(s);
                partial_sums.push(acc);
            }
            SummabilityRow {
                s,
                partial_sums,
                closed_form: fam.length_power_sum(s),
            }
        })
        .collect()
}
