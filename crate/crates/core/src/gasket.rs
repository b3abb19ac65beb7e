//! Sierpinski gasket geometry at outer side length `2 pi / 3`.
//!
//! The gasket is the closure of an increasing union of triangle boundaries:
//! level `n` consists of `3^n` upright cells of side `(2 pi / 3) 2^(-n)`,
//! glued at corner points. Cells are addressed by words over `{0, 1, 2}`
//! (corner contractions applied left to right), parameterized by arclength
//! around their perimeter, and carry barycentric coordinates with respect to
//! the outer corners. Geodesics are computed exactly by descending to the
//! deepest cell containing both points and splicing corner-to-corner routes,
//! and independently on the level-`m` approximating metric graph. The
//! midpoint and vertex averages approximate the normalized Hausdorff
//! measure; the localized trace residue reproduces them up to a constant.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::graph::WeightedGraph;
use crate::numerics::{richardson, KahanSum};
use crate::zeta::riemann_zeta;
use crate::{Error, Result};

/// Side length of the outer triangle.
pub const SIDE: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Metric (and Minkowski) dimension of the gasket, `log 3 / log 2`.
pub fn gasket_dimension() -> f64 {
    3.0_f64.ln() / 2.0_f64.ln()
}

/// Membership tolerance at the outer scale.
const MEMBERSHIP_TOL: f64 = 1e-9;
/// Deepest descent used for membership and geodesic splitting; beyond this
/// the cell size sits at floating-point noise.
const LOCATE_DEPTH: u32 = 45;
/// Level cap for approximating graphs.
pub const APPROX_LEVEL_CAP: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    pub fn dist(&self, other: &PlanePoint) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    fn midpoint(&self, other: &PlanePoint) -> PlanePoint {
        PlanePoint::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    fn lerp(&self, other: &PlanePoint, t: f64) -> PlanePoint {
        PlanePoint::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Outer corners: `v1 = (0,0)`, `v2 = (SIDE, 0)`, `v3 = (SIDE/2, SIDE sqrt(3)/2)`.
pub fn base_corners() -> [PlanePoint; 3] {
    [
        PlanePoint::new(0.0, 0.0),
        PlanePoint::new(SIDE, 0.0),
        PlanePoint::new(SIDE / 2.0, SIDE * 3.0_f64.sqrt() / 2.0),
    ]
}

/// Corner contraction `F_i(p) = (p + v_i) / 2`.
pub fn corner_contraction(i: usize, p: PlanePoint) -> PlanePoint {
    let v = base_corners()[i];
    PlanePoint::new((p.x + v.x) / 2.0, (p.y + v.y) / 2.0)
}

/// Address of a level-`n` cell: a word over `{0, 1, 2}`, outermost letter
/// first; the empty word is the outer triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleAddress(Vec<u8>);

impl TriangleAddress {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = word.iter().find(|&&l| l > 2) {
            return Err(Error::InvalidAddressLetter(bad));
        }
        Ok(TriangleAddress(word))
    }

    pub fn root() -> Self {
        TriangleAddress(Vec::new())
    }

    pub fn level(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn word(&self) -> &[u8] {
        &self.0
    }
}

/// Barycentric coordinates with respect to the outer corners; components sum
/// to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barycentric {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn bary_in(corners: &[PlanePoint; 3], p: PlanePoint) -> [f64; 3] {
    let cross = |a: &PlanePoint, b: &PlanePoint, c: &PlanePoint| {
        (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    };
    let total = cross(&corners[0], &corners[1], &corners[2]);
    [
        cross(&p, &corners[1], &corners[2]) / total,
        cross(&corners[0], &p, &corners[2]) / total,
        cross(&corners[0], &corners[1], &p) / total,
    ]
}

/// Corners of the addressed cell, in corner-role order (the image of the
/// outer corners under the address word).
pub fn triangle_vertices(addr: &TriangleAddress) -> [PlanePoint; 3] {
    let mut corners = base_corners();
    for &letter in addr.word() {
        corners = child_corners(&corners, letter as usize);
    }
    corners
}

fn child_corners(corners: &[PlanePoint; 3], i: usize) -> [PlanePoint; 3] {
    [
        corners[0].midpoint(&corners[i]),
        corners[1].midpoint(&corners[i]),
        corners[2].midpoint(&corners[i]),
    ]
}

/// Arclength parameterization of a cell perimeter. `t = 0` is the lower
/// right-hand corner; positive `t` runs counterclockwise (up the right edge
/// first), and the ends `t = +-(perimeter/2)` meet at the midpoint of the
/// left edge.
pub fn parameterize(addr: &TriangleAddress, t: f64) -> Result<PlanePoint> {
    let corners = triangle_vertices(addr);
    let side = corners[0].dist(&corners[1]);
    let perimeter = 3.0 * side;
    let half = perimeter / 2.0;
    if !(t >= -half - 1e-12 && t <= half + 1e-12) {
        return Err(Error::ParamOutOfDomain { t, half });
    }
    let mut u = t.rem_euclid(perimeter);
    if u >= perimeter {
        u = 0.0;
    }
    // counterclockwise from the lower-right corner: c2 -> c3 -> c1 -> c2
    let (from, to, local) = if u < side {
        (1, 2, u / side)
    } else if u < 2.0 * side {
        (2, 0, (u - side) / side)
    } else {
        (0, 1, (u - 2.0 * side) / side)
    };
    Ok(corners[from].lerp(&corners[to], local))
}

/// Barycentric coordinates of a point inside (or on) the outer triangle.
pub fn barycentric(p: PlanePoint) -> Result<Barycentric> {
    let b = bary_in(&base_corners(), p);
    if b.iter().any(|&c| c < -MEMBERSHIP_TOL) {
        return Err(Error::NotOnGasket(p.x, p.y));
    }
    Ok(Barycentric {
        x: b[0],
        y: b[1],
        z: b[2],
    })
}

fn locate_tol(depth: u32) -> f64 {
    MEMBERSHIP_TOL + 2f64.powi(depth as i32) * 5e-15
}

fn argmax3(b: &[f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if b[i] > b[best] {
            best = i;
        }
    }
    best
}

/// Greedy descent of a point through the cell hierarchy. Returns the
/// address letters and the final cell corners, or `None` if the point
/// leaves the set (falls into a hole or outside the outer triangle).
fn locate(p: PlanePoint, depth: u32) -> Option<(Vec<u8>, [PlanePoint; 3])> {
    let mut corners = base_corners();
    if bary_in(&corners, p).iter().any(|&c| c < -locate_tol(0)) {
        return None;
    }
    let mut word = Vec::with_capacity(depth as usize);
    for d in 0..depth {
        let b = bary_in(&corners, p);
        let i = argmax3(&b);
        if b[i] < 0.5 - locate_tol(d) {
            return None; // interior hole
        }
        word.push(i as u8);
        corners = child_corners(&corners, i);
    }
    Some((word, corners))
}

/// Membership predicate: the point stays inside cells down to the float
/// resolution limit.
pub fn on_gasket(p: PlanePoint) -> bool {
    locate(p, LOCATE_DEPTH).is_some()
}

/// Geodesic distance from an outer corner (1, 2 or 3) to a point on the
/// gasket: the complementary barycentric mass times the side length.
pub fn vertex_geodesic(corner: usize, p: PlanePoint) -> Result<f64> {
    if !(1..=3).contains(&corner) {
        return Err(Error::InvalidInput(format!(
            "corner index must be 1, 2 or 3, got {corner}"
        )));
    }
    if !on_gasket(p) {
        return Err(Error::NotOnGasket(p.x, p.y));
    }
    let b = barycentric(p)?;
    let coords = [b.x, b.y, b.z];
    Ok((1.0 - coords[corner - 1]) * SIDE)
}

/// Exact geodesic distance between two points of the gasket.
///
/// Descends to the deepest cell containing both points; the two points then
/// lie in distinct child cells, which meet the rest of the set only at their
/// corners, so the distance is the minimum over exit/entry corner pairs of
/// within-cell corner distances plus a shortest path on the six corner
/// vertices of the three children.
pub fn geodesic(p: PlanePoint, q: PlanePoint) -> Result<f64> {
    if !on_gasket(p) {
        return Err(Error::NotOnGasket(p.x, p.y));
    }
    if !on_gasket(q) {
        return Err(Error::NotOnGasket(q.x, q.y));
    }
    if p == q {
        return Ok(0.0);
    }
    let mut corners = base_corners();
    let mut ip = 0usize;
    let mut iq = 0usize;
    for d in 0..LOCATE_DEPTH {
        let bp = bary_in(&corners, p);
        let bq = bary_in(&corners, q);
        ip = argmax3(&bp);
        iq = argmax3(&bq);
        let tol = locate_tol(d);
        if ip == iq && bp[ip] >= 0.5 - tol && bq[iq] >= 0.5 - tol {
            corners = child_corners(&corners, ip);
        } else {
            break;
        }
    }
    let side = corners[0].dist(&corners[1]);
    let child_side = side / 2.0;
    let child_p = child_corners(&corners, ip);
    let child_q = child_corners(&corners, iq);
    let bp = bary_in(&child_p, p);
    let bq = bary_in(&child_q, q);
    // distance from a point to corner slot j of its cell
    let to_corner = |b: &[f64; 3], j: usize| (1.0 - b[j]).max(0.0) * child_side;

    if ip == iq {
        // unresolved at the depth cap: both points sit in one cell of
        // negligible size; any corner route bounds the distance tightly
        let mut best = f64::INFINITY;
        for j in 0..3 {
            best = best.min(to_corner(&bp, j) + to_corner(&bq, j));
        }
        return Ok(best);
    }

    // six corner vertices of the three children: 0,1,2 are the cell corners,
    // 3,4,5 the side midpoints (0,1), (0,2), (1,2)
    let mid_id = |a: usize, b: usize| match (a.min(b), a.max(b)) {
        (0, 1) => 3,
        (0, 2) => 4,
        _ => 5,
    };
    let slot_id = |child: usize, slot: usize| {
        if slot == child {
            child
        } else {
            mid_id(child, slot)
        }
    };
    let mut dist = [[f64::INFINITY; 6]; 6];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for child in 0..3 {
        let ids = [slot_id(child, 0), slot_id(child, 1), slot_id(child, 2)];
        for a in 0..3 {
            for b in (a + 1)..3 {
                let (u, v) = (ids[a], ids[b]);
                if child_side < dist[u][v] {
                    dist[u][v] = child_side;
                    dist[v][u] = child_side;
                }
            }
        }
    }
    for k in 0..6 {
        for i in 0..6 {
            for j in 0..6 {
                let through = dist[i][k] + dist[k][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }

    let mut best = f64::INFINITY;
    for a in 0..3 {
        for b in 0..3 {
            let total =
                to_corner(&bp, a) + dist[slot_id(ip, a)][slot_id(iq, b)] + to_corner(&bq, b);
            best = best.min(total);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Approximating graphs
// ---------------------------------------------------------------------------

/// The level-`m` approximating metric graph: all cell corners as vertices,
/// all cell sides as edges of length `SIDE * 2^(-m)`.
#[derive(Debug)]
pub struct GasketApprox {
    pub level: u32,
    pub graph: WeightedGraph,
    pub coords: Vec<PlanePoint>,
    /// Integer barycentric keys `(j, k)` in units of `2^(-level)`.
    index: HashMap<(i64, i64), usize>,
}

impl GasketApprox {
    fn build(level: u32) -> Result<GasketApprox> {
        let scale = 1i64 << level;
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        let mut coords: Vec<PlanePoint> = Vec::new();
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let len = SIDE * 0.5f64.powi(level as i32);
        let corners = base_corners();
        let to_plane = |j: i64, k: i64| {
            let fj = j as f64 / scale as f64;
            let fk = k as f64 / scale as f64;
            PlanePoint::new(
                corners[0].x + fj * (corners[1].x - corners[0].x) + fk * (corners[2].x - corners[0].x),
                corners[0].y + fj * (corners[1].y - corners[0].y) + fk * (corners[2].y - corners[0].y),
            )
        };
        let intern = |key: (i64, i64),
                          index: &mut HashMap<(i64, i64), usize>,
                          coords: &mut Vec<PlanePoint>| {
            *index.entry(key).or_insert_with(|| {
                coords.push(to_plane(key.0, key.1));
                coords.len() - 1
            })
        };
        // stack of cells as integer corner triples
        let mut stack = vec![([(0i64, 0i64), (scale, 0), (0, scale)], 0u32)];
        while let Some((cell, depth)) = stack.pop() {
            if depth == level {
                let ids = [
                    intern(cell[0], &mut index, &mut coords),
                    intern(cell[1], &mut index, &mut coords),
                    intern(cell[2], &mut index, &mut coords),
                ];
                edges.push((ids[0], ids[1], len));
                edges.push((ids[0], ids[2], len));
                edges.push((ids[1], ids[2], len));
            } else {
                let mid = |a: (i64, i64), b: (i64, i64)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
                let m01 = mid(cell[0], cell[1]);
                let m02 = mid(cell[0], cell[2]);
                let m12 = mid(cell[1], cell[2]);
                stack.push(([cell[0], m01, m02], depth + 1));
                stack.push(([m01, cell[1], m12], depth + 1));
                stack.push(([m02, m12, cell[2]], depth + 1));
            }
        }
        let graph = WeightedGraph::new(coords.len(), &edges)?;
        Ok(GasketApprox {
            level,
            graph,
            coords,
            index,
        })
    }

    pub fn vertex_at(&self, key: (i64, i64)) -> Option<usize> {
        self.index.get(&key).copied()
    }
}

/// Cached approximating graphs, one per level.
pub fn gasket_approx(level: u32) -> Result<Arc<GasketApprox>> {
    if level > APPROX_LEVEL_CAP {
        return Err(Error::DepthOverCap {
            depth: level as usize,
            cap: APPROX_LEVEL_CAP as usize,
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<GasketApprox>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("approx cache poisoned");
    if let Some(g) = map.get(&level) {
        return Ok(Arc::clone(g));
    }
    let built = Arc::new(GasketApprox::build(level)?);
    map.insert(level, Arc::clone(&built));
    Ok(Arc::clone(&built))
}

/// Snaps a gasket point to the nearest corner of its level-`m` cell and
/// returns the graph vertex id.
fn snap_to_level(approx: &GasketApprox, p: PlanePoint) -> Result<usize> {
    let m = approx.level;
    let (word, corners) =
        locate(p, m).ok_or(Error::NotOnGasket(p.x, p.y))?;
    // integer corner coordinates of the located cell
    let scale = 1i64 << m;
    let mut keys = [(0i64, 0i64), (scale, 0), (0, scale)];
    let mut step = scale;
    for &letter in &word {
        step /= 2;
        let anchor = keys[letter as usize];
        for key in keys.iter_mut() {
            *key = ((key.0 + anchor.0) / 2, (key.1 + anchor.1) / 2);
        }
        debug_assert!(step >= 1);
    }
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (slot, c) in corners.iter().enumerate() {
        let d = c.dist(&p);
        if d < best_d {
            best_d = d;
            best = slot;
        }
    }
    approx
        .vertex_at(keys[best])
        .ok_or_else(|| Error::InvalidInput("snapped corner missing from graph".into()))
}

/// Geodesic distance through the level-`m` approximating graph, after
/// snapping both points to the nearest cell corner at that level. Exact for
/// points that are graph vertices; otherwise off by at most the snap
/// distances.
pub fn geodesic_graph(p: PlanePoint, q: PlanePoint, m: u32) -> Result<f64> {
    let approx = gasket_approx(m)?;
    let a = snap_to_level(&approx, p)?;
    let b = snap_to_level(&approx, q)?;
    let sp = approx.graph.shortest_paths(a);
    Ok(sp.dist[b])
}

// ---------------------------------------------------------------------------
// States approximating the normalized Hausdorff measure
// ---------------------------------------------------------------------------

fn for_each_cell<F: FnMut(&[PlanePoint; 3], u32)>(cap: u32, visit: &mut F) {
    fn rec<F: FnMut(&[PlanePoint; 3], u32)>(
        corners: [PlanePoint; 3],
        depth: u32,
        cap: u32,
        visit: &mut F,
    ) {
        visit(&corners, depth);
        if depth < cap {
            for i in 0..3 {
                rec(child_corners(&corners, i), depth + 1, cap, visit);
            }
        }
    }
    rec(base_corners(), 0, cap, visit);
}

/// Midpoint state `psi_n`: the average of `f` over the `3^(n+1)` side
/// midpoints of the level-`n` cells.
pub fn midpoint_state<F: Fn(PlanePoint) -> f64>(f: &F, n: u32) -> f64 {
    let mut sum = KahanSum::new();
    let mut count = 0u64;
    let mut visit = |corners: &[PlanePoint; 3], depth: u32| {
        if depth == n {
            sum.add(f(corners[0].midpoint(&corners[1])));
            sum.add(f(corners[0].midpoint(&corners[2])));
            sum.add(f(corners[1].midpoint(&corners[2])));
            count += 3;
        }
    };
    for_each_cell(n, &mut visit);
    sum.value() / count as f64
}

/// Vertex state: the average of `f` over the vertices of the level-`n`
/// graph; `|V_n| = (3^(n+1) + 3) / 2`.
pub fn vertex_state<F: Fn(PlanePoint) -> f64>(f: &F, n: u32) -> f64 {
    let scale = 1i64 << n;
    let mut seen: HashMap<(i64, i64), ()> = HashMap::new();
    let mut sum = KahanSum::new();
    let corners = base_corners();
    let to_plane = |j: i64, k: i64| {
        let fj = j as f64 / scale as f64;
        let fk = k as f64 / scale as f64;
        PlanePoint::new(
            corners[0].x + fj * (corners[1].x - corners[0].x) + fk * (corners[2].x - corners[0].x),
            corners[0].y + fj * (corners[1].y - corners[0].y) + fk * (corners[2].y - corners[0].y),
        )
    };
    let mut stack = vec![([(0i64, 0i64), (scale, 0), (0, scale)], 0u32)];
    while let Some((cell, depth)) = stack.pop() {
        if depth == n {
            for key in cell {
                if seen.insert(key, ()).is_none() {
                    sum.add(f(to_plane(key.0, key.1)));
                }
            }
        } else {
            let mid = |a: (i64, i64), b: (i64, i64)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
            let m01 = mid(cell[0], cell[1]);
            let m02 = mid(cell[0], cell[2]);
            let m12 = mid(cell[1], cell[2]);
            stack.push(([cell[0], m01, m02], depth + 1));
            stack.push(([m01, cell[1], m12], depth + 1));
            stack.push(([m02, m12, cell[2]], depth + 1));
        }
    }
    sum.value() / seen.len() as f64
}

/// Per-level sums of perimeter averages: entry `n` is
/// `sum_i avg(f on boundary of cell_{n,i})`, with composite trapezoid
/// quadrature (`quad_points` subintervals per side, corners included).
pub fn level_average_sums<F: Fn(PlanePoint) -> f64>(
    f: &F,
    level_cap: u32,
    quad_points: u32,
) -> Vec<f64> {
    let q = quad_points.max(1);
    let mut sums = vec![KahanSum::new(); level_cap as usize + 1];
    let side_avg = |a: &PlanePoint, b: &PlanePoint| {
        let mut acc = 0.5 * (f(*a) + f(*b));
        for i in 1..q {
            acc += f(a.lerp(b, i as f64 / q as f64));
        }
        acc / q as f64
    };
    let mut visit = |corners: &[PlanePoint; 3], depth: u32| {
        let avg = (side_avg(&corners[0], &corners[1])
            + side_avg(&corners[0], &corners[2])
            + side_avg(&corners[1], &corners[2]))
            / 3.0;
        sums[depth as usize].add(avg);
    };
    for_each_cell(level_cap, &mut visit);
    sums.into_iter().map(|s| s.value()).collect()
}

/// Comparison of the two Dixmier-type descriptions of the Hausdorff state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffReport {
    /// Residue of the (tail-completed) localized trace at the abscissa.
    pub residue: f64,
    /// Residue divided by the abscissa: the trace value of the function.
    pub dixmier_value: f64,
    /// `(4 / log 3) zeta(D) * psi_n(f)` from the midpoint state.
    pub state_value: f64,
    /// Midpoint-state value of the function.
    pub psi: f64,
    pub relative_discrepancy: f64,
}

/// Checks that the localized-trace residue reproduces the Hausdorff state:
/// extrapolates `delta * T_f(D + delta)` to `delta -> 0`, divides by `D`,
/// and compares with `(4 / log 3) zeta(D) psi_n(f)`.
///
/// The level truncation of the localized trace is an entire function, so the
/// level tail beyond `level_cap` is restored in closed form with the
/// cap-level average standing in for the state before the residue is
/// extracted.
pub fn hausdorff_functional_check<F: Fn(PlanePoint) -> f64>(
    f: &F,
    z_margin: f64,
    level_cap: u32,
) -> Result<HausdorffReport> {
    if !(z_margin > 0.0 && z_margin <= 2.0) {
        return Err(Error::InvalidInput(format!(
            "z margin must lie in (0, 2], got {z_margin}"
        )));
    }
    let d = gasket_dimension();
    let quad = 16;
    let sums = level_average_sums(f, level_cap, quad);
    let psi_tail = sums[level_cap as usize] / 3f64.powi(level_cap as i32);

    let completed = |z: f64| -> Result<f64> {
        let zc = Complex64::new(z, 0.0);
        let zeta = riemann_zeta(zc)?.re;
        let odd = (1.0 - 2f64.powf(-z)) * zeta;
        let mut total = KahanSum::new();
        for (n, s) in sums.iter().enumerate() {
            // per-cell factor 2 * 2^(-(n-1)z) * (1 - 2^-z) * zeta(z)
            total.add(s * 2.0 * 2f64.powf(-(n as f64 - 1.0) * z) * odd);
        }
        // levels beyond the cap at the limiting state value
        let qr = 3.0 * 2f64.powf(-z);
        let tail = psi_tail * 2.0 * 2f64.powf(z) * odd * qr.powi(level_cap as i32 + 1)
            / (1.0 - qr);
        total.add(tail);
        Ok(total.value())
    };

    let samples: Result<Vec<(f64, f64)>> = (0..8)
        .map(|k| {
            let delta = z_margin * 0.5f64.powi(k);
            Ok((delta, delta * completed(d + delta)?))
        })
        .collect();
    let samples = samples?;
    let (residue, err) = richardson(&samples);
    if !(err.is_finite() && err <= 1e-6 * residue.abs().max(1e-12)) {
        return Err(Error::ExtrapolationFailed);
    }
    let dixmier_value = residue / d;

    let psi = midpoint_state(f, level_cap);
    let state_value = 4.0 / 3.0_f64.ln() * riemann_zeta(Complex64::new(d, 0.0))?.re * psi;
    let scale = state_value.abs().max(dixmier_value.abs()).max(1e-12);
    Ok(HausdorffReport {
        residue,
        dixmier_value,
        state_value,
        psi,
        relative_discrepancy: (dixmier_value - state_value).abs() / scale,
    })
}
