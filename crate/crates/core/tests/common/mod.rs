//! Shared test oracles, kept independent of the library's own numerics:
//! a dense simplex solver for the Lipschitz dual, a direct-summation
//! Riemann zeta, a boundary winding counter for argument-principle checks,
//! Richardson extrapolation, and seeded random instance generators.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fractal_spectra::gasket::{parameterize, PlanePoint, TriangleAddress, SIDE};
use fractal_spectra::graph::{GraphPoint, WeightedGraph};

// ---------------------------------------------------------------------------
// Dense simplex (Bland's rule) for `max c.x  s.t.  A x <= b, x >= 0, b >= 0`
// ---------------------------------------------------------------------------

pub fn simplex_max(c: &[f64], a_rows: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let m = a_rows.len();
    let n = c.len();
    assert!(b.iter().all(|&bi| bi >= 0.0), "canonical form needs b >= 0");
    // tableau: m rows of [A | I | b], objective row [-c | 0 | 0]
    let width = n + m + 1;
    let mut t = vec![vec![0.0f64; width]; m + 1];
    for (i, row) in a_rows.iter().enumerate() {
        t[i][..n].copy_from_slice(row);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    for _ in 0..20_000 {
        // Bland: entering = smallest index with negative reduced cost
        let enter = (0..n + m).find(|&j| t[m][j] < -1e-11);
        let Some(enter) = enter else {
            return Some(t[m][width - 1]);
        };
        // leaving: min ratio, ties by smallest basis index
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > 1e-11 {
                let ratio = t[i][width - 1] / t[i][enter];
                if ratio < best - 1e-12
                    || (ratio < best + 1e-12
                        && leave.is_none_or(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = leave?; // None would mean unbounded
        let pivot = t[leave][enter];
        for cell in t[leave].iter_mut() {
            *cell /= pivot;
        }
        for i in 0..=m {
            if i != leave {
                let factor = t[i][enter];
                if factor != 0.0 {
                    let pivot_row = t[leave].clone();
                    for (cell, pv) in t[i].iter_mut().zip(&pivot_row) {
                        *cell -= factor * pv;
                    }
                }
            }
        }
        basis[leave] = enter;
    }
    None // cycling guard tripped
}

/// Lipschitz-dual value by a generic linear program: maximize `f(p) - f(q)`
/// over vertex assignments with `|f(u) - f(v)| <= len(e)`, after subdividing
/// at the two points. Free variables are split into positive parts, which
/// keeps every right-hand side positive.
pub fn lipschitz_lp_oracle(g: &WeightedGraph, p: GraphPoint, q: GraphPoint) -> f64 {
    let sub = g.subdivide_at(&[p, q]).expect("valid points");
    let graph = &sub.graph;
    let vp = sub.point_vertex[0];
    let vq = sub.point_vertex[1];
    let n = graph.vertex_count();
    // variable layout: for each vertex v != vq, f_v = x_{2k} - x_{2k+1}
    let mut var_of = vec![usize::MAX; n];
    let mut nv = 0;
    for (v, slot) in var_of.iter_mut().enumerate() {
        if v != vq {
            *slot = nv;
            nv += 1;
        }
    }
    let ncols = 2 * nv;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut add_diff_row = |u: usize, v: usize, len: f64| {
        // f_u - f_v <= len
        let mut row = vec![0.0; ncols];
        if u != vq {
            row[2 * var_of[u]] += 1.0;
            row[2 * var_of[u] + 1] -= 1.0;
        }
        if v != vq {
            row[2 * var_of[v]] -= 1.0;
            row[2 * var_of[v] + 1] += 1.0;
        }
        rows.push(row);
        rhs.push(len);
    };
    for e in graph.edges() {
        add_diff_row(e.u, e.v, e.len);
        add_diff_row(e.v, e.u, e.len);
    }
    let mut c = vec![0.0; ncols];
    if vp != vq {
        c[2 * var_of[vp]] = 1.0;
        c[2 * var_of[vp] + 1] = -1.0;
    }
    simplex_max(&c, &rows, &rhs).expect("bounded feasible program")
}

// ---------------------------------------------------------------------------
// Independent Riemann zeta: direct sum with Euler-Maclaurin tail
// ---------------------------------------------------------------------------

pub fn zeta_oracle(s: Complex64) -> Complex64 {
    let n = 60u64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let pow = |e: Complex64| (e * nf.ln()).exp();
    let one = Complex64::new(1.0, 0.0);
    sum += pow(one - s) / (s - 1.0);
    sum += pow(-s) / 2.0;
    sum += s * pow(-s - 1.0) / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * pow(-s - 3.0) / 720.0;
    sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * pow(-s - 5.0) / 30240.0;
    sum
}

// ---------------------------------------------------------------------------
// Argument-principle winding count along a rectangle boundary
// ---------------------------------------------------------------------------

/// Winding number of `f` along the boundary of a rectangle around `center`.
/// For a function holomorphic on the closed box except poles, the count is
/// `zeros - poles` (with multiplicity). Panics if the sampling cannot make
/// the argument increments small, which would indicate a zero/pole on the
/// boundary.
pub fn winding_number<F: Fn(Complex64) -> Complex64>(
    f: &F,
    center: Complex64,
    half_re: f64,
    half_im: f64,
) -> i32 {
    let corners = [
        center + Complex64::new(-half_re, -half_im),
        center + Complex64::new(half_re, -half_im),
        center + Complex64::new(half_re, half_im),
        center + Complex64::new(-half_re, half_im),
    ];
    let mut samples_per_side = 64usize;
    'retry: loop {
        let samples = samples_per_side;
        let mut total = 0.0f64;
        let mut prev = f(corners[0]);
        assert!(prev.norm() > 0.0, "value vanished on the contour");
        for side in 0..4 {
            let a = corners[side];
            let b = corners[(side + 1) % 4];
            for i in 1..=samples {
                let z = a + (b - a) * (i as f64 / samples as f64);
                let cur = f(z);
                assert!(cur.norm() > 0.0, "value vanished on the contour");
                let step = (cur / prev).arg();
                if step.abs() > 1.5 {
                    samples_per_side *= 2;
                    assert!(samples_per_side <= 1 << 14, "contour sampling diverged");
                    continue 'retry;
                }
                total += step;
                prev = cur;
            }
        }
        return (total / (2.0 * std::f64::consts::PI)).round() as i32;
    }
}

// ---------------------------------------------------------------------------
// Richardson extrapolation (test-side copy)
// ---------------------------------------------------------------------------

pub fn richardson_limit(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len();
    let hs: Vec<f64> = samples.iter().map(|&(h, _)| h).collect();
    let mut table: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let (h_hi, h_lo) = (hs[i - level], hs[i]);
            table[i] = (h_hi * table[i] - h_lo * table[i - 1]) / (h_hi - h_lo);
        }
    }
    table[n - 1]
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Connected weighted graph with `2..=max_vertices` vertices: a random
/// spanning tree plus a few extra edges, lengths in `[0.1, 3.0]`.
pub fn random_connected_graph(rng: &mut StdRng, max_vertices: usize) -> WeightedGraph {
    let n = rng.random_range(2..=max_vertices);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(0.1..3.0)));
        present.insert((u.min(v), u.max(v)));
    }
    let extras = rng.random_range(0..=n);
    for _ in 0..extras {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || present.contains(&(u.min(v), u.max(v))) {
            continue;
        }
        present.insert((u.min(v), u.max(v)));
        edges.push((u, v, rng.random_range(0.1..3.0)));
    }
    WeightedGraph::new(n, &edges).expect("generated instance is valid")
}

pub fn random_point(rng: &mut StdRng, g: &WeightedGraph) -> GraphPoint {
    let edge = rng.random_range(0..g.edge_count());
    let len = g.edges()[edge].len;
    GraphPoint {
        edge,
        offset: rng.random_range(0.0..len),
    }
}

/// Random point on the boundary of a cell of level at most `max_level`;
/// such points lie on edges of every approximating graph of level
/// `>= max_level`.
pub fn random_gasket_point(rng: &mut StdRng, max_level: u32) -> PlanePoint {
    let level = rng.random_range(0..=max_level);
    let word: Vec<u8> = (0..level).map(|_| rng.random_range(0..3u8)).collect();
    let addr = TriangleAddress::new(word).expect("letters in range");
    let half = SIDE * 1.5 * 0.5f64.powi(level as i32);
    let t = rng.random_range(-half..half);
    parameterize(&addr, t).expect("parameter in domain")
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn simplex_solves_textbook_instance() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36
        let v = simplex_max(
            &[3.0, 5.0],
            &[
                vec![1.0, 0.0],
                vec![0.0, 2.0],
                vec![3.0, 2.0],
            ],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((v - 36.0).abs() < 1e-9);
    }

    #[test]
    fn zeta_oracle_matches_classics() {
        let pi = std::f64::consts::PI;
        let z2 = zeta_oracle(Complex64::new(2.0, 0.0));
        assert!((z2.re - pi * pi / 6.0).abs() < 1e-12);
        let z4 = zeta_oracle(Complex64::new(4.0, 0.0));
        assert!((z4.re - pi.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn winding_counts_simple_pole_and_zero() {
        let f = |z: Complex64| 1.0 / (z - Complex64::new(0.5, 0.5));
        assert_eq!(winding_number(&f, Complex64::new(0.5, 0.5), 0.3, 0.3), -1);
        let g = |z: Complex64| z - Complex64::new(-1.0, 2.0);
        assert_eq!(winding_number(&g, Complex64::new(-1.0, 2.0), 0.2, 0.2), 1);
        assert_eq!(winding_number(&g, Complex64::new(3.0, 2.0), 0.2, 0.2), 0);
    }
}
