//! Peierls contours: simple dual cycles winding once around the cylinder.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinState};
use crate::lattice::{DualGraph, EdgeId, Forest, Triangulation};

/// Exhaustive search is allowed when `F <= CONTOUR_MAX_TRIANGLES` or the
/// length bound is at most `CONTOUR_MAX_LENGTH`.
pub const CONTOUR_MAX_TRIANGLES: usize = 40;
pub const CONTOUR_MAX_LENGTH: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    /// Triangles visited, starting from the smallest id.
    pub dual_vertices: Vec<usize>,
    /// Dual edges in traversal order; `dual_edges[i]` leaves `dual_vertices[i]`.
    pub dual_edges: Vec<usize>,
    /// Primal edges crossed, in traversal order.
    pub crossed: Vec<EdgeId>,
    /// Signed number of turns around the cylinder in traversal order.
    pub winding: i32,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.crossed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossed.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ContourEnumeration {
    /// `counts[n]` is the number of contours of length `n`.
    pub counts: Vec<u64>,
    pub contours: Vec<Contour>,
}

/// All winding contours of length at most `n_max`, each once, oriented so that
/// the winding number is `+1`.
pub fn enumerate_contours(t: &Triangulation, n_max: usize) -> Result<ContourEnumeration> {
    let f = t.triangle_count();
    if n_max.min(f) > CONTOUR_MAX_LENGTH && f > CONTOUR_MAX_TRIANGLES {
        return Err(Error::GuardExceeded { what: "contour search triangles", limit: CONTOUR_MAX_TRIANGLES, got: f });
    }
    let g = t.dual_graph();
    let per_start: Vec<Vec<Contour>> = (0..g.vertex_count())
        .into_par_iter()
        .map(|s| cycles_from(&g, s, n_max))
        .collect();
    let contours: Vec<Contour> = per_start.into_iter().flatten().collect();
    let mut counts = vec![0u64; n_max + 1];
    for c in &contours {
        counts[c.len()] += 1;
    }
    Ok(ContourEnumeration { counts, contours })
}

/// Winding cycles whose smallest dual vertex is `s`.
fn cycles_from(g: &DualGraph, s: usize, n_max: usize) -> Vec<Contour> {
    // hop distance back to s, used to prune paths that cannot close in time
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(x) = queue.pop_front() {
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            if y >= s && dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut search = Search {
        g,
        s,
        n_max,
        dist,
        on_path: vec![false; g.vertex_count()],
        vertices: vec![s],
        edges: Vec::new(),
        winding: 0,
        out: Vec::new(),
    };
    search.on_path[s] = true;
    search.extend(s);
    search.out
}

struct Search<'a> {
    g: &'a DualGraph,
    s: usize,
    n_max: usize,
    dist: Vec<usize>,
    on_path: Vec<bool>,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    winding: i32,
    out: Vec<Contour>,
}

impl Search<'_> {
    fn extend(&mut self, x: usize) {
        let depth = self.edges.len();
        for &e in self.g.incident(x) {
            let edge = *self.g.edge(e);
            let y = edge.other(x);
            if y < self.s || self.edges.last() == Some(&e) {
                continue;
            }
            let w = self.winding + edge.winding_from(x);
            if y == self.s {
                if w == 1 && depth + 1 >= 2 {
                    let mut edges = self.edges.clone();
                    edges.push(e);
                    self.out.push(Contour {
                        dual_vertices: self.vertices.clone(),
                        crossed: edges.iter().map(|&d| self.g.edge(d).primal).collect(),
                        dual_edges: edges,
                        winding: 1,
                    });
                }
                continue;
            }
            if self.on_path[y] || self.dist[y] == usize::MAX || depth + 1 + self.dist[y] > self.n_max {
                continue;
            }
            self.on_path[y] = true;
            self.vertices.push(y);
            self.edges.push(e);
            let saved = self.winding;
            self.winding = w;
            self.extend(y);
            self.winding = saved;
            self.edges.pop();
            self.vertices.pop();
            self.on_path[y] = false;
        }
    }
}

/// Vertices reachable from the root without crossing `crossed`.
pub fn root_side(t: &Triangulation, crossed: &[EdgeId]) -> Vec<bool> {
    let mut blocked = vec![false; t.edges().len()];
    for &e in crossed {
        blocked[e] = true;
    }
    let mut seen = vec![false; t.vertex_count()];
    let mut queue = VecDeque::from([t.root()]);
    seen[t.root()] = true;
    while let Some(v) = queue.pop_front() {
        for end in t.rotation(v) {
            if !blocked[end.edge] && !seen[end.neighbor] {
                seen[end.neighbor] = true;
                queue.push_back(end.neighbor);
            }
        }
    }
    seen
}

/// Whether removing the crossed edges cuts the root off from level `N`.
pub fn separates(t: &Triangulation, contour: &Contour) -> bool {
    let side = root_side(t, &contour.crossed);
    let top = t.levels();
    (0..t.level_size(top)).all(|i| !side[t.vertex_id(top, i)])
}

/// Inverts every spin on the root side of `contour`.
pub fn flip_inside(model: &IsingModel<'_>, state: &SpinState, contour: &Contour) -> Result<SpinState> {
    let side = root_side(model.triangulation(), &contour.crossed);
    if side[model.free_count()..].iter().any(|&b| b) {
        return Err(Error::NotSeparating);
    }
    let mut out = state.clone();
    for (v, &inside) in side[..model.free_count()].iter().enumerate() {
        if inside {
            out.set(v, -state.spin(v))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub n: usize,
    pub count: u64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeierlsSeries {
    pub rows: Vec<SeriesRow>,
    pub total: f64,
    /// Smallest `n0` such that the tail `sum_{n >= n0} #C_n e^{-2 beta n}` is below one.
    pub tail_below_one_from: Option<usize>,
}

impl PeierlsSeries {
    pub fn total_below_one(&self) -> bool {
        self.total < 1.0
    }
}

/// Partial sums of `sum_n #C_n e^{-2 beta n}`.
pub fn peierls_series(counts: &[u64], beta: f64) -> PeierlsSeries {
    let terms: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(n, &c)| c as f64 * (-2.0 * beta * n as f64).exp())
        .collect();
    let mut acc = 0.0;
    let rows = counts
        .iter()
        .zip(&terms)
        .enumerate()
        .map(|(n, (&count, &term))| {
            acc += term;
            SeriesRow { n, count, partial_sum: acc }
        })
        .collect();
    let mut tail = 0.0;
    let mut from = if terms.is_empty() { Some(0) } else { None };
    for n in (0..terms.len()).rev() {
        tail += terms[n];
        if tail < 1.0 {
            from = Some(n);
        } else {
            break;
        }
    }
    PeierlsSeries { rows, total: acc, tail_below_one_from: from }
}

/// `S_{R,n}`: vertices at level `R - n` with a descendant at level `R + n`.
pub fn survivors_statistic(forest: &Forest, r: usize, n: usize) -> Result<usize> {
    if n > r {
        return Err(Error::InvalidArgument(format!("R - n = {r} - {n} is negative")));
    }
    if r + n > forest.levels() {
        return Err(Error::InvalidArgument(format!(
            "forest has {} levels, need R + n = {}",
            forest.levels(),
            r + n
        )));
    }
    let mut alive = vec![true; forest.level_size(r + n)];
    for level in (r - n..r + n).rev() {
        let mut child = 0;
        alive = forest
            .out_degrees(level)
            .iter()
            .map(|&d| {
                let a = alive[child..child + d].iter().any(|&x| x);
                child += d;
                a
            })
            .collect();
    }
    Ok(alive.iter().filter(|&&a| a).count())
}

/// The diagonal joining the spine vertices at levels `level` and `level + 1`.
pub fn spine_edge(t: &Triangulation, spine_positions: &[usize], level: usize) -> EdgeId {
    let v = t.vertex_id(level, spine_positions[level]);
    let fan = t.up_fan_diagonals(v);
    let t_idx = fan[..fan.len() - 1]
        .iter()
        .copied()
        .find(|&d| t.strip(level)[d].upper == spine_positions[level + 1])
        .expect("the spine child is a child of the spine vertex");
    t.diagonal_edge(level, t_idx)
}
