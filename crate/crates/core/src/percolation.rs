//! Disagreement percolation: site percolation with `p_v = tanh(beta d_v)`.
//!
//! A triangulation with `N + 1` levels carries marks on levels `0..=N`; the
//! top level only provides the up-edges that make level-`N` degrees complete.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gw::sample_spine_forest;
use crate::lattice::{Triangulation, VertexId};
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::stats::Estimate;

/// Largest path length [`count_salg_paths`] will enumerate.
pub const SALG_MAX_LENGTH: usize = 12;

/// `tanh(beta d)`: the total-variation distance between the two extreme
/// single-site conditionals of a degree-`d` vertex.
pub fn open_probability<T: Real>(d: usize, beta: T) -> T {
    (beta * T::from_u64(d as u64)).tanh()
}

/// Degree used for marking: full degree on levels `1..=N`, `d_up + 2` at the root.
fn marked_degree(t: &Triangulation, v: VertexId) -> usize {
    t.degree(v).total()
}

/// Vertices carrying a mark: every level except the top one.
pub fn marked_count(t: &Triangulation) -> usize {
    t.vertex_count_through(t.levels().saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenSet {
    open: Vec<bool>,
    pub beta: f64,
    pub seed: Option<u64>,
}

impl OpenSet {
    /// Marks from pre-drawn uniforms: `v` is open iff `u_v < p_v`.
    /// Sharing the uniforms couples open sets at different `beta`.
    pub fn from_uniforms(t: &Triangulation, beta: f64, uniforms: &[f64]) -> Result<Self> {
        let marked = marked_count(t);
        if uniforms.len() != marked {
            return Err(Error::InvalidArgument(format!("{} uniforms for {marked} marked vertices", uniforms.len())));
        }
        let mut open: Vec<bool> = uniforms
            .iter()
            .enumerate()
            .map(|(v, &u)| u < open_probability(marked_degree(t, v), beta))
            .collect();
        open.resize(t.vertex_count(), false);
        Ok(OpenSet { open, beta, seed: None })
    }

    /// Explicit marks on the marked vertices.
    pub fn from_marks(t: &Triangulation, beta: f64, marks: &[bool]) -> Result<Self> {
        if marks.len() != marked_count(t) {
            return Err(Error::InvalidArgument("one mark per marked vertex required".into()));
        }
        let mut open = marks.to_vec();
        open.resize(t.vertex_count(), false);
        Ok(OpenSet { open, beta, seed: None })
    }

    pub fn is_open(&self, v: VertexId) -> bool {
        self.open[v]
    }

    pub fn marks(&self) -> &[bool] {
        &self.open
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    pub fn set_open(&mut self, v: VertexId, value: bool) {
        self.open[v] = value;
    }
}

/// Independent marks with `P(open) = tanh(beta d_v)`.
pub fn sample_open_set<R: Rng + ?Sized>(t: &Triangulation, beta: f64, rng: &mut R) -> OpenSet {
    let uniforms: Vec<f64> = (0..marked_count(t)).map(|_| rng.gen()).collect();
    OpenSet::from_uniforms(t, beta, &uniforms).expect("one uniform per marked vertex")
}

/// Farthest level reached by the open cluster of the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reach {
    pub level: usize,
    /// An open path from the root to a vertex on `level`, consecutive vertices adjacent.
    pub certificate: Vec<VertexId>,
}

/// Breadth-first search over open vertices from the root. `None` when the
/// root is closed, since then no open path starts.
pub fn max_open_reach(t: &Triangulation, opens: &OpenSet) -> Option<Reach> {
    reach_within(t, opens, t.levels().saturating_sub(1))
}

/// [`max_open_reach`] restricted to levels `0..=max_level`.
pub fn reach_within(t: &Triangulation, opens: &OpenSet, max_level: usize) -> Option<Reach> {
    let root = t.root();
    if !opens.is_open(root) {
        return None;
    }
    let mut parent = vec![usize::MAX; t.vertex_count()];
    parent[root] = root;
    let mut best = root;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        if t.level_of(v) > t.level_of(best) {
            best = v;
        }
        for w in t.neighbors(v) {
            if parent[w] == usize::MAX && opens.is_open(w) && t.level_of(w) <= max_level {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut certificate = vec![best];
    while *certificate.last().unwrap() != root {
        let v = *certificate.last().unwrap();
        certificate.push(parent[v]);
    }
    certificate.reverse();
    Some(Reach { level: t.level_of(best), certificate })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachRow {
    pub beta: f64,
    #[serde(rename = "N")]
    pub levels: usize,
    pub trials: usize,
    pub reach_count: usize,
    pub estimate: f64,
    pub stderr: f64,
}

/// Annealed probability that the root's open cluster reaches level `N`,
/// for every `(beta, N)` pair of the grids.
///
/// Trial `i` samples one triangulation with `max(N) + 1` levels and one
/// uniform per vertex from stream `i` of `seed`; every grid point reuses them,
/// so the estimates are coupled and exactly monotone in `beta` and `N`.
pub fn annealed_reach_curve(levels: &[usize], betas: &[f64], trials: usize, seed: u64) -> Result<Vec<ReachRow>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let n_max = *levels.iter().max().ok_or(Error::InvalidArgument("empty level list".into()))?;
    if let Some(b) = betas.iter().find(|b| b.is_nan() || **b < 0.0) {
        return Err(Error::InvalidArgument(format!("beta = {b} must be non-negative")));
    }
    let hits: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let sf = sample_spine_forest(&mut rng, n_max + 1).expect("positive level count");
            let t = Triangulation::from(&sf);
            let uniforms: Vec<f64> = (0..marked_count(&t)).map(|_| rng.gen()).collect();
            let mut out = Vec::with_capacity(betas.len() * levels.len());
            for &beta in betas {
                let opens = OpenSet::from_uniforms(&t, beta, &uniforms).expect("sized uniforms");
                for &n in levels {
                    let hit = reach_within(&t, &opens, n).is_some_and(|r| r.level >= n);
                    out.push(hit);
                }
            }
            out
        })
        .collect();
    let mut rows = Vec::with_capacity(betas.len() * levels.len());
    for (b, &beta) in betas.iter().enumerate() {
        for (j, &n) in levels.iter().enumerate() {
            let idx = b * levels.len() + j;
            let reach_count = hits.iter().filter(|h| h[idx]).count();
            let est = Estimate::proportion(reach_count, trials);
            rows.push(ReachRow { beta, levels: n, trials, reach_count, estimate: est.mean, stderr: est.stderr });
        }
    }
    Ok(rows)
}

/// Single-point version of [`annealed_reach_curve`].
pub fn annealed_reach_probability(levels: usize, beta: f64, trials: usize, seed: u64) -> Result<Estimate> {
    let row = annealed_reach_curve(&[levels], &[beta], trials, seed)?.remove(0);
    Ok(Estimate { mean: row.estimate, stderr: row.stderr, samples: trials })
}

fn check_walk(t: &Triangulation, path: &[VertexId]) -> Result<()> {
    if let Some(&v) = path.iter().find(|&&v| v >= t.vertex_count()) {
        return Err(Error::InvalidPath(format!("vertex {v} does not exist")));
    }
    for w in path.windows(2) {
        if !t.adjacent(w[0], w[1]) {
            return Err(Error::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1])));
        }
    }
    Ok(())
}

/// Whether every edge joining two vertices of the path is a path edge.
/// Paths that revisit a vertex are not locally geodesic.
pub fn is_locally_geodesic(t: &Triangulation, path: &[VertexId]) -> Result<bool> {
    check_walk(t, path)?;
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            if path[i] == path[j] || (j > i + 1 && t.adjacent(path[i], path[j])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of self-avoiding locally geodesic paths with `n` edges from the root.
pub fn count_salg_paths(t: &Triangulation, n: usize) -> Result<u64> {
    let mut count = 0u64;
    visit_salg_paths(t, n, &mut |_| count += 1)?;
    Ok(count)
}

/// All self-avoiding locally geodesic paths with `n` edges from the root.
pub fn salg_paths(t: &Triangulation, n: usize) -> Result<Vec<Vec<VertexId>>> {
    let mut out = Vec::new();
    visit_salg_paths(t, n, &mut |p| out.push(p.to_vec()))?;
    Ok(out)
}

fn visit_salg_paths(t: &Triangulation, n: usize, visit: &mut dyn FnMut(&[VertexId])) -> Result<()> {
    if n > SALG_MAX_LENGTH {
        return Err(Error::GuardExceeded { what: "path length", limit: SALG_MAX_LENGTH, got: n });
    }
    let neighbors: Vec<Vec<VertexId>> = (0..t.vertex_count())
        .map(|v| {
            let mut nb = t.neighbors(v);
            nb.retain(|&w| w != v);
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();
    let mut dfs = SalgSearch {
        nb: &neighbors,
        on_path: vec![false; t.vertex_count()],
        touching: vec![0; t.vertex_count()],
        path: vec![t.root()],
    };
    dfs.on_path[t.root()] = true;
    dfs.extend(n, visit);
    Ok(())
}

struct SalgSearch<'a> {
    nb: &'a [Vec<VertexId>],
    on_path: Vec<bool>,
    // how many path vertices (excluding the tip) each vertex touches
    touching: Vec<u32>,
    path: Vec<VertexId>,
}

impl SalgSearch<'_> {
    fn extend(&mut self, left: usize, visit: &mut dyn FnMut(&[VertexId])) {
        if left == 0 {
            visit(&self.path);
            return;
        }
        let tip = *self.path.last().unwrap();
        for &w in self.nb[tip].iter() {
            if self.on_path[w] || self.touching[w] > 0 {
                continue;
            }
            // the old tip becomes an interior vertex: its neighbours may no longer join
            for &x in &self.nb[tip] {
                self.touching[x] += 1;
            }
            self.on_path[w] = true;
            self.path.push(w);
            self.extend(left - 1, visit);
            self.path.pop();
            self.on_path[w] = false;
            for &x in &self.nb[tip] {
                self.touching[x] -= 1;
            }
        }
    }
}

/// Shortens a walk to a self-avoiding locally geodesic path with the same
/// endpoints, using only vertices of the walk: from each vertex jump to the
/// latest walk vertex adjacent to it.
pub fn shortcut(t: &Triangulation, path: &[VertexId]) -> Result<Vec<VertexId>> {
    check_walk(t, path)?;
    let Some(&first) = path.first() else {
        return Ok(Vec::new());
    };
    let mut out = vec![first];
    let mut i = 0;
    while i + 1 < path.len() {
        let cur = path[i];
        let j = (i + 1..path.len())
            .rev()
            .find(|&j| path[j] == cur || t.adjacent(cur, path[j]))
            .expect("the next walk vertex is adjacent");
        if path[j] == cur {
            i = j;
            continue;
        }
        out.push(path[j]);
        i = j;
    }
    Ok(out)
}
