//! Lorentzian triangulations of the cylinder slice `S^1 x [0, N]`.
//!
//! A triangulation is stored through its strips. Strip `n` (between levels
//! `n` and `n + 1`) is the cyclic sequence of its `k_n + k_{n+1}` diagonal
//! edges, and triangle `t` of the strip sits between diagonals `t` and
//! `t + 1`. Labels grow to the right; level `n` vertex `j` and `j + 1 mod k_n`
//! are joined by horizontal edge `j`, so level 0 carries a self-loop.
//!
//! Triangulations are always built from a [`Forest`] with the fan
//! construction, so two triangulations are equal iff their forests are.

mod dual;
mod enumerate;
mod forest;

pub use dual::{DualEdge, DualGraph, DualVertex};
pub use enumerate::{
    critical_weights, enumerate_forests, enumerate_triangulations, strip_count, ENUM_MAX_LEVELS, ENUM_MAX_WIDTH,
};
pub use forest::Forest;

use crate::error::{Error, Result};
use crate::gw::SpineForest;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Level and position of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub level: usize,
    pub index: usize,
}

/// A non-horizontal edge of a strip, by the positions of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Diagonal {
    pub lower: usize,
    pub upper: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Horizontal edge on the lower level, apex above.
    Up,
    /// Horizontal edge on the upper level, apex below.
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub strip: usize,
    /// Position inside the strip.
    pub index: usize,
    pub orientation: Orientation,
    pub vertices: [VertexId; 3],
    /// The horizontal edge of the triangle.
    pub horizontal: EdgeId,
    /// The two diagonals bounding the triangle, left then right.
    pub diagonals: [EdgeId; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Horizontal { level: usize, index: usize },
    Diagonal { strip: usize, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// One entry of a vertex rotation: the edge and the vertex at its far end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub neighbor: VertexId,
}

/// Vertex degree, split into up and down parts where they exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    Internal { up: usize, down: usize },
    /// Level 0: no down-edges.
    Bottom { up: usize },
    /// Level `N`: up-edges lie outside the slice.
    Top { down: usize },
}

impl Degree {
    /// `d_up + d_dn + 2`, counting only the parts present in the slice.
    pub fn total(&self) -> usize {
        match *self {
            Degree::Internal { up, down } => up + down + 2,
            Degree::Bottom { up } => up + 2,
            Degree::Top { down } => down + 2,
        }
    }

    pub fn is_boundary(&self) -> bool {
        !matches!(self, Degree::Internal { .. })
    }

    pub fn up(&self) -> Option<usize> {
        match *self {
            Degree::Internal { up, .. } | Degree::Bottom { up } => Some(up),
            Degree::Top { .. } => None,
        }
    }

    pub fn down(&self) -> Option<usize> {
        match *self {
            Degree::Internal { down, .. } | Degree::Top { down } => Some(down),
            Degree::Bottom { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    forest: Forest,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    strips: Vec<Vec<Diagonal>>,
    /// Per vertex: first diagonal of the up-fan in its strip and the fan length.
    up_fan: Vec<(usize, usize)>,
    /// Per vertex: first diagonal (cyclically) of the down-fan and its length.
    down_fan: Vec<(usize, usize)>,
    triangles: Vec<Triangle>,
    strip_offsets: Vec<usize>,
    edges: Vec<Edge>,
    horizontal_offsets: Vec<usize>,
    diagonal_offsets: Vec<usize>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.forest == other.forest
    }
}

impl Eq for Triangulation {}

impl From<&SpineForest> for Triangulation {
    fn from(sf: &SpineForest) -> Self {
        Triangulation::from_forest(&sf.forest())
    }
}

/// Builds the triangulation encoded by a forest (see [`Triangulation::from_forest`]).
pub fn forest_to_triangulation(forest: &Forest) -> Triangulation {
    Triangulation::from_forest(forest)
}

/// Recovers the forest by keeping one down-edge per vertex (see [`Triangulation::to_forest`]).
pub fn triangulation_to_forest(t: &Triangulation) -> Result<Forest> {
    t.to_forest()
}

impl Triangulation {
    /// Fan construction: a level-`n` vertex with out-degree `d` gets up-edges to
    /// its `d` children and one closing up-edge to the next level-`(n+1)` vertex
    /// to the right of its last child (its own first child when `d = 0`).
    pub fn from_forest(forest: &Forest) -> Self {
        let sizes = forest.sizes();
        let n_levels = forest.levels();
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        for &k in &sizes {
            offsets.push(acc);
            acc += k;
        }
        offsets.push(acc);
        let vertex_count = acc;

        let mut strips = Vec::with_capacity(n_levels);
        let mut up_fan = vec![(0, 0); vertex_count];
        let mut down_fan = vec![(0, 0); vertex_count];
        for n in 0..n_levels {
            let k_up = sizes[n + 1];
            let mut diags = Vec::with_capacity(sizes[n] + k_up);
            let mut c = 0;
            for (i, &d) in forest.out_degrees(n).iter().enumerate() {
                up_fan[offsets[n] + i] = (diags.len(), d + 1);
                for j in 0..=d {
                    diags.push(Diagonal { lower: i, upper: (c + j) % k_up });
                }
                c += d;
            }
            // the down-fan of w runs from just after the child edge of w - 1 to
            // the child edge of w, cyclically
            let m = diags.len();
            let mut child_edge = vec![0usize; k_up];
            let mut t = 0;
            for &d in forest.out_degrees(n) {
                for _ in 0..d {
                    child_edge[diags[t].upper] = t;
                    t += 1;
                }
                t += 1;
            }
            for w in 0..k_up {
                let start = (child_edge[(w + k_up - 1) % k_up] + 1) % m;
                let len = (child_edge[w] + m - start) % m + 1;
                down_fan[offsets[n + 1] + w] = (start, len);
            }
            strips.push(diags);
        }

        let mut edges = Vec::new();
        let mut horizontal_offsets = Vec::with_capacity(sizes.len());
        for (n, &k) in sizes.iter().enumerate() {
            horizontal_offsets.push(edges.len());
            for j in 0..k {
                edges.push(Edge {
                    a: offsets[n] + j,
                    b: offsets[n] + (j + 1) % k,
                    kind: EdgeKind::Horizontal { level: n, index: j },
                });
            }
        }
        let mut diagonal_offsets = Vec::with_capacity(n_levels);
        for (n, diags) in strips.iter().enumerate() {
            diagonal_offsets.push(edges.len());
            for (t, dg) in diags.iter().enumerate() {
                edges.push(Edge {
                    a: offsets[n] + dg.lower,
                    b: offsets[n + 1] + dg.upper,
                    kind: EdgeKind::Diagonal { strip: n, index: t },
                });
            }
        }

        let mut triangles = Vec::with_capacity(forest.triangle_count());
        let mut strip_offsets = Vec::with_capacity(n_levels + 1);
        for (n, diags) in strips.iter().enumerate() {
            strip_offsets.push(triangles.len());
            let m = diags.len();
            for t in 0..m {
                let (l, r) = (diags[t], diags[(t + 1) % m]);
                let lower = |i: usize| offsets[n] + i;
                let upper = |i: usize| offsets[n + 1] + i;
                // the step after a closing edge moves along the lower level
                let closing = t + 1 == up_fan[offsets[n] + l.lower].0 + up_fan[offsets[n] + l.lower].1;
                let (orientation, vertices, horizontal) = if !closing {
                    (
                        Orientation::Down,
                        [lower(l.lower), upper(l.upper), upper(r.upper)],
                        horizontal_offsets[n + 1] + l.upper,
                    )
                } else {
                    (
                        Orientation::Up,
                        [lower(l.lower), lower(r.lower), upper(l.upper)],
                        horizontal_offsets[n] + l.lower,
                    )
                };
                triangles.push(Triangle {
                    strip: n,
                    index: t,
                    orientation,
                    vertices,
                    horizontal,
                    diagonals: [diagonal_offsets[n] + t, diagonal_offsets[n] + (t + 1) % m],
                });
            }
        }
        strip_offsets.push(triangles.len());

        Triangulation {
            forest: forest.clone(),
            sizes,
            offsets,
            strips,
            up_fan,
            down_fan,
            triangles,
            strip_offsets,
            edges,
            horizontal_offsets,
            diagonal_offsets,
        }
    }

    /// Reads the forest back from the adjacency structure: the parent of a
    /// vertex above level 0 is the lower end of the last edge of its down-fan
    /// (the down-edge adjacent to the closing edge side).
    pub fn to_forest(&self) -> Result<Forest> {
        let mut degrees = Vec::with_capacity(self.levels());
        for n in 0..self.levels() {
            let mut deg = vec![0usize; self.sizes[n]];
            let mut last_parent = 0;
            for w in 0..self.sizes[n + 1] {
                let v = self.vertex_id(n + 1, w);
                let fan = self.down_fan_diagonals(v);
                let parent = self.strips[n][*fan.last().expect("down-degree >= 1")].lower;
                if parent < last_parent {
                    return Err(Error::InvalidForest(format!("parents out of order at level {}", n + 1)));
                }
                last_parent = parent;
                deg[parent] += 1;
            }
            degrees.push(deg);
        }
        Forest::new(degrees)
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    /// Number of levels above the root (`N`).
    pub fn levels(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets[self.sizes.len()]
    }

    /// Vertices on levels `0..=n`.
    pub fn vertex_count_through(&self, n: usize) -> usize {
        self.offsets[n + 1]
    }

    pub fn vertex_id(&self, level: usize, index: usize) -> VertexId {
        debug_assert!(index < self.sizes[level]);
        self.offsets[level] + index
    }

    pub fn site(&self, v: VertexId) -> Site {
        let level = self.offsets.partition_point(|&o| o <= v) - 1;
        Site { level, index: v - self.offsets[level] }
    }

    pub fn level_of(&self, v: VertexId) -> usize {
        self.site(v).level
    }

    pub fn root(&self) -> VertexId {
        0
    }

    /// The horizontal loop at level 0.
    pub fn root_edge(&self) -> EdgeId {
        0
    }

    pub fn strip(&self, n: usize) -> &[Diagonal] {
        &self.strips[n]
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    /// Triangles of strip `n`, in strip order.
    pub fn strip_triangles(&self, n: usize) -> &[Triangle] {
        &self.triangles[self.strip_offsets[n]..self.strip_offsets[n + 1]]
    }

    pub fn triangle_id(&self, strip: usize, index: usize) -> usize {
        self.strip_offsets[strip] + index
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn horizontal_edge(&self, level: usize, index: usize) -> EdgeId {
        self.horizontal_offsets[level] + index
    }

    pub fn diagonal_edge(&self, strip: usize, index: usize) -> EdgeId {
        self.diagonal_offsets[strip] + index
    }

    /// Diagonal indices (in strip `level(v)`) of the up-fan, left to right.
    pub fn up_fan_diagonals(&self, v: VertexId) -> Vec<usize> {
        let level = self.level_of(v);
        if level == self.levels() {
            return Vec::new();
        }
        let (start, len) = self.up_fan[v];
        (start..start + len).collect()
    }

    /// Diagonal indices (in strip `level(v) - 1`) of the down-fan, left to right.
    pub fn down_fan_diagonals(&self, v: VertexId) -> Vec<usize> {
        let level = self.level_of(v);
        if level == 0 {
            return Vec::new();
        }
        let m = self.strips[level - 1].len();
        let (start, len) = self.down_fan[v];
        (start..start + len).map(|t| t % m).collect()
    }

    /// Up-neighbours, left to right, with multiplicity.
    pub fn up_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let level = self.level_of(v);
        self.up_fan_diagonals(v)
            .into_iter()
            .map(|t| self.vertex_id(level + 1, self.strips[level][t].upper))
            .collect()
    }

    /// Down-neighbours, left to right, with multiplicity.
    pub fn down_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let level = self.level_of(v);
        self.down_fan_diagonals(v)
            .into_iter()
            .map(|t| self.vertex_id(level - 1, self.strips[level - 1][t].lower))
            .collect()
    }

    /// Left and right neighbours on the same level.
    pub fn horizontal_neighbors(&self, v: VertexId) -> (VertexId, VertexId) {
        let Site { level, index } = self.site(v);
        let k = self.sizes[level];
        (self.vertex_id(level, (index + k - 1) % k), self.vertex_id(level, (index + 1) % k))
    }

    pub fn degree(&self, v: VertexId) -> Degree {
        let level = self.level_of(v);
        if level == 0 {
            Degree::Bottom { up: self.up_fan[v].1 }
        } else if level == self.levels() {
            Degree::Top { down: self.down_fan[v].1 }
        } else {
            Degree::Internal { up: self.up_fan[v].1, down: self.down_fan[v].1 }
        }
    }

    /// Edge-ends around `v` in clockwise order: up-fan left to right, the right
    /// horizontal edge, the down-fan right to left, the left horizontal edge.
    /// Loops appear twice.
    pub fn rotation(&self, v: VertexId) -> Vec<EdgeEnd> {
        let Site { level, index } = self.site(v);
        let k = self.sizes[level];
        let mut out = Vec::new();
        if level < self.levels() {
            for t in self.up_fan_diagonals(v) {
                let edge = self.diagonal_edge(level, t);
                out.push(EdgeEnd { edge, neighbor: self.edges[edge].b });
            }
        }
        let right = self.horizontal_edge(level, index);
        out.push(EdgeEnd { edge: right, neighbor: self.edges[right].b });
        if level > 0 {
            for t in self.down_fan_diagonals(v).into_iter().rev() {
                let edge = self.diagonal_edge(level - 1, t);
                out.push(EdgeEnd { edge, neighbor: self.edges[edge].a });
            }
        }
        let left = self.horizontal_edge(level, (index + k - 1) % k);
        out.push(EdgeEnd { edge: left, neighbor: self.edges[left].a });
        out
    }

    /// All neighbours with multiplicity, in rotation order.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.rotation(v).into_iter().map(|e| e.neighbor).collect()
    }

    /// Whether `a` and `b` share an edge.
    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        let (la, lb) = (self.level_of(a), self.level_of(b));
        if la.abs_diff(lb) > 1 {
            return false;
        }
        self.rotation(a).iter().any(|e| e.neighbor == b)
    }

    /// Checks the structural invariants of a Lorentzian triangulation.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidForest(msg));
        if self.sizes[0] != 1 {
            return bad("level 0 must hold one vertex".into());
        }
        if let Some(n) = self.sizes.iter().position(|&k| k == 0) {
            return Err(Error::EmptyLevel(n));
        }
        for n in 0..self.levels() {
            if self.strips[n].len() != self.sizes[n] + self.sizes[n + 1] {
                return bad(format!("strip {n} has {} triangles", self.strips[n].len()));
            }
            let mut d_up = 0;
            for i in 0..self.sizes[n] {
                d_up += self.up_fan[self.vertex_id(n, i)].1;
            }
            if d_up != self.strips[n].len() {
                return bad(format!("up-degrees at level {n} do not cover strip {n}"));
            }
            for w in 0..self.sizes[n + 1] {
                if self.down_fan[self.vertex_id(n + 1, w)].1 == 0 {
                    return bad(format!("vertex {w} at level {} has no down-edge", n + 1));
                }
            }
        }
        for tri in &self.triangles {
            let horizontals = [tri.horizontal, tri.diagonals[0], tri.diagonals[1]]
                .iter()
                .filter(|&&e| matches!(self.edges[e].kind, EdgeKind::Horizontal { .. }))
                .count();
            if horizontals != 1 {
                return bad(format!("triangle {:?} has {horizontals} horizontal edges", tri));
            }
        }
        let sumdeg: usize = match self.levels() {
            0 => 0,
            n => (0..self.vertex_count_through(n - 1)).map(|v| self.up_fan[v].1).sum(),
        };
        if sumdeg != self.triangle_count() {
            return bad(format!("sum of (out-degree + 1) is {sumdeg}, F = {}", self.triangle_count()));
        }
        Ok(())
    }

    pub fn dual_graph(&self) -> DualGraph {
        DualGraph::new(self)
    }
}
