//! Label-free working form of a triangulation.
//!
//! Each strip is a cyclic word of steps read from a starting diagonal: a
//! `Lower` step slides the diagonal's lower end one vertex to the right (the
//! triangle in between is based on the lower level), an `Upper` step slides the
//! upper end. Vertex labels are positions modulo the level size and only have
//! meaning relative to the starting diagonal, so local edits never have to
//! relabel whole levels.

use crate::error::{Error, Result};
use crate::lattice::{Forest, Triangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawStrip {
    lower_start: usize,
    upper_start: usize,
    steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawLt {
    sizes: Vec<usize>,
    strips: Vec<RawStrip>,
}

/// A vertex of a [`RawLt`]: level and raw label.
pub(crate) type RawVertex = (usize, usize);

impl RawLt {
    pub fn from_triangulation(t: &Triangulation) -> Self {
        let strips = (0..t.levels())
            .map(|n| {
                let diags = t.strip(n);
                let m = diags.len();
                let steps = (0..m)
                    .map(|i| {
                        let v = t.vertex_id(n, diags[i].lower);
                        let (start, len) = {
                            let fan = t.up_fan_diagonals(v);
                            (fan[0], fan.len())
                        };
                        if i == start + len - 1 {
                            Step::Lower
                        } else {
                            Step::Upper
                        }
                    })
                    .collect();
                RawStrip { lower_start: diags[0].lower, upper_start: diags[0].upper, steps }
            })
            .collect();
        RawLt { sizes: t.sizes().to_vec(), strips }
    }

    pub fn levels(&self) -> usize {
        self.strips.len()
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    pub fn triangle_count(&self) -> usize {
        self.strips.iter().map(|s| s.steps.len()).sum()
    }

    /// `(lower, upper)` labels of every diagonal of strip `n`.
    fn diagonals(&self, n: usize) -> Vec<(usize, usize)> {
        let s = &self.strips[n];
        let (kl, ku) = (self.sizes[n], self.sizes[n + 1]);
        let (mut l, mut u) = (s.lower_start, s.upper_start);
        s.steps
            .iter()
            .map(|step| {
                let d = (l, u);
                match step {
                    Step::Lower => l = (l + 1) % kl,
                    Step::Upper => u = (u + 1) % ku,
                }
                d
            })
            .collect()
    }

    /// Diagonal indices of every fan of strip `n`, keyed by the vertex label on
    /// the `side` level. A fan starts right after the step entering its vertex
    /// and ends at the step leaving it.
    fn fans(&self, n: usize, side: Step) -> Vec<Vec<usize>> {
        let diags = self.diagonals(n);
        let steps = &self.strips[n].steps;
        let m = steps.len();
        let k = match side {
            Step::Lower => self.sizes[n],
            Step::Upper => self.sizes[n + 1],
        };
        let label = |i: usize| match side {
            Step::Lower => diags[i].0,
            Step::Upper => diags[i].1,
        };
        let s0 = steps.iter().position(|&s| s == side).expect("every strip moves on both levels");
        let mut fans = vec![Vec::new(); k];
        for j in 1..=m {
            let i = (s0 + j) % m;
            fans[label(i)].push(i);
        }
        fans
    }

    /// Up-fan of vertex `p` at level `n < N`, left to right.
    fn up_fan(&self, n: usize, p: usize) -> Vec<usize> {
        self.fans(n, Step::Lower).swap_remove(p)
    }

    /// Down-fan of vertex `p` at level `n >= 1`, left to right.
    fn down_fan(&self, n: usize, p: usize) -> Vec<usize> {
        self.fans(n - 1, Step::Upper).swap_remove(p)
    }

    /// Restarts strip `n` at diagonal `start`.
    fn rotate(&mut self, n: usize, start: usize) {
        let (l, u) = self.diagonals(n)[start];
        let s = &mut self.strips[n];
        s.steps.rotate_left(start);
        s.lower_start = l;
        s.upper_start = u;
    }

    fn check_internal(&self, n: usize) -> Result<()> {
        if n == 0 || n >= self.levels() {
            return Err(Error::InvalidSite(format!("level {n} is not an internal level")));
        }
        Ok(())
    }

    /// Splits vertex `p` at internal level `n` into `p` and a new vertex `p + 1`
    /// joined by a horizontal edge. `p` keeps up-fan diagonals `0..=a` and
    /// down-fan diagonals `0..=b`; the new vertex takes the rest, sharing
    /// diagonals `a` and `b`. Labels above `p` on level `n` shift by one.
    pub fn insert(&mut self, n: usize, p: usize, a: usize, b: usize) -> Result<usize> {
        self.check_internal(n)?;
        let up = self.up_fan(n, p);
        let down = self.down_fan(n, p);
        if a >= up.len() || b >= down.len() {
            return Err(Error::InvalidSite(format!(
                "indices ({a}, {b}) outside fans of sizes ({}, {})",
                up.len(),
                down.len()
            )));
        }
        self.rotate(n, up[0]);
        self.strips[n].steps.insert(a, Step::Lower);
        self.rotate(n - 1, down[0]);
        self.strips[n - 1].steps.insert(b, Step::Upper);
        self.sizes[n] += 1;
        Ok(p + 1)
    }

    /// Contracts horizontal edge `q` (joining `q` and `q + 1`) at internal level
    /// `n`. Returns the merged vertex and the fan indices `(a, b)` at which
    /// [`RawLt::insert`] splits it back.
    pub fn collapse(&mut self, n: usize, q: usize) -> Result<(usize, usize, usize)> {
        self.check_internal(n)?;
        let k = self.sizes[n];
        if k < 2 {
            return Err(Error::InvalidCollapse(format!("level {n} would become empty")));
        }
        let up = self.up_fan(n, q);
        let down = self.down_fan(n, q);
        self.rotate(n, up[0]);
        self.strips[n].steps.remove(up.len() - 1);
        self.rotate(n - 1, down[0]);
        self.strips[n - 1].steps.remove(down.len() - 1);
        self.sizes[n] -= 1;
        let merged = collapse_label(k, q, q);
        self.strips[n].lower_start = merged;
        self.strips[n - 1].upper_start = merged;
        Ok((merged, up.len() - 1, down.len() - 1))
    }

    /// Neighbours of `(n, p)` in rotation order, with multiplicity: up-fan left
    /// to right, right neighbour, down-fan right to left, left neighbour.
    pub fn rotation(&self, n: usize, p: usize) -> Vec<RawVertex> {
        let k = self.sizes[n];
        let mut out = Vec::new();
        if n < self.levels() {
            let diags = self.diagonals(n);
            out.extend(self.up_fan(n, p).into_iter().map(|i| (n + 1, diags[i].1)));
        }
        out.push((n, (p + 1) % k));
        if n > 0 {
            let diags = self.diagonals(n - 1);
            out.extend(self.down_fan(n, p).into_iter().rev().map(|i| (n - 1, diags[i].0)));
        }
        out.push((n, (p + k - 1) % k));
        out
    }

    /// Canonical forest and, per level, the map from raw label to canonical position.
    pub fn canonicalize(&self) -> (Forest, Vec<Vec<usize>>) {
        let mut degrees = Vec::with_capacity(self.levels());
        let mut maps = vec![vec![0usize]];
        let mut r = 0usize; // raw label of canonical vertex 0 on the current level
        for n in 0..self.levels() {
            let (k, ku) = (self.sizes[n], self.sizes[n + 1]);
            let diags = self.diagonals(n);
            let fans = self.fans(n, Step::Lower);
            let mut deg = Vec::with_capacity(k);
            let mut next_r = None;
            for i in 0..k {
                let fan = &fans[(r + i) % k];
                deg.push(fan.len() - 1);
                if fan.len() > 1 && next_r.is_none() {
                    next_r = Some(diags[fan[0]].1);
                }
            }
            r = next_r.expect("some vertex has children");
            // canonical label of raw x is (x - r) mod k
            maps.push((0..ku).map(|x| (x + ku - r) % ku).collect());
            degrees.push(deg);
        }
        let forest = Forest::new(degrees).expect("raw strips describe a valid forest");
        (forest, maps)
    }

    pub fn to_triangulation(&self) -> (Triangulation, Vec<Vec<usize>>) {
        let (forest, maps) = self.canonicalize();
        (Triangulation::from_forest(&forest), maps)
    }
}

/// New label of old label `x` after collapsing edge `q` on a level of size `k`.
pub(crate) fn collapse_label(k: usize, q: usize, x: usize) -> usize {
    if q + 1 < k {
        if x <= q {
            x
        } else {
            x - 1
        }
    } else if x == 0 {
        // vertex 0 merges into k - 1, which becomes k - 2
        k - 2
    } else {
        x - 1
    }
}

/// New label of old label `x` after inserting a vertex to the right of `p`.
pub(crate) fn insert_label(p: usize, x: usize) -> usize {
    if x <= p {
        x
    } else {
        x + 1
    }
}
