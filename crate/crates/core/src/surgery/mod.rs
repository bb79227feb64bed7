//! Elementary perturbations: inserting pairs of triangles at a vertex, the
//! inverse horizontal-edge collapse, path neighbourhoods, modification plans
//! and the randomized reconstruction used for the overcounting bound.

mod neighborhood;
mod raw;
mod reconstruct;

pub use neighborhood::{
    apply_modification, apply_modification_tracked, embed_brute_force, random_modification, ModificationPlan, ModifiedOutcome,
    PathNeighborhood, PlanEntry, SurgeryParams, VertexCode,
};
pub use reconstruct::{
    randomized_reconstruction, reconstruction_bound, reconstruction_frequency, Recovered, Reference,
};

use crate::error::{Error, Result};
use crate::lattice::{EdgeId, EdgeKind, Triangulation, VertexId};
use raw::{collapse_label, insert_label, RawLt};

/// One elementary insertion site: an up-fan index and a down-fan index of the
/// vertex, with the neighbours they point at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertionSite {
    pub up_index: usize,
    pub down_index: usize,
    pub u_up: VertexId,
    pub u_dn: VertexId,
}

/// A `k`-fold insertion at `vertex`: `k` up-fan indices and `k` down-fan
/// indices, each non-decreasing (repeats allowed), paired left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Insertion {
    pub vertex: VertexId,
    pub up: Vec<usize>,
    pub down: Vec<usize>,
}

impl Insertion {
    pub fn single(vertex: VertexId, up: usize, down: usize) -> Self {
        Insertion { vertex, up: vec![up], down: vec![down] }
    }

    pub fn count(&self) -> usize {
        self.up.len()
    }
}

/// Result of an insertion, with old vertex ids mapped into the new triangulation.
#[derive(Debug, Clone)]
pub struct InsertOutcome {
    pub triangulation: Triangulation,
    /// `vertex_map[old] = new`.
    pub vertex_map: Vec<VertexId>,
    /// The split vertex followed by the inserted vertices, left to right.
    pub chain: Vec<VertexId>,
}

#[derive(Debug, Clone)]
pub struct CollapseOutcome {
    pub triangulation: Triangulation,
    pub vertex_map: Vec<VertexId>,
    /// The vertex the edge was contracted to.
    pub merged: VertexId,
    /// `Insertion::single(merged, up_index, down_index)` undoes the collapse.
    pub up_index: usize,
    pub down_index: usize,
}

fn internal_site(t: &Triangulation, v: VertexId) -> Result<(usize, usize, usize, usize)> {
    if v >= t.vertex_count() {
        return Err(Error::InvalidSite(format!("vertex {v} does not exist")));
    }
    let s = t.site(v);
    match t.degree(v) {
        crate::lattice::Degree::Internal { up, down } => Ok((s.level, s.index, up, down)),
        _ => Err(Error::BoundaryVertex(v)),
    }
}

/// All `d_up * d_dn` single insertion sites at an internal vertex.
pub fn insertion_sites(t: &Triangulation, v: VertexId) -> Result<Vec<InsertionSite>> {
    internal_site(t, v)?;
    let ups = t.up_neighbors(v);
    let downs = t.down_neighbors(v);
    Ok(ups
        .iter()
        .enumerate()
        .flat_map(|(a, &u_up)| {
            downs
                .iter()
                .enumerate()
                .map(move |(b, &u_dn)| InsertionSite { up_index: a, down_index: b, u_up, u_dn })
        })
        .collect())
}

/// Selections of `k` fan positions out of `m`, ordered left to right with
/// repeats allowed: `C(m + k - 1, k)`.
pub fn ordered_selections(m: usize, k: usize) -> u128 {
    binomial((m + k).saturating_sub(1) as u128, k as u128)
}

/// Number of distinct `k`-fold insertions at a vertex with fans `(d_up, d_dn)`.
pub fn multi_insertion_count(d_up: usize, d_dn: usize, k: usize) -> u128 {
    ordered_selections(d_up, k) * ordered_selections(d_dn, k)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn validate_indices(idx: &[usize], fan: usize, side: &str) -> Result<()> {
    if idx.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSite(format!("{side} indices must be non-decreasing")));
    }
    if idx.iter().any(|&i| i >= fan) {
        return Err(Error::InvalidSite(format!("{side} index outside a fan of size {fan}")));
    }
    Ok(())
}

/// Applies a (possibly multiple) insertion. Each elementary insertion adds two
/// triangles and one vertex to the right of the previous piece.
pub fn insert_pairs(t: &Triangulation, insertion: &Insertion) -> Result<Triangulation> {
    Ok(insert_pairs_tracked(t, insertion)?.triangulation)
}

pub fn insert_pairs_tracked(t: &Triangulation, insertion: &Insertion) -> Result<InsertOutcome> {
    let (level, p, d_up, d_dn) = internal_site(t, insertion.vertex)?;
    if insertion.up.len() != insertion.down.len() || insertion.up.is_empty() {
        return Err(Error::InvalidSite("need as many up as down indices, at least one".into()));
    }
    validate_indices(&insertion.up, d_up, "up")?;
    validate_indices(&insertion.down, d_dn, "down")?;
    let mut raw = RawLt::from_triangulation(t);
    let mut labels: Vec<usize> = (0..t.level_size(level)).collect();
    let mut chain = vec![p];
    let (mut prev_a, mut prev_b) = (0, 0);
    for (&a, &b) in insertion.up.iter().zip(&insertion.down) {
        let cur = *chain.last().unwrap();
        let new = raw.insert(level, cur, a - prev_a, b - prev_b)?;
        for x in labels.iter_mut() {
            *x = insert_label(cur, *x);
        }
        for x in chain.iter_mut() {
            *x = insert_label(cur, *x);
        }
        chain.push(new);
        prev_a = a;
        prev_b = b;
    }
    let (triangulation, maps) = raw.to_triangulation();
    let vertex_map = (0..t.vertex_count())
        .map(|v| {
            let s = t.site(v);
            let raw_label = if s.level == level { labels[s.index] } else { s.index };
            triangulation.vertex_id(s.level, maps[s.level][raw_label])
        })
        .collect();
    let chain = chain.iter().map(|&x| triangulation.vertex_id(level, maps[level][x])).collect();
    Ok(InsertOutcome { triangulation, vertex_map, chain })
}

/// Contracts horizontal edge `e` on an internal level with at least two vertices.
pub fn collapse_horizontal_edge(t: &Triangulation, e: EdgeId) -> Result<CollapseOutcome> {
    let edge = t.edges().get(e).ok_or_else(|| Error::InvalidCollapse(format!("edge {e} does not exist")))?;
    let EdgeKind::Horizontal { level, index } = edge.kind else {
        return Err(Error::InvalidCollapse(format!("edge {e} is not horizontal")));
    };
    if level == 0 || level >= t.levels() {
        return Err(Error::InvalidCollapse(format!("level {level} is a boundary level")));
    }
    let k = t.level_size(level);
    let mut raw = RawLt::from_triangulation(t);
    let (merged, a, b) = raw.collapse(level, index)?;
    let (triangulation, maps) = raw.to_triangulation();
    let vertex_map = (0..t.vertex_count())
        .map(|v| {
            let s = t.site(v);
            let raw_label = if s.level == level { collapse_label(k, index, s.index) } else { s.index };
            triangulation.vertex_id(s.level, maps[s.level][raw_label])
        })
        .collect();
    Ok(CollapseOutcome {
        merged: triangulation.vertex_id(level, maps[level][merged]),
        triangulation,
        vertex_map,
        up_index: a,
        down_index: b,
    })
}

/// All multisets of `k` positions out of `m`, as non-decreasing lists.
pub fn ordered_selection_list(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..m {
            cur.push(i);
            rec(m, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::lattice::Forest;

    fn sample() -> Triangulation {
        Triangulation::from_forest(&Forest::new(vec![vec![2], vec![1, 2], vec![1, 0, 2], vec![1, 1, 1]]).unwrap())
    }

    #[test]
    fn site_counts() {
        let t = sample();
        for v in 0..t.vertex_count() {
            match t.degree(v) {
                crate::lattice::Degree::Internal { up, down } => {
                    assert_eq!(insertion_sites(&t, v).unwrap().len(), up * down);
                }
                _ => assert!(insertion_sites(&t, v).is_err()),
            }
        }
        let chain = Triangulation::from_forest(&Forest::chain(3));
        assert_eq!(insertion_sites(&chain, 1).unwrap().len(), 4);
    }

    #[test]
    fn selection_counts() {
        for m in 1..=6 {
            for k in 1..=4 {
                assert_eq!(ordered_selection_list(m, k).len() as u128, ordered_selections(m, k));
                assert!(ordered_selections(m, k) >= binomial(m as u128, k as u128));
            }
        }
        assert_eq!(ordered_selections(12, 10), binomial(21, 10));
    }

    #[test]
    fn single_insertion_adds_two_triangles_and_collapses_back() {
        let t = sample();
        for v in 0..t.vertex_count() {
            let Ok(sites) = insertion_sites(&t, v) else { continue };
            for s in sites {
                let out = insert_pairs_tracked(&t, &Insertion::single(v, s.up_index, s.down_index)).unwrap();
                let t2 = &out.triangulation;
                t2.check_invariants().unwrap();
                assert_eq!(t2.triangle_count(), t.triangle_count() + 2);
                let (left, right) = (out.chain[0], out.chain[1]);
                assert_eq!(out.vertex_map[v], left);
                // neighbours of v gain at most one edge
                for w in 0..t.vertex_count() {
                    if w != v {
                        let before = t.degree(w).total();
                        let after = t2.degree(out.vertex_map[w]).total();
                        assert!(after <= before + 1);
                    }
                }
                let site = t2.site(left);
                let e = t2.horizontal_edge(site.level, site.index);
                assert_eq!(t2.edge(e).b, right);
                let back = collapse_horizontal_edge(t2, e).unwrap();
                assert_eq!(back.triangulation, t);
                assert_eq!(back.merged, v);
                assert_eq!((back.up_index, back.down_index), (s.up_index, s.down_index));
            }
        }
    }

    #[test]
    fn multi_insertions_are_distinct() {
        let t = sample();
        let v = t.vertex_id(2, 2);
        let d = t.degree(v);
        let (du, dd) = (d.up().unwrap(), d.down().unwrap());
        for k in 1..=3 {
            let mut seen = HashSet::new();
            for up in ordered_selection_list(du, k) {
                for down in ordered_selection_list(dd, k) {
                    let t2 = insert_pairs(&t, &Insertion { vertex: v, up: up.clone(), down }).unwrap();
                    assert_eq!(t2.triangle_count(), t.triangle_count() + 2 * k);
                    seen.insert(t2.forest().clone());
                }
            }
            assert_eq!(seen.len() as u128, multi_insertion_count(du, dd, k));
        }
    }

    #[test]
    fn bad_sites() {
        let t = sample();
        assert!(matches!(insert_pairs(&t, &Insertion::single(0, 0, 0)), Err(Error::BoundaryVertex(0))));
        let v = t.vertex_id(1, 0);
        assert!(insert_pairs(&t, &Insertion::single(v, 99, 0)).is_err());
        assert!(insert_pairs(&t, &Insertion { vertex: v, up: vec![1, 0], down: vec![0, 0] }).is_err());
        assert!(collapse_horizontal_edge(&t, t.root_edge()).is_err());
        assert!(collapse_horizontal_edge(&t, t.diagonal_edge(0, 0)).is_err());
    }
}
