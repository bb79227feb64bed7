//! Path neighbourhoods and modification plans.

use rand::Rng;

use super::{insert_pairs_tracked, Insertion};
use crate::error::{Error, Result};
use crate::lattice::{Degree, Triangulation, VertexId};
use crate::percolation::is_locally_geodesic;

/// Local description of one path vertex: its degree split and the rotation
/// positions of the path edges through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexCode {
    pub degree: Degree,
    /// Rotation index of the edge arriving from the previous path vertex.
    pub entry: Option<usize>,
    /// Rotation index of the edge leaving to the next path vertex.
    pub exit: Option<usize>,
}

impl VertexCode {
    /// `(d_up, entry, exit)`, each smaller than the total degree.
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.degree.up().unwrap_or(0), self.entry.unwrap_or(0), self.exit.unwrap_or(0))
    }
}

/// A self-avoiding locally geodesic path from the root with the degree
/// structure around it. The codes alone determine where the path sits in any
/// triangulation containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathNeighborhood {
    path: Vec<VertexId>,
    codes: Vec<VertexCode>,
}

impl PathNeighborhood {
    pub fn from_path(t: &Triangulation, path: &[VertexId]) -> Result<Self> {
        if path.first() != Some(&t.root()) {
            return Err(Error::InvalidPath("path must start at the root".into()));
        }
        if !is_locally_geodesic(t, path)? {
            return Err(Error::InvalidPath("path is not self-avoiding and locally geodesic".into()));
        }
        let mut codes: Vec<VertexCode> =
            path.iter().map(|&v| VertexCode { degree: t.degree(v), entry: None, exit: None }).collect();
        for j in 0..path.len().saturating_sub(1) {
            let rot = t.rotation(path[j]);
            let exit = rot.iter().position(|e| e.neighbor == path[j + 1]).expect("adjacent");
            let edge = rot[exit].edge;
            let entry = t.rotation(path[j + 1]).iter().position(|e| e.edge == edge).expect("edge has two ends");
            codes[j].exit = Some(exit);
            codes[j + 1].entry = Some(entry);
        }
        Ok(PathNeighborhood { path: path.to_vec(), codes })
    }

    pub fn path(&self) -> &[VertexId] {
        &self.path
    }

    pub fn codes(&self) -> &[VertexCode] {
        &self.codes
    }

    /// Number of edges of the path.
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() == 1
    }

    /// Total degrees `d_0 .. d_n`.
    pub fn degrees(&self) -> Vec<usize> {
        self.codes.iter().map(|c| c.degree.total()).collect()
    }

    /// Follows the codes from the root of `t`. The walk is forced, so an
    /// embedding is unique when it exists.
    pub fn embed(&self, t: &Triangulation) -> Result<Vec<VertexId>> {
        let mut cur = t.root();
        let mut out = vec![cur];
        if t.degree(cur) != self.codes[0].degree {
            return Err(Error::NotEmbedded);
        }
        for j in 0..self.len() {
            let rot = t.rotation(cur);
            let exit = self.codes[j].exit.expect("inner vertices have an exit");
            let end = *rot.get(exit).ok_or(Error::NotEmbedded)?;
            let next = end.neighbor;
            let entry = self.codes[j + 1].entry.expect("inner vertices have an entry");
            if t.degree(next) != self.codes[j + 1].degree || t.rotation(next).get(entry).map(|e| e.edge) != Some(end.edge)
            {
                return Err(Error::NotEmbedded);
            }
            out.push(next);
            cur = next;
        }
        if !is_locally_geodesic(t, &out)? {
            return Err(Error::NotEmbedded);
        }
        Ok(out)
    }

    /// Path indices of the vertices a plan must modify: internal vertices of
    /// degree at least `threshold`.
    pub fn qualifying(&self, threshold: usize) -> Vec<usize> {
        self.codes
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.degree, Degree::Internal { .. }) && c.degree.total() >= threshold)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Every vertex sequence from the root matching the codes, found by trying all
/// neighbour choices. Used to check that [`PathNeighborhood::embed`] is unique.
pub fn embed_brute_force(gamma: &PathNeighborhood, t: &Triangulation) -> Vec<Vec<VertexId>> {
    fn rec(g: &PathNeighborhood, t: &Triangulation, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        let j = cur.len() - 1;
        if t.degree(cur[j]) != g.codes[j].degree {
            return;
        }
        if j == g.len() {
            if is_locally_geodesic(t, cur).unwrap_or(false) {
                out.push(cur.clone());
            }
            return;
        }
        let rot = t.rotation(cur[j]);
        let mut tried = Vec::new();
        for end in &rot {
            if tried.contains(&end.neighbor) {
                continue;
            }
            tried.push(end.neighbor);
            let w = end.neighbor;
            // any edge between the two vertices with the coded rotation positions
            let ok = rot.iter().enumerate().any(|(x, e)| {
                e.neighbor == w
                    && Some(x) == g.codes[j].exit
                    && t.rotation(w).iter().position(|f| f.edge == e.edge) == g.codes[j + 1].entry
            });
            if ok {
                cur.push(w);
                rec(g, t, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(gamma, t, &mut vec![t.root()], &mut out);
    out
}

/// Degree threshold and insertions per modified vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SurgeryParams {
    pub threshold: usize,
    pub insert_count: usize,
}

impl Default for SurgeryParams {
    fn default() -> Self {
        SurgeryParams { threshold: 100, insert_count: 10 }
    }
}

/// Insertions at one path vertex. Fan indices refer to the fans of the vertex
/// at the moment the entry is applied (entries run in path order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanEntry {
    pub path_index: usize,
    pub up: Vec<usize>,
    pub down: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ModificationPlan {
    pub entries: Vec<PlanEntry>,
}

impl ModificationPlan {
    pub fn empty() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone)]
pub struct ModifiedOutcome {
    pub triangulation: Triangulation,
    /// Image of every path vertex (the leftmost piece of a split vertex).
    pub path: Vec<VertexId>,
}

/// `w(T)`: applies the plan along the embedded path.
pub fn apply_modification(
    t: &Triangulation,
    gamma: &PathNeighborhood,
    plan: &ModificationPlan,
    params: &SurgeryParams,
) -> Result<Triangulation> {
    Ok(apply_modification_tracked(t, gamma, plan, params)?.triangulation)
}

pub fn apply_modification_tracked(
    t: &Triangulation,
    gamma: &PathNeighborhood,
    plan: &ModificationPlan,
    params: &SurgeryParams,
) -> Result<ModifiedOutcome> {
    let path = gamma.embed(t)?;
    let expected = gamma.qualifying(params.threshold);
    let got: Vec<usize> = plan.entries.iter().map(|e| e.path_index).collect();
    if got != expected {
        return Err(Error::InvalidPlan(format!("plan modifies path vertices {got:?}, degrees require {expected:?}")));
    }
    if let Some(e) = plan
        .entries
        .iter()
        .find(|e| e.up.len() != params.insert_count || e.down.len() != params.insert_count)
    {
        return Err(Error::InvalidPlan(format!(
            "entry at path index {} does not insert {} pairs",
            e.path_index, params.insert_count
        )));
    }
    let mut cur = ModifiedOutcome { triangulation: t.clone(), path };
    for entry in &plan.entries {
        cur = apply_entry(cur, entry)?;
    }
    Ok(cur)
}

fn apply_entry(cur: ModifiedOutcome, entry: &PlanEntry) -> Result<ModifiedOutcome> {
    let v = cur.path[entry.path_index];
    let ins = Insertion { vertex: v, up: entry.up.clone(), down: entry.down.clone() };
    let out = insert_pairs_tracked(&cur.triangulation, &ins).map_err(|e| Error::InvalidPlan(e.to_string()))?;
    Ok(ModifiedOutcome {
        path: cur.path.iter().map(|&x| out.vertex_map[x]).collect(),
        triangulation: out.triangulation,
    })
}

/// Draws a plan with uniform ordered selections at every qualifying vertex
/// and applies it.
pub fn random_modification<R: Rng + ?Sized>(
    t: &Triangulation,
    gamma: &PathNeighborhood,
    params: &SurgeryParams,
    rng: &mut R,
) -> Result<(ModificationPlan, ModifiedOutcome)> {
    let path = gamma.embed(t)?;
    let mut cur = ModifiedOutcome { triangulation: t.clone(), path };
    let mut plan = ModificationPlan::empty();
    for j in gamma.qualifying(params.threshold) {
        let d = cur.triangulation.degree(cur.path[j]);
        let (du, dd) = (d.up().expect("internal"), d.down().expect("internal"));
        let mut up: Vec<usize> = (0..params.insert_count).map(|_| rng.gen_range(0..du)).collect();
        let mut down: Vec<usize> = (0..params.insert_count).map(|_| rng.gen_range(0..dd)).collect();
        up.sort_unstable();
        down.sort_unstable();
        let entry = PlanEntry { path_index: j, up, down };
        cur = apply_entry(cur, &entry)?;
        plan.entries.push(entry);
    }
    Ok((plan, cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Forest;
    use crate::rng::stream_rng;

    fn sample() -> Triangulation {
        Triangulation::from_forest(&Forest::new(vec![vec![2], vec![1, 2], vec![1, 0, 2], vec![1, 1, 1]]).unwrap())
    }

    #[test]
    fn embedding_recovers_the_path() {
        let t = sample();
        let path = vec![0, t.vertex_id(1, 1), t.vertex_id(2, 2)];
        let g = PathNeighborhood::from_path(&t, &path).unwrap();
        assert_eq!(g.embed(&t).unwrap(), path);
        assert_eq!(embed_brute_force(&g, &t), vec![path]);
        assert_eq!(g.degrees().len(), 3);
    }

    #[test]
    fn rejects_non_geodesic_paths() {
        let t = sample();
        let a = t.vertex_id(1, 0);
        let b = t.vertex_id(1, 1);
        assert!(PathNeighborhood::from_path(&t, &[0, a, b]).is_err());
        assert!(PathNeighborhood::from_path(&t, &[a, b]).is_err());
    }

    #[test]
    fn empty_plan_is_identity_and_plans_add_triangles() {
        let t = sample();
        let v = t.vertex_id(2, 2);
        let path = vec![0, t.vertex_id(1, 1), v];
        let g = PathNeighborhood::from_path(&t, &path).unwrap();
        let high = SurgeryParams { threshold: 1000, insert_count: 10 };
        assert_eq!(apply_modification(&t, &g, &ModificationPlan::empty(), &high).unwrap(), t);
        let low = SurgeryParams { threshold: 6, insert_count: 2 };
        let q = g.qualifying(low.threshold);
        assert!(!q.is_empty());
        let mut rng = stream_rng(4, 0);
        let (plan, out) = random_modification(&t, &g, &low, &mut rng).unwrap();
        assert_eq!(out.triangulation.triangle_count(), t.triangle_count() + 2 * low.insert_count * q.len());
        assert_eq!(apply_modification(&t, &g, &plan, &low).unwrap(), out.triangulation);
        assert!(apply_modification(&t, &g, &ModificationPlan::empty(), &low).is_err());
    }
}
