//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use lorentzian_ising::lattice::{Forest, Triangulation, VertexId};
use lorentzian_ising::percolation::salg_paths;
use lorentzian_ising::surgery::{
    apply_modification, insert_pairs_tracked, ordered_selection_list, Insertion, ModificationPlan, PathNeighborhood,
    PlanEntry, SurgeryParams,
};

/// `k 5^{k-1} / 6^{k+1}`, the law of the fifth level size, written out directly.
pub fn level_five_pmf(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    k as f64 * 5f64.powi(k as i32 - 1) / 6f64.powi(k as i32 + 1)
}

/// Total variation between two extreme single-site conditionals with `d`
/// neighbours all `+` or all `-`.
pub fn extreme_conditional_tv(d: usize, beta: f64) -> f64 {
    let h = beta * d as f64;
    let plus = [h.exp(), (-h).exp()];
    let minus = [(-h).exp(), h.exp()];
    let zp: f64 = plus.iter().sum();
    let zm: f64 = minus.iter().sum();
    0.5 * plus.iter().zip(&minus).map(|(a, b)| (a / zp - b / zm).abs()).sum::<f64>()
}

/// Unit weight `prod_v 2^{-(c_v + 1)}` of a forest under critical geometric branching.
pub fn branching_weight(f: &Forest) -> f64 {
    f.degree_lists().iter().flatten().map(|&c| 0.5f64.powi(c as i32 + 1)).product()
}

/// Dual graph built from triangle incidences: two triangles are joined across
/// every edge they share. Returns `(a, b, primal edge)` triples.
pub fn dual_edges_from_triangles(t: &Triangulation) -> Vec<(usize, usize, usize)> {
    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, tri) in t.triangles().iter().enumerate() {
        for e in tri.diagonals {
            by_edge.entry(e).or_default().push(i);
        }
        by_edge.entry(tri.horizontal).or_default().push(i);
    }
    let mut out = Vec::new();
    let mut edges: Vec<_> = by_edge.into_iter().collect();
    edges.sort();
    for (e, tris) in edges {
        if tris.len() == 2 {
            out.push((tris[0], tris[1], e));
        }
    }
    out
}

/// Number of simple dual cycles of each length `0..=n_max` whose crossed
/// edges cut the root off from the top level. Cycles are found by exhaustive
/// DFS from every start and deduplicated as edge sets.
pub fn naive_separating_cycles(t: &Triangulation, n_max: usize) -> Vec<u64> {
    let dual = dual_edges_from_triangles(t);
    let nv = t.triangle_count();
    let mut incident = vec![Vec::new(); nv];
    for (i, &(a, b, _)) in dual.iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    let mut cycles: HashSet<Vec<usize>> = HashSet::new();
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        dual: &[(usize, usize, usize)],
        incident: &[Vec<usize>],
        start: usize,
        x: usize,
        used: &mut Vec<usize>,
        on: &mut Vec<bool>,
        n_max: usize,
        out: &mut HashSet<Vec<usize>>,
    ) {
        if used.len() == n_max {
            return;
        }
        for &e in &incident[x] {
            if used.contains(&e) {
                continue;
            }
            let (a, b, _) = dual[e];
            let y = if a == x { b } else { a };
            if y == start {
                let mut key = used.clone();
                key.push(e);
                key.sort_unstable();
                out.insert(key);
            } else if !on[y] {
                on[y] = true;
                used.push(e);
                dfs(dual, incident, start, y, used, on, n_max, out);
                used.pop();
                on[y] = false;
            }
        }
    }
    for s in 0..nv {
        let mut on = vec![false; nv];
        on[s] = true;
        dfs(&dual, &incident, s, s, &mut Vec::new(), &mut on, n_max, &mut cycles);
    }
    let mut counts = vec![0u64; n_max + 1];
    for c in cycles {
        let crossed: Vec<usize> = c.iter().map(|&e| dual[e].2).collect();
        if cuts_root_from_top(t, &crossed) {
            counts[c.len()] += 1;
        }
    }
    counts
}

fn cuts_root_from_top(t: &Triangulation, crossed: &[usize]) -> bool {
    let blocked: HashSet<usize> = crossed.iter().copied().collect();
    let mut seen = vec![false; t.vertex_count()];
    let mut queue = VecDeque::from([t.root()]);
    seen[t.root()] = true;
    while let Some(v) = queue.pop_front() {
        for (e, edge) in t.edges().iter().enumerate() {
            if blocked.contains(&e) || (edge.a != v && edge.b != v) {
                continue;
            }
            let w = if edge.a == v { edge.b } else { edge.a };
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let top = t.levels();
    (0..t.level_size(top)).all(|i| !seen[t.vertex_id(top, i)])
}

/// Distinct neighbours of `v`, loops removed.
pub fn simple_neighbors(t: &Triangulation, v: VertexId) -> Vec<VertexId> {
    let mut nb: Vec<VertexId> = t.edges().iter().filter(|e| e.a != e.b).filter_map(|e| {
        if e.a == v {
            Some(e.b)
        } else if e.b == v {
            Some(e.a)
        } else {
            None
        }
    }).collect();
    nb.sort_unstable();
    nb.dedup();
    nb
}

/// Every self-avoiding path with `n` edges from the root.
pub fn self_avoiding_paths(t: &Triangulation, n: usize) -> Vec<Vec<VertexId>> {
    let nb: Vec<Vec<VertexId>> = (0..t.vertex_count()).map(|v| simple_neighbors(t, v)).collect();
    let mut out = Vec::new();
    let mut stack = vec![vec![t.root()]];
    while let Some(p) = stack.pop() {
        if p.len() == n + 1 {
            out.push(p);
            continue;
        }
        for &w in &nb[*p.last().unwrap()] {
            if !p.contains(&w) {
                let mut q = p.clone();
                q.push(w);
                stack.push(q);
            }
        }
    }
    out
}

/// No two non-consecutive path vertices are adjacent.
pub fn has_no_chord(t: &Triangulation, p: &[VertexId]) -> bool {
    (0..p.len()).all(|i| (i + 2..p.len()).all(|j| !simple_neighbors(t, p[i]).contains(&p[j])))
}

/// Every `(plan, w(T))` for a path, enumerating fan selections against the
/// fans present when each entry is applied. Each result is also checked
/// against [`apply_modification`].
pub fn all_modifications(
    t: &Triangulation,
    gamma: &PathNeighborhood,
    params: &SurgeryParams,
) -> Vec<(ModificationPlan, Triangulation)> {
    fn rec(
        cur: &Triangulation,
        path: &[VertexId],
        todo: &[usize],
        entries: &mut Vec<PlanEntry>,
        k: usize,
        out: &mut Vec<(ModificationPlan, Triangulation)>,
    ) {
        let Some((&j, rest)) = todo.split_first() else {
            out.push((ModificationPlan { entries: entries.clone() }, cur.clone()));
            return;
        };
        let v = path[j];
        let d = cur.degree(v);
        for up in ordered_selection_list(d.up().unwrap(), k) {
            for down in ordered_selection_list(d.down().unwrap(), k) {
                let o = insert_pairs_tracked(cur, &Insertion { vertex: v, up: up.clone(), down: down.clone() })
                    .expect("selection within the current fans");
                let mapped: Vec<VertexId> = path.iter().map(|&x| o.vertex_map[x]).collect();
                entries.push(PlanEntry { path_index: j, up: up.clone(), down });
                rec(&o.triangulation, &mapped, rest, entries, k, out);
                entries.pop();
            }
        }
    }
    let mut out = Vec::new();
    let todo = gamma.qualifying(params.threshold);
    rec(t, gamma.path(), &todo, &mut Vec::new(), params.insert_count, &mut out);
    for (plan, t2) in &out {
        assert_eq!(&apply_modification(t, gamma, plan, params).unwrap(), t2);
    }
    out
}

/// Number of `(T, path, w)` with `w(T) = T'`, keyed by `T'` and the path's
/// degree sequence in `T`, over a class of forests and paths of `1..=n_max` edges.
pub fn overcount_tally(
    forests: &[Forest],
    n_max: usize,
    params: &SurgeryParams,
) -> HashMap<(Forest, Vec<usize>), u64> {
    let mut tally: HashMap<(Forest, Vec<usize>), u64> = HashMap::new();
    for f in forests {
        let t = Triangulation::from_forest(f);
        for n in 1..=n_max {
            for p in salg_paths(&t, n).unwrap() {
                let gamma = PathNeighborhood::from_path(&t, &p).unwrap();
                let degrees = gamma.degrees();
                for (_, t2) in all_modifications(&t, &gamma, params) {
                    *tally.entry((t2.forest().clone(), degrees.clone())).or_default() += 1;
                }
            }
        }
    }
    tally
}

/// `prod_j (k + 2)(d_j + k)`.
pub fn overcount_bound(degrees: &[usize], k: usize) -> f64 {
    degrees.iter().map(|&d| ((k + 2) * (d + k)) as f64).product()
}

/// Reconstruction fixture: a path whose last vertex is the only one of
/// degree at least `threshold` (and at most 12), chosen with the smallest
/// product of the other degrees among all such paths in the class.
pub fn reconstruction_fixture(forests: &[Forest], n: usize, threshold: usize) -> (Triangulation, Vec<VertexId>) {
    let mut best: Option<(usize, Triangulation, Vec<VertexId>)> = None;
    for f in forests {
        let t = Triangulation::from_forest(f);
        for p in salg_paths(&t, n).unwrap() {
            let g = PathNeighborhood::from_path(&t, &p).unwrap();
            let d = g.degrees();
            if g.qualifying(threshold) != vec![n] || d[n] > 12 {
                continue;
            }
            let cost: usize = d[..n].iter().product();
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, t.clone(), p));
            }
        }
    }
    let (_, t, p) = best.expect("class contains a fixture");
    (t, p)
}
