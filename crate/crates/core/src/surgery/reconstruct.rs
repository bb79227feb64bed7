//! Randomized inverse of a path modification.
//!
//! Starting from the root of a modified triangulation, the walk alternates a
//! contraction choice at each arrival with a uniform step to a neighbour.
//! At an arrival it either contracts a run of `k + 1` consecutive vertices
//! containing the current one (`k + 1` possible offsets) or leaves the vertex
//! alone. A single attempt reproduces a given `(T, path)` with probability at
//! least `prod_j 1 / ((k + 2)(d_j + k))`.

use rand::Rng;
use rayon::prelude::*;

use super::raw::{collapse_label, RawLt, RawVertex};
use super::SurgeryParams;
use crate::lattice::{Triangulation, VertexId};
use crate::rng::stream_rng;
use crate::stats::Estimate;

/// The pair a reconstruction is expected to recover.
#[derive(Debug, Clone, Copy)]
pub struct Reference<'a> {
    pub triangulation: &'a Triangulation,
    pub path: &'a [VertexId],
}

/// Outcome of one successful attempt.
#[derive(Debug, Clone)]
pub struct Recovered {
    pub triangulation: Triangulation,
    pub path: Vec<VertexId>,
    /// Per arrival `1..=n`: the run offset contracted, if any.
    pub contractions: Vec<Option<usize>>,
}

/// One attempt with `n` steps. Returns `None` when a drawn contraction is
/// impossible. With `target_triangles` set, attempts whose triangle count can
/// no longer reach the target stop early.
pub fn randomized_reconstruction<R: Rng + ?Sized>(
    t_prime: &Triangulation,
    n: usize,
    params: &SurgeryParams,
    target_triangles: Option<usize>,
    rng: &mut R,
) -> Option<Recovered> {
    let k = params.insert_count;
    let mut raw = RawLt::from_triangulation(t_prime);
    let mut walked: Vec<RawVertex> = vec![(0, 0)];
    let mut contractions = Vec::with_capacity(n);
    for j in 0..=n {
        if j > 0 {
            let choice = rng.gen_range(0..k + 2);
            if choice <= k {
                contract_run(&mut raw, &mut walked, choice, k)?;
                contractions.push(Some(choice));
            } else {
                contractions.push(None);
            }
            if let Some(target) = target_triangles {
                let f = raw.triangle_count();
                if f < target || f - target > 2 * k * (n - j) {
                    return None;
                }
            }
        }
        if j < n {
            let &(level, label) = walked.last().unwrap();
            let rot = raw.rotation(level, label);
            walked.push(rot[rng.gen_range(0..rot.len())]);
        }
    }
    let (triangulation, maps) = raw.to_triangulation();
    let path = walked.iter().map(|&(l, x)| triangulation.vertex_id(l, maps[l][x])).collect();
    Some(Recovered { triangulation, path, contractions })
}

/// Contracts the run of `k + 1` vertices at offset `s` to the left of the
/// current vertex into a single vertex.
fn contract_run(raw: &mut RawLt, walked: &mut [RawVertex], s: usize, k: usize) -> Option<()> {
    let &(level, label) = walked.last().unwrap();
    if level == 0 || level >= raw.levels() || raw.level_size(level) < k + 1 {
        return None;
    }
    let size = raw.level_size(level);
    let mut q = (label + size - s) % size;
    for _ in 0..k {
        let cur = raw.level_size(level);
        let (merged, _, _) = raw.collapse(level, q).ok()?;
        for v in walked.iter_mut().filter(|v| v.0 == level) {
            v.1 = collapse_label(cur, q, v.1);
        }
        q = merged;
    }
    Some(())
}

/// `prod_j 1 / ((k + 2)(d_j + k))` over the path degrees.
pub fn reconstruction_bound(degrees: &[usize], k: usize) -> f64 {
    degrees.iter().map(|&d| 1.0 / ((k + 2) as f64 * (d + k) as f64)).product()
}

const ATTEMPTS_PER_STREAM: usize = 4096;

/// Fraction of `attempts` independent reconstructions of `t_prime` that
/// return exactly the reference pair.
pub fn reconstruction_frequency(
    t_prime: &Triangulation,
    reference: Reference<'_>,
    params: &SurgeryParams,
    attempts: usize,
    seed: u64,
) -> Estimate {
    let n = reference.path.len() - 1;
    let target = reference.triangulation.triangle_count();
    let chunks = attempts.div_ceil(ATTEMPTS_PER_STREAM);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = ATTEMPTS_PER_STREAM.min(attempts - c * ATTEMPTS_PER_STREAM);
            (0..len)
                .filter(|_| {
                    randomized_reconstruction(t_prime, n, params, Some(target), &mut rng).is_some_and(|r| {
                        r.triangulation == *reference.triangulation && r.path == reference.path
                    })
                })
                .count()
        })
        .sum();
    Estimate::proportion(hits, attempts)
}
