//! The critical Geom(1/2) branching process.
//!
//! Under the critical measure the tree parametrization of a uniform infinite
//! Lorentzian triangulation is a Galton-Watson tree with offspring law
//! `p_k = (1/2)^(k+1)` conditioned to survive forever. This module holds the
//! exact laws of that process and the spine sampler for the conditioned tree.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::Forest;
use crate::scalar::Scalar;

/// The offspring law `p_k = (1/2)^(k+1)`, `k >= 0`. Its mean is exactly one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OffspringLaw;

impl OffspringLaw {
    pub fn pmf<T: Scalar>(&self, k: usize) -> T {
        offspring_pmf(k)
    }

    /// Offspring generating function `psi(s) = sum_k (1/2)^(k+1) s^k = 1/(2 - s)`.
    pub fn generating_function<T: Scalar>(&self, s: T) -> T {
        T::one() / (T::from_u64(2) - s)
    }

    pub fn mean<T: Scalar>(&self) -> T {
        T::one()
    }

    /// One Geom(1/2) draw: the number of heads before the first tail.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut k = 0;
        while rng.gen::<bool>() {
            k += 1;
        }
        k
    }

    /// One draw from the size-biased law `k p_k`, `k >= 1`.
    ///
    /// `k p_k = (k) (1/2)^(k+1)` is the law of `1 + G + G'` for two independent
    /// Geom(1/2) variables.
    pub fn sample_size_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        1 + self.sample(rng) + self.sample(rng)
    }
}

/// `P(offspring = k) = (1/2)^(k+1)`.
pub fn offspring_pmf<T: Scalar>(k: usize) -> T {
    T::half().powu(k as u64 + 1)
}

/// Generating function of the generation size `xi_n` started from one particle:
/// `psi_n(s) = (n - (n-1) s) / (n + 1 - n s)`.
pub fn psi_n<T: Scalar>(n: usize, s: T) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("psi_n needs n >= 1".into()));
    }
    if s < T::zero() || s > T::one() {
        return Err(Error::InvalidArgument(format!("psi_n argument {s:?} outside [0, 1]")));
    }
    let n = T::from_u64(n as u64);
    let num = n.clone() - (n.clone() - T::one()) * s.clone();
    let den = n.clone() + T::one() - n * s;
    Ok(num / den)
}

/// Law of the level size `k_n` under the critical measure.
///
/// This is the coefficient of `s^k` in `phi_n(s) = s psi_n'(s) = s / (1 + n - n s)^2`,
/// i.e. `k n^(k-1) / (n+1)^(k+1)`, which also equals `k P(xi_n = k)`. The
/// often-quoted form with `(n+1)^k` in the denominator does not sum to one.
pub fn level_size_pmf<T: Scalar>(n: usize, k: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("level_size_pmf needs n >= 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("the conditioned process never has k_n = 0".into()));
    }
    let n1 = T::from_u64(n as u64 + 1);
    let ratio = T::from_u64(n as u64) / n1.clone();
    Ok(T::from_u64(k as u64) * ratio.powu(k as u64 - 1) / (n1.clone() * n1))
}

/// Size-biased offspring law `k (1/2)^(k+1)`, `k >= 1`.
pub fn size_biased_pmf<T: Scalar>(k: usize) -> Result<T> {
    if k == 0 {
        return Err(Error::InvalidArgument("size-biased law has no mass at 0".into()));
    }
    Ok(T::from_u64(k as u64) * offspring_pmf::<T>(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    pub out_degree: usize,
    /// Absolute level of the node.
    pub height: usize,
}

/// A finite planar tree stored in depth-first preorder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    nodes: Vec<TreeNode>,
}

impl FiniteTree {
    /// Builds a tree from per-generation out-degree lists (generation `g`
    /// lives at absolute height `root_height + g`). Children of a generation
    /// are listed left to right, grouped by parent.
    pub fn from_generations(root_height: usize, generations: &[Vec<usize>]) -> Result<Self> {
        if generations.first().map(Vec::len) != Some(1) {
            return Err(Error::InvalidForest("a tree has exactly one root".into()));
        }
        for g in 0..generations.len() {
            let children: usize = generations[g].iter().sum();
            let next = generations.get(g + 1).map_or(0, Vec::len);
            if children != next {
                return Err(Error::InvalidForest(format!(
                    "generation {g} has {children} children but generation {} has {next} nodes",
                    g + 1
                )));
            }
        }
        // first child index of every node, per generation
        let starts: Vec<Vec<usize>> = generations
            .iter()
            .map(|gen| {
                gen.iter()
                    .scan(0, |acc, &d| {
                        let s = *acc;
                        *acc += d;
                        Some(s)
                    })
                    .collect()
            })
            .collect();
        let mut nodes = Vec::with_capacity(generations.iter().map(Vec::len).sum());
        let mut stack = vec![(0usize, 0usize)];
        while let Some((g, i)) = stack.pop() {
            let d = generations[g][i];
            nodes.push(TreeNode { out_degree: d, height: root_height + g });
            let first = starts[g][i];
            for c in (first..first + d).rev() {
                stack.push((g + 1, c));
            }
        }
        Ok(FiniteTree { nodes })
    }

    /// Single node at `height` with no children.
    pub fn leaf(height: usize) -> Self {
        FiniteTree { nodes: vec![TreeNode { out_degree: 0, height }] }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root_height(&self) -> usize {
        self.nodes[0].height
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest absolute level occupied by a node.
    pub fn max_height(&self) -> usize {
        self.nodes.iter().map(|n| n.height).max().unwrap_or(0)
    }

    /// Number of nodes at absolute level `h`.
    pub fn width_at(&self, h: usize) -> usize {
        self.nodes.iter().filter(|n| n.height == h).count()
    }
}

/// Unconditioned Geom(1/2) Galton-Watson tree rooted at height 0, grown
/// generation by generation and cut at `height_cap` (nodes at the cap get no
/// children).
pub fn sample_gw_tree<R: Rng + ?Sized>(rng: &mut R, height_cap: usize) -> FiniteTree {
    sample_gw_subtree(rng, 0, height_cap)
}

/// Like [`sample_gw_tree`], with the root at absolute height `root_height` and
/// the cut at absolute height `height_cap`.
pub fn sample_gw_subtree<R: Rng + ?Sized>(
    rng: &mut R,
    root_height: usize,
    height_cap: usize,
) -> FiniteTree {
    let law = OffspringLaw;
    let mut generations: Vec<Vec<usize>> = Vec::new();
    let mut width = 1;
    let mut h = root_height;
    while width > 0 {
        let gen: Vec<usize> = if h >= height_cap {
            vec![0; width]
        } else {
            (0..width).map(|_| law.sample(rng)).collect()
        };
        width = gen.iter().sum();
        generations.push(gen);
        h += 1;
    }
    FiniteTree::from_generations(root_height, &generations)
        .expect("generations are consistent by construction")
}

/// Subtrees hanging off one spine vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpineVertex {
    /// Trees rooted at the children left of the spine child.
    pub left: Vec<FiniteTree>,
    /// Trees rooted at the children right of the spine child.
    pub right: Vec<FiniteTree>,
}

impl SpineVertex {
    pub fn offspring(&self) -> usize {
        self.left.len() + 1 + self.right.len()
    }
}

/// The critical tree conditioned to survive, projected onto levels `0..=N`:
/// one spine vertex per level and a pair of finite tree lists per spine vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpineForest {
    spine: Vec<SpineVertex>,
}

impl SpineForest {
    pub fn new(spine: Vec<SpineVertex>) -> Result<Self> {
        if spine.is_empty() {
            return Err(Error::InvalidArgument("spine forest needs N >= 1".into()));
        }
        let n = spine.len();
        for (i, sv) in spine.iter().enumerate() {
            for t in sv.left.iter().chain(&sv.right) {
                if t.root_height() != i + 1 || t.max_height() > n {
                    return Err(Error::InvalidForest(format!(
                        "subtree at spine level {i} must start at level {} and stay below {n}",
                        i + 1
                    )));
                }
                if t.nodes().iter().any(|x| x.height == n && x.out_degree != 0) {
                    return Err(Error::InvalidForest("subtree not truncated at level N".into()));
                }
            }
        }
        Ok(SpineForest { spine })
    }

    /// Number of levels above the root (`N`).
    pub fn levels(&self) -> usize {
        self.spine.len()
    }

    /// Subtree pairs for spine vertices `v_0 .. v_{N-1}`.
    pub fn spine(&self) -> &[SpineVertex] {
        &self.spine
    }

    /// Flattens to per-level out-degree lists in planar (left to right) order.
    pub fn forest(&self) -> Forest {
        self.flatten().0
    }

    /// Position of the spine vertex within each level `0..=N`.
    pub fn spine_positions(&self) -> Vec<usize> {
        self.flatten().1
    }

    fn flatten(&self) -> (Forest, Vec<usize>) {
        enum Visit<'a> {
            Spine(usize),
            Tree(&'a FiniteTree),
        }
        let n = self.levels();
        let mut degrees: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut top = 0usize;
        let mut spine_pos = vec![0usize; n + 1];
        let mut stack = vec![Visit::Spine(0)];
        while let Some(item) = stack.pop() {
            match item {
                Visit::Spine(i) if i == n => {
                    spine_pos[n] = top;
                    top += 1;
                }
                Visit::Spine(i) => {
                    let sv = &self.spine[i];
                    spine_pos[i] = degrees[i].len();
                    degrees[i].push(sv.offspring());
                    for t in sv.right.iter().rev() {
                        stack.push(Visit::Tree(t));
                    }
                    stack.push(Visit::Spine(i + 1));
                    for t in sv.left.iter().rev() {
                        stack.push(Visit::Tree(t));
                    }
                }
                Visit::Tree(t) => {
                    for node in t.nodes() {
                        if node.height == n {
                            top += 1;
                        } else {
                            degrees[node.height].push(node.out_degree);
                        }
                    }
                }
            }
        }
        let forest = Forest::new(degrees).expect("spine forest flattens to a valid forest");
        (forest, spine_pos)
    }
}

/// Samples the conditioned critical tree up to level `n` (Kesten's spine
/// construction): size-biased offspring on the spine, the spine child uniform
/// among them, independent unconditioned trees elsewhere, all cut at level `n`.
pub fn sample_spine_forest<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SpineForest> {
    sample_spine_forest_with(rng, n, |r| OffspringLaw.sample_size_biased(r))
}

/// [`sample_spine_forest`] with a caller-supplied spine offspring draw.
pub fn sample_spine_forest_with<R, F>(rng: &mut R, n: usize, mut spine_offspring: F) -> Result<SpineForest>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> usize,
{
    if n == 0 {
        return Err(Error::InvalidArgument("spine forest needs N >= 1".into()));
    }
    let mut spine = Vec::with_capacity(n);
    for i in 0..n {
        let k = spine_offspring(rng);
        if k == 0 {
            return Err(Error::InvalidArgument("spine vertex must have a child".into()));
        }
        let pos = rng.gen_range(0..k);
        let left = (0..pos).map(|_| sample_gw_subtree(rng, i + 1, n)).collect();
        let right = (pos + 1..k).map(|_| sample_gw_subtree(rng, i + 1, n)).collect();
        spine.push(SpineVertex { left, right });
    }
    SpineForest::new(spine)
}
