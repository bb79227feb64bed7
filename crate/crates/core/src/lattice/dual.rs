//! The dual graph: one vertex per triangle, one edge per interior primal edge.

use super::{EdgeId, EdgeKind, Triangulation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVertex {
    pub strip: usize,
    /// Angular position in `(0, 1)`, increasing to the right.
    pub angle: f64,
}

/// A dual edge crosses the primal edge `primal`. Walking it from `a` to `b`
/// crosses the seam (diagonal 0 of every strip) `winding` times, signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    pub primal: EdgeId,
    pub winding: i32,
}

impl DualEdge {
    pub fn other(&self, x: usize) -> usize {
        if self.a == x {
            self.b
        } else {
            self.a
        }
    }

    /// Seam crossings when walking the edge away from `from`.
    pub fn winding_from(&self, from: usize) -> i32 {
        if from == self.a {
            self.winding
        } else {
            -self.winding
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualGraph {
    vertices: Vec<DualVertex>,
    edges: Vec<DualEdge>,
    incident: Vec<Vec<usize>>,
}

impl DualGraph {
    /// Dual vertex ids are triangle ids of `t`. Horizontal edges on levels 0
    /// and `N` are boundary edges and have no dual.
    pub fn new(t: &Triangulation) -> Self {
        let vertices: Vec<DualVertex> = t
            .triangles()
            .iter()
            .map(|tri| DualVertex {
                strip: tri.strip,
                angle: (tri.index as f64 + 0.5) / t.strip(tri.strip).len() as f64,
            })
            .collect();
        let mut edges = Vec::new();
        for n in 0..t.levels() {
            let m = t.strip(n).len();
            for d in 0..m {
                edges.push(DualEdge {
                    a: t.triangle_id(n, (d + m - 1) % m),
                    b: t.triangle_id(n, d),
                    primal: t.diagonal_edge(n, d),
                    winding: i32::from(d == 0),
                });
            }
        }
        // each interior horizontal edge is the base of one up triangle above
        // and one down triangle below
        let mut sides: Vec<[Option<usize>; 2]> = vec![[None, None]; t.edges().len()];
        for (id, tri) in t.triangles().iter().enumerate() {
            let slot = &mut sides[tri.horizontal];
            if slot[0].is_none() {
                slot[0] = Some(id);
            } else {
                slot[1] = Some(id);
            }
        }
        for (e, edge) in t.edges().iter().enumerate() {
            if let EdgeKind::Horizontal { .. } = edge.kind {
                if let [Some(a), Some(b)] = sides[e] {
                    edges.push(DualEdge { a, b, primal: e, winding: 0 });
                }
            }
        }
        let mut incident = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incident[e.a].push(i);
            incident[e.b].push(i);
        }
        DualGraph { vertices, edges, incident }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[DualVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &DualEdge {
        &self.edges[e]
    }

    /// Dual edge ids incident to dual vertex `x`.
    pub fn incident(&self, x: usize) -> &[usize] {
        &self.incident[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.incident[x].len()
    }
}
