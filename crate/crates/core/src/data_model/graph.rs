use std::collections::HashSet;

use super::PointMatrix;
use crate::error::{Error, Result};
use crate::numeric::dist;

/// Undirected graph with non-negative finite edge weights.
///
/// Edges are stored as `(u, v, w)` with `u < v`; absent pairs have no edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range 0..{n_vertices}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) has weight {w}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a},{b})")));
            }
            out.push((a, b, w));
        }
        Ok(Self { n_vertices, edges: out })
    }

    /// Complete graph of Euclidean distances between rows.
    pub fn complete_from_points(points: &PointMatrix) -> Self {
        let n = points.rows();
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, dist(points.row(u), points.row(v))));
            }
        }
        Self { n_vertices: n, edges }
    }

    /// Complete graph from a weight function on vertex pairs `u < v`.
    pub fn complete_from_fn(n: usize, mut w: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, w(u, v)));
            }
        }
        Self::new(n, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n_vertices * self.n_vertices.saturating_sub(1) / 2
    }

    /// Every weight multiplied by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {alpha}")));
        }
        Ok(Self {
            n_vertices: self.n_vertices,
            edges: self.edges.iter().map(|&(u, v, w)| (u, v, w * alpha)).collect(),
        })
    }

    /// Replace every weight by `f(u, v, w)`.
    pub fn map_weights(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        Self::new(self.n_vertices, self.edges.iter().map(|&(u, v, w)| (u, v, f(u, v, w))).collect())
    }
}
