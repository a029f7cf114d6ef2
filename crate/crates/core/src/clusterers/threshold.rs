use crate::data_model::{Partition, WeightedGraph};
use crate::union_find::UnionFind;

/// Connected components of the edges with weight `<= r` (or `< r` when `strict`).
///
/// Parts are ordered by their lowest vertex. The result may have a single
/// part, which is not a valid clustering.
pub fn single_linkage_threshold(g: &WeightedGraph, r: f64, strict: bool) -> Partition {
    let mut uf = UnionFind::new(g.n_vertices());
    for &(u, v, w) in g.edges() {
        if if strict { w < r } else { w <= r } {
            uf.union(u, v);
        }
    }
    Partition::from_assignment(&uf.labels())
}
