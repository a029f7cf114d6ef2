use serde::{Deserialize, Serialize};

use super::ClusterResult;
use crate::data_model::PointMatrix;
use crate::error::{Error, Result};
use crate::numeric::{dist, sq_dist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Complete,
    Average,
    /// Lance-Williams Ward update on squared Euclidean distances.
    Ward,
}

impl Linkage {
    /// Lance-Williams update of the distance between `k` and the union of `i` and `j`.
    #[inline]
    fn update(self, dki: f64, dkj: f64, dij: f64, ni: f64, nj: f64, nk: f64) -> f64 {
        match self {
            Linkage::Single => dki.min(dkj),
            Linkage::Complete => dki.max(dkj),
            Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
            Linkage::Ward => ((ni + nk) * dki + (nj + nk) * dkj - nk * dij) / (ni + nj + nk),
        }
    }
}

/// Greedy merging from singletons until `k` clusters remain.
///
/// Clusters live in the slot of their lowest original point; the closest
/// pair is found by scanning slots in order, so ties merge the lowest pair.
pub fn agglomerative(points: &PointMatrix, k: usize, linkage: Linkage) -> Result<ClusterResult> {
    let n = points.rows();
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = match linkage {
                Linkage::Ward => sq_dist(points.row(i), points.row(j)),
                _ => dist(points.row(i), points.row(j)),
            };
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut owner: Vec<usize> = (0..n).collect();

    // nearest active neighbour (with higher slot) per slot
    let nearest_of = |d: &[f64], active: &[usize], pos: usize| -> (usize, f64) {
        let i = active[pos];
        let mut best = (usize::MAX, f64::INFINITY);
        for &j in &active[pos + 1..] {
            if d[i * n + j] < best.1 {
                best = (j, d[i * n + j]);
            }
        }
        best
    };
    let mut nn: Vec<(usize, f64)> = vec![(usize::MAX, f64::INFINITY); n];
    for pos in 0..active.len() {
        nn[active[pos]] = nearest_of(&d, &active, pos);
    }

    while active.len() > k {
        let mut bi = usize::MAX;
        let mut best = f64::INFINITY;
        for &i in &active {
            if nn[i].1 < best {
                best = nn[i].1;
                bi = i;
            }
        }
        let (i, j) = (bi, nn[bi].0);
        let dij = d[i * n + j];
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for &m in &active {
            if m == i || m == j {
                continue;
            }
            let v = linkage.update(d[m * n + i], d[m * n + j], dij, ni, nj, size[m] as f64);
            d[m * n + i] = v;
            d[i * n + m] = v;
        }
        size[i] += size[j];
        for o in owner.iter_mut() {
            if *o == j {
                *o = i;
            }
        }
        active.retain(|&m| m != j);
        // refresh caches that referenced i or j, or that could now see a closer i
        for pos in 0..active.len() {
            let m = active[pos];
            if m == i || nn[m].0 == i || nn[m].0 == j {
                nn[m] = nearest_of(&d, &active, pos);
            } else if m < i && d[m * n + i] < nn[m].1 {
                nn[m] = (i, d[m * n + i]);
            } else if m < i && d[m * n + i] == nn[m].1 && i < nn[m].0 {
                nn[m] = (i, d[m * n + i]);
            }
        }
    }

    let mut slot_label = vec![usize::MAX; n];
    let mut next = 0;
    let assignment: Vec<usize> = owner
        .iter()
        .map(|&o| {
            if slot_label[o] == usize::MAX {
                slot_label[o] = next;
                next += 1;
            }
            slot_label[o]
        })
        .collect();
    Ok(ClusterResult::from_assignment(points, &assignment, false))
}
