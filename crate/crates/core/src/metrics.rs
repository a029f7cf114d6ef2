//! Clustering quality measures.
//!
//! The pairwise clustering loss counts ordered pairs of distinct items on
//! which two partitions disagree about co-membership; it is defined as 1 when
//! either partition is not a valid clustering of the items. The Rand index is
//! its complement, and the adjusted Rand index is the Hubert-Arabie chance
//! correction computed from the contingency table.

use crate::data_model::{Partition, PointMatrix};
use crate::error::{Error, Result};
use crate::numeric::dist;

/// Pair co-occurrence counts between two partitions of the same items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    /// Only items covered by both partitions are counted.
    pub fn new(y: &Partition, z: &Partition) -> Self {
        let zm = z.membership();
        let mut counts = vec![vec![0u64; z.n_parts()]; y.n_parts()];
        for (i, part) in y.parts().iter().enumerate() {
            for &item in part {
                if let Some(j) = zm.get(item).copied().flatten() {
                    counts[i][j] += 1;
                }
            }
        }
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..z.n_parts()).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let total = row_sums.iter().sum();
        Self { counts, row_sums, col_sums, total }
    }

    fn pairs(x: u64) -> u64 {
        x * x.saturating_sub(1) / 2
    }

    pub fn same_pairs_both(&self) -> u64 {
        self.counts.iter().flatten().map(|&c| Self::pairs(c)).sum()
    }

    pub fn same_pairs_rows(&self) -> u64 {
        self.row_sums.iter().map(|&c| Self::pairs(c)).sum()
    }

    pub fn same_pairs_cols(&self) -> u64 {
        self.col_sums.iter().map(|&c| Self::pairs(c)).sum()
    }

    /// Unordered pairs on which the two partitions disagree.
    pub fn disagreeing_pairs(&self) -> u64 {
        self.same_pairs_rows() + self.same_pairs_cols() - 2 * self.same_pairs_both()
    }
}

fn both_valid(n_items: usize, y: &Partition, z: &Partition) -> bool {
    y.is_valid_for(n_items) && z.is_valid_for(n_items)
}

fn require_valid(n_items: usize, y: &Partition, z: &Partition) -> Result<()> {
    if both_valid(n_items, y, z) {
        Ok(())
    } else {
        Err(Error::InvalidPartition(format!("partitions must be valid clusterings of {n_items} items")))
    }
}

/// Fraction of ordered distinct pairs with differing co-membership; 1 if either partition is invalid.
pub fn clustering_loss(n_items: usize, y: &Partition, z: &Partition) -> f64 {
    if !both_valid(n_items, y, z) {
        return 1.0;
    }
    let n = n_items as u64;
    let ordered_disagreements = 2 * ContingencyTable::new(y, z).disagreeing_pairs();
    ordered_disagreements as f64 / (n * (n - 1)) as f64
}

pub fn rand_index(n_items: usize, y: &Partition, z: &Partition) -> Result<f64> {
    require_valid(n_items, y, z)?;
    Ok(1.0 - clustering_loss(n_items, y, z))
}

pub fn adjusted_rand_index(n_items: usize, y: &Partition, z: &Partition) -> Result<f64> {
    require_valid(n_items, y, z)?;
    let t = ContingencyTable::new(y, z);
    Ok(ari_from_table(&t))
}

/// ARI from a contingency table. When the maximum and expected index
/// coincide, returns 1 for identical co-membership and 0 otherwise.
pub fn ari_from_table(t: &ContingencyTable) -> f64 {
    let n = t.total;
    let total_pairs = ContingencyTable::pairs(n) as f64;
    let index = t.same_pairs_both() as f64;
    let sa = t.same_pairs_rows() as f64;
    let sb = t.same_pairs_cols() as f64;
    let expected = if total_pairs > 0.0 { sa * sb / total_pairs } else { 0.0 };
    let max = 0.5 * (sa + sb);
    if max == expected {
        return if t.disagreeing_pairs() == 0 { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

/// ARI between a label vector and a full assignment of the same length.
pub fn ari_labels(truth: &[usize], pred: &[usize]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    let y = Partition::from_assignment(truth);
    let z = Partition::from_assignment(pred);
    adjusted_rand_index(truth.len(), &y, &z)
}

/// Condensed pairwise Euclidean distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(points: &PointMatrix) -> Self {
        let n = points.rows();
        let mut d = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                d.push(dist(points.row(i), points.row(j)));
            }
        }
        Self { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.d[i * (2 * self.n - i - 1) / 2 + (j - i - 1)],
            Greater => self.get(j, i),
        }
    }
}

/// Mean silhouette over all points, Euclidean distances.
pub fn silhouette_score(points: &PointMatrix, c: &Partition) -> Result<f64> {
    if c.n_items() != points.rows() {
        return Err(Error::DimensionMismatch { expected: points.rows(), got: c.n_items() });
    }
    silhouette_with_distances(&DistanceMatrix::new(points), c)
}

/// Silhouette from precomputed distances. Points in singleton clusters
/// contribute 0, as does a point with `a = b = 0`.
pub fn silhouette_with_distances(dm: &DistanceMatrix, c: &Partition) -> Result<f64> {
    if c.n_parts() < 2 {
        return Err(Error::InvalidPartition("silhouette needs at least 2 clusters".into()));
    }
    if !c.is_valid_for(dm.n()) {
        return Err(Error::InvalidPartition("silhouette needs a partition covering every point".into()));
    }
    let assign = c.assignment()?;
    let k = c.n_parts();
    let sizes: Vec<usize> = c.parts().iter().map(Vec::len).collect();
    let n = dm.n();
    let mut sums = vec![0.0; k];
    let mut total = 0.0;
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[assign[j]] += dm.get(i, j);
            }
        }
        let own = assign[i];
        if sizes[own] < 2 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&q| q != own)
            .map(|q| sums[q] / sizes[q] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, parts: &[&[usize]]) -> Partition {
        Partition::new(n, parts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn loss_examples() {
        let y = part(3, &[&[0, 1], &[2]]);
        let z = part(3, &[&[0], &[1, 2]]);
        assert_eq!(clustering_loss(3, &y, &y), 0.0);
        assert_eq!(clustering_loss(3, &y, &z), 4.0 / 6.0);
        let partial = part(3, &[&[0], &[1]]);
        assert_eq!(clustering_loss(3, &y, &partial), 1.0);
        let single = part(3, &[&[0, 1, 2]]);
        assert_eq!(clustering_loss(3, &y, &single), 1.0);
    }

    #[test]
    fn rand_index_example() {
        let y = part(4, &[&[0, 1], &[2, 3]]);
        let z = part(4, &[&[0, 1, 2], &[3]]);
        assert_eq!(rand_index(4, &y, &z).unwrap(), 0.5);
        assert!(rand_index(4, &y, &part(4, &[&[0, 1, 2, 3]])).is_err());
    }

    #[test]
    fn ari_examples() {
        let y = part(4, &[&[0, 1], &[2, 3]]);
        let z = part(4, &[&[0, 1, 2], &[3]]);
        let t = ContingencyTable::new(&y, &z);
        assert_eq!(t.counts, vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(adjusted_rand_index(4, &y, &z).unwrap(), 0.0);
        assert_eq!(adjusted_rand_index(4, &y, &y).unwrap(), 1.0);
        let singles = part(3, &[&[0], &[1], &[2]]);
        assert_eq!(adjusted_rand_index(3, &singles, &singles).unwrap(), 1.0);
        let other = part(3, &[&[0, 1], &[2]]);
        assert_eq!(adjusted_rand_index(3, &singles, &other).unwrap(), 0.0);
    }

    #[test]
    fn silhouette_examples() {
        let p = PointMatrix::from_rows(&[vec![0.0], vec![1.0], vec![10.0], vec![11.0]]).unwrap();
        let c = part(4, &[&[0, 1], &[2, 3]]);
        let expected = (2.0 * (9.5 / 10.5) + 2.0 * (8.5 / 9.5)) / 4.0;
        assert!((silhouette_score(&p, &c).unwrap() - expected).abs() < 1e-15);

        let singles = part(4, &[&[0], &[1], &[2], &[3]]);
        assert_eq!(silhouette_score(&p, &singles).unwrap(), 0.0);

        let dup = PointMatrix::from_rows(&[vec![0.0], vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        assert_eq!(silhouette_score(&dup, &c).unwrap(), 0.0);

        assert!(silhouette_score(&p, &part(4, &[&[0, 1, 2, 3]])).is_err());
    }

    #[test]
    fn distance_matrix_indexing() {
        let p = PointMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0], vec![7.0]]).unwrap();
        let dm = DistanceMatrix::new(&p);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(dm.get(i, j), (p.row(i)[0] - p.row(j)[0]).abs());
            }
        }
    }
}
