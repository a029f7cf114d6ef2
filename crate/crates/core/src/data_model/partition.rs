use crate::error::{Error, Result};

/// Disjoint, non-empty parts over item indices `0..n_items`.
///
/// A partition need not cover every item and may have a single part; such
/// partitions are representable but not [valid](Partition::is_valid).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n_items: usize,
    parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n_items: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n_items];
        for (p, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidPartition(format!("part {p} is empty")));
            }
            for &i in part {
                if i >= n_items {
                    return Err(Error::InvalidPartition(format!("index {i} out of range 0..{n_items}")));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        Ok(Self { n_items, parts })
    }

    /// Build from a full cluster assignment; parts are ordered by cluster id and
    /// ids with no members are skipped.
    pub fn from_assignment(assignment: &[usize]) -> Self {
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut parts = vec![Vec::new(); k];
        for (i, &c) in assignment.iter().enumerate() {
            parts[c].push(i);
        }
        parts.retain(|p| !p.is_empty());
        Self { n_items: assignment.len(), parts }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn n_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn covers_all(&self) -> bool {
        self.parts.iter().map(Vec::len).sum::<usize>() == self.n_items
    }

    /// Covers every item and has at least two parts.
    pub fn is_valid(&self) -> bool {
        self.n_parts() >= 2 && self.covers_all()
    }

    pub fn is_valid_for(&self, n_items: usize) -> bool {
        self.n_items == n_items && self.is_valid()
    }

    /// Part index per item, `None` for uncovered items.
    pub fn membership(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.n_items];
        for (p, part) in self.parts.iter().enumerate() {
            for &i in part {
                m[i] = Some(p);
            }
        }
        m
    }

    /// Part index per item; errors if some item is uncovered.
    pub fn assignment(&self) -> Result<Vec<usize>> {
        self.membership()
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::InvalidPartition(format!("item {i} is not covered"))))
            .collect()
    }

    pub fn same_part(&self, i: usize, j: usize) -> bool {
        let m = self.membership();
        matches!((m[i], m[j]), (Some(a), Some(b)) if a == b)
    }

    /// Canonical form: parts sorted internally and ordered by smallest member.
    pub fn canonical(&self) -> Partition {
        let mut parts: Vec<Vec<usize>> = self
            .parts
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.sort_unstable();
                p
            })
            .collect();
        parts.sort_unstable_by_key(|p| p[0]);
        Partition { n_items: self.n_items, parts }
    }

    pub fn same_clustering(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }
}

/// One part per class id, in ascending class order.
pub fn labels_to_partition(labels: &[usize]) -> Result<Partition> {
    let p = Partition::from_assignment(labels);
    if p.n_parts() < 2 {
        return Err(Error::Label("need at least two distinct labels".into()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn labels_examples() {
        let p = labels_to_partition(&[0, 1, 0, 1]).unwrap();
        assert_eq!(p.parts(), &[vec![0, 2], vec![1, 3]]);
        let p = labels_to_partition(&[2, 0, 1]).unwrap();
        assert_eq!(p.parts(), &[vec![1], vec![2], vec![0]]);
        assert!(labels_to_partition(&[0, 0, 0]).is_err());
    }

    #[test]
    fn validity() {
        let one = Partition::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(!one.is_valid());
        let partial = Partition::new(3, vec![vec![0], vec![1]]).unwrap();
        assert!(!partial.is_valid());
        assert!(Partition::new(3, vec![vec![0], vec![2]]).unwrap().membership()[1].is_none());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(3, vec![vec![0], vec![]]).is_err());
        assert!(Partition::new(3, vec![vec![3]]).is_err());
    }

    proptest! {
        #[test]
        fn membership_agrees_with_labels(labels in proptest::collection::vec(0usize..4, 2..20)) {
            prop_assume!(labels.iter().any(|&l| l != labels[0]));
            let p = labels_to_partition(&labels).unwrap();
            prop_assert!(p.is_valid());
            for i in 0..labels.len() {
                for j in 0..labels.len() {
                    prop_assert_eq!(p.same_part(i, j), labels[i] == labels[j]);
                }
            }
        }
    }
}
