use rand::seq::SliceRandom;

use super::{Dataset, Partition, WeightedGraph};
use crate::error::{Error, Result};
use crate::seed;

/// A single unsupervised problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Points(Dataset),
    Graph(WeightedGraph),
}

impl Problem {
    pub fn n_items(&self) -> usize {
        match self {
            Problem::Points(d) => d.n(),
            Problem::Graph(g) => g.n_vertices(),
        }
    }

    pub fn as_dataset(&self) -> Option<&Dataset> {
        match self {
            Problem::Points(d) => Some(d),
            Problem::Graph(_) => None,
        }
    }

    /// The problem as a weighted graph (complete Euclidean graph for point data).
    pub fn to_graph(&self) -> WeightedGraph {
        match self {
            Problem::Points(d) => WeightedGraph::complete_from_points(d.points()),
            Problem::Graph(g) => g.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemEntry {
    pub id: String,
    pub problem: Problem,
    pub truth: Partition,
}

/// Ordered collection of labeled problems; all randomness derives from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaRepository {
    problems: Vec<ProblemEntry>,
    pub seed: u64,
}

impl MetaRepository {
    pub fn new(problems: Vec<ProblemEntry>, seed: u64) -> Result<Self> {
        for p in &problems {
            if !p.truth.is_valid_for(p.problem.n_items()) {
                return Err(Error::InvalidPartition(format!("ground truth of problem '{}' is not valid", p.id)));
            }
        }
        Ok(Self { problems, seed })
    }

    /// Labeled datasets become problems whose ground truth is the class partition.
    pub fn from_datasets(datasets: Vec<Dataset>, seed: u64) -> Result<Self> {
        let mut problems = Vec::with_capacity(datasets.len());
        for d in datasets {
            let labels = d
                .labels()
                .ok_or_else(|| Error::Label(format!("dataset '{}' has no labels", d.id)))?;
            let truth = super::labels_to_partition(labels)?;
            problems.push(ProblemEntry { id: d.id.clone(), problem: Problem::Points(d), truth });
        }
        Self::new(problems, seed)
    }

    pub fn problems(&self) -> &[ProblemEntry] {
        &self.problems
    }

    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn datasets(&self) -> impl Iterator<Item = &Dataset> + '_ {
        self.problems.iter().filter_map(|p| p.problem.as_dataset())
    }

    pub fn subset(&self, idx: &[usize]) -> MetaRepository {
        MetaRepository { problems: idx.iter().map(|&i| self.problems[i].clone()).collect(), seed: self.seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub repeat_index: u64,
    pub seed: u64,
}

/// Deterministic train/test split of `n` items; both index lists ascend.
///
/// The train side has `floor(n * f + 0.5)` items.
pub fn split_indices(n: usize, repo_seed: u64, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::InvalidArgument(format!("train fraction must lie in (0,1), got {f}")));
    }
    let n_train = (n as f64 * f + 0.5).floor() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::Infeasible(format!("split of {n} problems at fraction {f} leaves a side empty")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = seed::rng(seed::mix_path(repo_seed, &[spec.seed, spec.repeat_index]));
    idx.shuffle(&mut rng);
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_repository(repo: &MetaRepository, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    split_indices(repo.len(), repo.seed, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: f64, r: u64) -> SplitSpec {
        SplitSpec { train_fraction: f, repeat_index: r, seed: 11 }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let (a, b) = split_indices(10, 3, &spec(0.5, 0)).unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        assert_eq!(split_indices(10, 3, &spec(0.5, 0)).unwrap(), (a.clone(), b));
        let (tr, te) = split_indices(339, 3, &spec(0.7, 0)).unwrap();
        assert_eq!((tr.len(), te.len()), (237, 102));
        let (c, _) = split_indices(10, 3, &spec(0.5, 1)).unwrap();
        assert_eq!(c.len(), 5);
        assert_ne!(a, c);
    }

    #[test]
    fn split_is_a_partition_of_indices() {
        for r in 0..20 {
            let (tr, te) = split_indices(37, 9, &spec(0.3, r)).unwrap();
            let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..37).collect::<Vec<_>>());
        }
    }

    #[test]
    fn split_errors() {
        assert!(split_indices(10, 0, &spec(0.0, 0)).is_err());
        assert!(split_indices(10, 0, &spec(1.0, 0)).is_err());
        assert!(split_indices(2, 0, &spec(0.1, 0)).is_err());
        assert!(split_indices(2, 0, &spec(0.9, 0)).is_err());
    }
}
