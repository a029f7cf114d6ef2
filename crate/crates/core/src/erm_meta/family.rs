use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::clusterers::{single_linkage_threshold, ClustererSpec};
use crate::data_model::{Partition, Problem, ProblemEntry};
use crate::error::{Error, Result};
use crate::metrics::clustering_loss;

/// Anything that maps a problem to a clustering of its items.
pub trait UnsupervisedAlgorithm: Send + Sync {
    fn name(&self) -> String;
    fn cluster(&self, problem: &Problem) -> Result<Partition>;
}

impl UnsupervisedAlgorithm for ClustererSpec {
    fn name(&self) -> String {
        ClustererSpec::name(self)
    }

    fn cluster(&self, problem: &Problem) -> Result<Partition> {
        match problem {
            Problem::Points(d) => Ok(ClustererSpec::cluster(self, d.points())?.partition),
            Problem::Graph(_) => Err(Error::InvalidArgument(format!("{} needs point data", self.name()))),
        }
    }
}

/// Single linkage at a fixed threshold; point data is viewed as its complete distance graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRule {
    pub r: f64,
    pub strict: bool,
}

impl UnsupervisedAlgorithm for ThresholdRule {
    fn name(&self) -> String {
        format!("threshold{}{}", if self.strict { "<" } else { "<=" }, self.r)
    }

    fn cluster(&self, problem: &Problem) -> Result<Partition> {
        Ok(match problem {
            Problem::Graph(g) => single_linkage_threshold(g, self.r, self.strict),
            Problem::Points(_) => single_linkage_threshold(&problem.to_graph(), self.r, self.strict),
        })
    }
}

type ClusterFn = dyn Fn(&Problem) -> Result<Partition> + Send + Sync;

/// An algorithm given by a closure.
pub struct FnAlgorithm {
    name: String,
    f: Box<ClusterFn>,
}

impl FnAlgorithm {
    pub fn new(name: impl Into<String>, f: impl Fn(&Problem) -> Result<Partition> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Box::new(f) }
    }
}

impl fmt::Debug for FnAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnAlgorithm").field("name", &self.name).finish()
    }
}

impl UnsupervisedAlgorithm for FnAlgorithm {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn cluster(&self, problem: &Problem) -> Result<Partition> {
        (self.f)(problem)
    }
}

/// Non-empty ordered family with unique member names.
pub struct AlgorithmFamily {
    members: Vec<Box<dyn UnsupervisedAlgorithm>>,
}

impl AlgorithmFamily {
    pub fn new(members: Vec<Box<dyn UnsupervisedAlgorithm>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("algorithm family must be non-empty".into()));
        }
        let mut names = HashSet::new();
        for m in &members {
            if !names.insert(m.name()) {
                return Err(Error::InvalidArgument(format!("duplicate member name '{}'", m.name())));
            }
        }
        Ok(Self { members })
    }

    pub fn from_specs(specs: Vec<ClustererSpec>) -> Result<Self> {
        Self::new(specs.into_iter().map(|s| Box::new(s) as Box<dyn UnsupervisedAlgorithm>).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &dyn UnsupervisedAlgorithm {
        self.members[i].as_ref()
    }

    pub fn names(&self) -> Vec<String> {
        self.members.iter().map(|m| m.name()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErmOutcome {
    pub best: usize,
    pub best_name: String,
    /// Mean training loss per member, in family order.
    pub losses: Vec<f64>,
}

/// Loss of every member on every problem (`[member][problem]`); a member
/// that fails on a problem is charged loss 1 there.
pub fn loss_matrix(family: &AlgorithmFamily, train: &[ProblemEntry]) -> Vec<Vec<f64>> {
    family
        .members
        .par_iter()
        .map(|m| {
            train
                .par_iter()
                .map(|p| match m.cluster(&p.problem) {
                    Ok(z) => clustering_loss(p.problem.n_items(), &p.truth, &z),
                    Err(_) => 1.0,
                })
                .collect()
        })
        .collect()
}

/// Member with the lowest mean training loss; ties go to the earliest member.
pub fn erm_select(family: &AlgorithmFamily, train: &[ProblemEntry]) -> Result<ErmOutcome> {
    if train.is_empty() {
        return Err(Error::InvalidArgument("ERM needs a non-empty training set".into()));
    }
    let n = train.len() as f64;
    let losses: Vec<f64> = loss_matrix(family, train).iter().map(|row| row.iter().sum::<f64>() / n).collect();
    let best = argmin_first(&losses);
    Ok(ErmOutcome { best, best_name: family.member(best).name(), losses })
}

pub(crate) fn argmin_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}
