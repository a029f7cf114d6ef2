use serde::{Deserialize, Serialize};

use super::family::UnsupervisedAlgorithm;
use crate::clusterers::single_linkage_threshold;
use crate::data_model::{Partition, Problem, WeightedGraph};
use crate::error::{Error, Result};

/// Threshold learned from the closest cross-cluster pair seen in training.
/// Clusters are the components of edges strictly shorter than `r_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaScaleRule {
    pub r_star: f64,
}

impl MetaScaleRule {
    pub fn cluster_graph(&self, g: &WeightedGraph) -> Partition {
        single_linkage_threshold(g, self.r_star, true)
    }
}

impl UnsupervisedAlgorithm for MetaScaleRule {
    fn name(&self) -> String {
        format!("meta-scale<{}", self.r_star)
    }

    fn cluster(&self, problem: &Problem) -> Result<Partition> {
        Ok(match problem {
            Problem::Graph(g) => self.cluster_graph(g),
            Problem::Points(_) => self.cluster_graph(&problem.to_graph()),
        })
    }
}

pub fn fit_meta_scale(train: &[(WeightedGraph, Partition)]) -> Result<MetaScaleRule> {
    let mut r_star = f64::INFINITY;
    for (i, (g, y)) in train.iter().enumerate() {
        if !g.is_complete() {
            return Err(Error::InvalidGraph(format!("training graph {i} is not complete")));
        }
        if !y.is_valid_for(g.n_vertices()) {
            return Err(Error::InvalidPartition(format!("truth of training graph {i} is not a valid clustering")));
        }
        for &(u, v, w) in g.edges() {
            if !y.same_part(u, v) && w < r_star {
                r_star = w;
            }
        }
    }
    if r_star.is_infinite() {
        return Err(Error::Infeasible("no cross-cluster pair in the training set".into()));
    }
    Ok(MetaScaleRule { r_star })
}
