//! Datasets, partitions, weighted graphs and the meta-repository.

mod dataset;
mod graph;
pub mod io;
mod partition;
mod repository;
pub mod synth;

pub use dataset::{normalize_dataset, normalize_points, Dataset, PointMatrix};
pub use graph::WeightedGraph;
pub use partition::{labels_to_partition, Partition};
pub use repository::{split_repository, split_indices, MetaRepository, Problem, ProblemEntry, SplitSpec};
