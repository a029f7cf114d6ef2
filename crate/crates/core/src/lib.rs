//! Meta-unsupervised learning.
//!
//! Labeled classification problems are treated as training examples for
//! unsupervised decisions: which clustering algorithm to run, how many
//! clusters to produce, what fraction of outliers to discard, and a learned
//! same-cluster predictor for pairs of points.
//!
//! Module map:
//! - [`data_model`]: datasets, partitions, weighted graphs, repositories, file formats
//! - [`metrics`]: pairwise clustering loss, Rand index, ARI, silhouette
//! - [`clusterers`]: k-means, agglomerative linkage, threshold single linkage, outlier removal
//! - [`regression`]: least squares and the problem/clustering meta-features
//! - [`erm_meta`]: empirical risk minimization over algorithm families and threshold fitting
//! - [`meta_pipelines`]: algorithm selection, choosing k, choosing the outlier fraction
//! - [`similarity_net`]: pairwise same-cluster network
//! - [`cli`]: command-line front end

pub mod cli;
pub mod clusterers;
pub mod data_model;
pub mod erm_meta;
pub mod error;
pub mod meta_pipelines;
pub mod metrics;
pub mod numeric;
pub mod regression;
pub mod seed;
pub mod similarity_net;
pub mod union_find;

pub use error::{Error, Result};
