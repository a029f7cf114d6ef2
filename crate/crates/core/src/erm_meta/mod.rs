//! Empirical risk minimization over unsupervised algorithms.
//!
//! Training examples are whole labeled problems. A family of clustering
//! algorithms is scored by its mean pairwise clustering loss over the
//! training problems, and the minimizer is returned together with the
//! finite-family generalization bound that accompanies it.

mod bound;
mod family;
mod meta_scale;
mod threshold_fit;

pub use bound::{generalization_bound, BoundParams, FamilySize};
pub use family::{erm_select, loss_matrix, AlgorithmFamily, ErmOutcome, FnAlgorithm, ThresholdRule, UnsupervisedAlgorithm};
pub use meta_scale::{fit_meta_scale, MetaScaleRule};
pub use threshold_fit::{fit_threshold_bruteforce, fit_threshold_kruskal, write_profile_csv, ThresholdFitResult};
