//! Learned same-cluster predictor for pairs of points.
//!
//! Pairs are drawn from many labeled datasets, described by both points'
//! coordinates and their dataset's covariance, and classified by a small
//! ReLU network trained with Adadelta.

mod eval;
mod features;
mod mlp;
mod sampling;

pub use eval::{evaluate_bsf, majority_baseline, pair_accuracy, predict_pair, BsfEvaluation};
pub use features::{build_pair_features, swap_blocks, write_pairs_csv, PairExample, PairFeaturizer, COV_LEN, FEATURE_LEN, PAD};
pub use mlp::{initial_model, predict_features, train_mlp, Adadelta, MlpModel, TrainConfig, LAYER_DIMS};
pub use sampling::{sample_pair_splits, PairSampling, SplitTriple};
