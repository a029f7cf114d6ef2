use serde::{Deserialize, Serialize};

use super::features::{PairExample, PairFeaturizer};
use super::mlp::{predict_features, MlpModel};
use super::sampling::SplitTriple;
use crate::data_model::Dataset;
use crate::error::Result;

/// Same-class probability of rows `i` and `j`, averaged over both orders,
/// and the decision `p > 0.5`. `x` must be normalized.
pub fn predict_pair(model: &MlpModel, x: &Dataset, i: usize, j: usize) -> Result<(f64, bool)> {
    let f = PairFeaturizer::new(x)?;
    Ok(predict_features(model, &f.features(i, j)))
}

/// Fraction of pairs decided correctly.
pub fn pair_accuracy(model: &MlpModel, pairs: &[PairExample]) -> f64 {
    let correct = pairs.iter().filter(|p| predict_features(model, &p.features).1 == (p.label == 1)).count();
    correct as f64 / pairs.len() as f64
}

/// Mean over problems of the better of "all same" and "all different" on that problem.
pub fn majority_baseline(pairs: &[PairExample]) -> f64 {
    let mut groups: Vec<(&str, usize, usize)> = Vec::new();
    for p in pairs {
        let slot = match groups.iter().position(|g| g.0 == p.dataset_id) {
            Some(i) => i,
            None => {
                groups.push((&p.dataset_id, 0, 0));
                groups.len() - 1
            }
        };
        groups[slot].1 += usize::from(p.label);
        groups[slot].2 += 1;
    }
    let per_problem = groups.iter().map(|&(_, same, total)| {
        let f = same as f64 / total as f64;
        f.max(1.0 - f)
    });
    per_problem.sum::<f64>() / groups.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsfEvaluation {
    pub acc_meta_it: f64,
    pub acc_meta_et: f64,
    pub acc_majority_it: f64,
    pub acc_majority_et: f64,
}

pub fn evaluate_bsf(model: &MlpModel, split: &SplitTriple) -> BsfEvaluation {
    BsfEvaluation {
        acc_meta_it: pair_accuracy(model, &split.meta_it),
        acc_meta_et: pair_accuracy(model, &split.meta_et),
        acc_majority_it: majority_baseline(&split.meta_it),
        acc_majority_et: majority_baseline(&split.meta_et),
    }
}
