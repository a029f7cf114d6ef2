use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::features::{PairExample, PairFeaturizer, PAD};
use crate::data_model::{normalize_dataset, Dataset};
use crate::error::{Error, Result};
use crate::seed::{self, mix_path, Rng};

/// Size limits for datasets that take part in pair sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSampling {
    pub max_rows: usize,
    pub max_cols: usize,
    /// Pairs drawn per dataset and per set.
    pub pair_cap: usize,
    pub seed: u64,
}

impl Default for PairSampling {
    fn default() -> Self {
        Self { max_rows: 1000, max_cols: PAD, pair_cap: 2500, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitTriple {
    /// Training pairs, each followed by its swapped copy.
    pub meta_train: Vec<PairExample>,
    /// Pairs from the held-out half of the training datasets.
    pub meta_it: Vec<PairExample>,
    /// Pairs from datasets that contributed no training data.
    pub meta_et: Vec<PairExample>,
    /// Ids of the datasets assigned to training.
    pub train_datasets: Vec<String>,
    pub test_datasets: Vec<String>,
}

const CATEGORY_RETRIES: usize = 100;

/// `cap` unordered pairs of distinct positions in `0..h`: without replacement
/// when there are at least `cap` of them, with replacement otherwise.
fn sample_positions(rng: &mut Rng, h: usize, cap: usize) -> Vec<(usize, usize)> {
    if h < 2 || cap == 0 {
        return Vec::new();
    }
    let universe = h * (h - 1) / 2;
    let decode = |mut t: usize| {
        // row a owns the h-1-a pairs (a, a+1..h)
        let mut a = 0;
        while t >= h - 1 - a {
            t -= h - 1 - a;
            a += 1;
        }
        (a, a + 1 + t)
    };
    if universe >= cap {
        sample(rng, universe, cap).into_iter().map(decode).collect()
    } else {
        (0..cap).map(|_| decode(rng.random_range(0..universe))).collect()
    }
}

fn pairs_from_rows(f: &PairFeaturizer<'_>, rows: &[usize], rng: &mut Rng, cap: usize) -> Result<Vec<PairExample>> {
    sample_positions(rng, rows.len(), cap).into_iter().map(|(a, b)| f.example(rows[a], rows[b])).collect()
}

/// Assign each qualifying dataset to training or testing by a fair coin,
/// then sample training, internal-test and external-test pairs.
pub fn sample_pair_splits(datasets: &[Dataset], cfg: &PairSampling) -> Result<SplitTriple> {
    let eligible: Vec<Dataset> = datasets
        .iter()
        .filter(|x| x.n() <= cfg.max_rows && x.d() <= cfg.max_cols.min(PAD) && x.labels().is_some())
        .map(normalize_dataset)
        .collect();
    if eligible.len() < 2 {
        return Err(Error::Infeasible(format!("need at least 2 eligible datasets, found {}", eligible.len())));
    }
    let mut coin = seed::rng(mix_path(cfg.seed, &[0]));
    let mut in_train = Vec::new();
    for attempt in 0..=CATEGORY_RETRIES {
        if attempt == CATEGORY_RETRIES {
            return Err(Error::Infeasible("could not draw two non-empty dataset categories".into()));
        }
        in_train = (0..eligible.len()).map(|_| coin.random_bool(0.5)).collect::<Vec<bool>>();
        if in_train.iter().any(|&t| t) && in_train.iter().any(|&t| !t) {
            break;
        }
    }

    let mut out = SplitTriple { meta_train: Vec::new(), meta_it: Vec::new(), meta_et: Vec::new(), train_datasets: Vec::new(), test_datasets: Vec::new() };
    for (idx, (x, &train)) in eligible.iter().zip(&in_train).enumerate() {
        let f = PairFeaturizer::new(x)?;
        let mut rng = seed::rng(mix_path(cfg.seed, &[1, idx as u64]));
        if train {
            let mut rows: Vec<usize> = (0..x.n()).collect();
            rows.shuffle(&mut rng);
            let half = (x.n() / 2).min(cfg.pair_cap);
            for p in pairs_from_rows(&f, &rows[..half], &mut rng, cfg.pair_cap)? {
                let s = p.swapped();
                out.meta_train.push(p);
                out.meta_train.push(s);
            }
            out.meta_it.extend(pairs_from_rows(&f, &rows[half..], &mut rng, cfg.pair_cap)?);
            out.train_datasets.push(x.id.clone());
        } else {
            let rows: Vec<usize> = (0..x.n()).collect();
            out.meta_et.extend(pairs_from_rows(&f, &rows, &mut rng, cfg.pair_cap)?);
            out.test_datasets.push(x.id.clone());
        }
    }
    Ok(out)
}
