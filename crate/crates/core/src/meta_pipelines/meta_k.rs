use serde::{Deserialize, Serialize};

use super::runs::{argmax_record, baseline_record, best_fit_k, DatasetRuns, RunRecord};
use crate::error::{Error, Result};
use crate::regression::{fit_least_squares, LinearModel};

/// One silhouette-to-ARI regression per k in `k_min..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaKModel {
    pub k_min: usize,
    pub models: Vec<LinearModel>,
}

impl MetaKModel {
    pub fn k_max(&self) -> usize {
        self.k_min + self.models.len() - 1
    }

    pub fn model_for(&self, k: usize) -> Result<&LinearModel> {
        k.checked_sub(self.k_min)
            .and_then(|i| self.models.get(i))
            .ok_or_else(|| Error::InvalidArgument(format!("no model for k = {k}")))
    }

    /// Every per-k model predicts the silhouette itself.
    pub fn identity(k_min: usize, k_max: usize) -> Self {
        Self { k_min, models: vec![LinearModel { weights: vec![1.0], intercept: 0.0 }; k_max + 1 - k_min] }
    }

    pub fn predict_record(&self, r: &RunRecord) -> Result<f64> {
        self.model_for(r.k)?.predict(&[r.silhouette])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        if m.models.is_empty() || m.k_min < 2 || m.models.iter().any(|l| l.weights.len() != 1) {
            return Err(Error::InvalidArgument("malformed meta-k model".into()));
        }
        Ok(m)
    }
}

/// Least-squares fit of ARI on silhouette, pooled over all training runs, separately per k.
pub fn train_meta_k<'a>(records: impl IntoIterator<Item = &'a RunRecord>, k_min: usize, k_max: usize) -> Result<MetaKModel> {
    if k_min < 2 || k_min > k_max {
        return Err(Error::InvalidArgument(format!("bad k range {k_min}..={k_max}")));
    }
    let width = k_max - k_min + 1;
    let mut xs: Vec<Vec<Vec<f64>>> = vec![Vec::new(); width];
    let mut ys: Vec<Vec<f64>> = vec![Vec::new(); width];
    for r in records {
        if r.k < k_min || r.k > k_max {
            continue;
        }
        let Some(ari) = r.ari else {
            return Err(Error::InvalidArgument(format!("training record of {} has no ARI", r.dataset_id)));
        };
        xs[r.k - k_min].push(vec![r.silhouette]);
        ys[r.k - k_min].push(ari);
    }
    let mut models = Vec::with_capacity(width);
    for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
        if x.is_empty() {
            return Err(Error::InvalidArgument(format!("no training records for k = {}", k_min + i)));
        }
        models.push(fit_least_squares(x, y)?);
    }
    Ok(MetaKModel { k_min, models })
}

/// Record chosen by the model: each k is scored by its best predicted run.
pub fn meta_k_record(model: &MetaKModel, records: &[RunRecord]) -> Result<usize> {
    argmax_record(records, |r| model.predict_record(r))
}

/// Predicted number of clusters; ties go to the smallest k.
pub fn predict_k(model: &MetaKModel, records: &[RunRecord]) -> Result<usize> {
    Ok(records[meta_k_record(model, records)?].k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaKDatasetOutcome {
    pub dataset_id: String,
    pub k_star: usize,
    pub k_hat: usize,
    pub k_tilde: usize,
    pub ari_meta: f64,
    pub ari_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaKEvaluation {
    pub rmse_meta: f64,
    pub rmse_baseline: f64,
    pub ari_meta: f64,
    pub ari_baseline: f64,
    pub per_dataset: Vec<MetaKDatasetOutcome>,
}

fn rmse(pairs: impl Iterator<Item = (usize, usize)>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for (a, b) in pairs {
        let d = a as f64 - b as f64;
        s += d * d;
        n += 1;
    }
    (s / n as f64).sqrt()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for x in v {
        s += x;
        n += 1;
    }
    s / n as f64
}

/// Error of the predicted and silhouette-argmax k against the best-fit k,
/// and the mean ARI of the clustering each rule picks.
pub fn evaluate_meta_k(model: &MetaKModel, test: &[DatasetRuns]) -> Result<MetaKEvaluation> {
    if test.is_empty() {
        return Err(Error::InvalidArgument("empty test set".into()));
    }
    let per_dataset = test
        .iter()
        .map(|d| {
            let meta = &d.records[meta_k_record(model, &d.records)?];
            let base = &d.records[baseline_record(&d.records)?];
            Ok(MetaKDatasetOutcome {
                dataset_id: d.dataset_id.clone(),
                k_star: best_fit_k(&d.records)?,
                k_hat: meta.k,
                k_tilde: base.k,
                ari_meta: meta.ari.unwrap_or(f64::NAN),
                ari_baseline: base.ari.unwrap_or(f64::NAN),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetaKEvaluation {
        rmse_meta: rmse(per_dataset.iter().map(|o| (o.k_hat, o.k_star))),
        rmse_baseline: rmse(per_dataset.iter().map(|o| (o.k_tilde, o.k_star))),
        ari_meta: mean(per_dataset.iter().map(|o| o.ari_meta)),
        ari_baseline: mean(per_dataset.iter().map(|o| o.ari_baseline)),
        per_dataset,
    })
}

/// Train on the datasets at `train` and evaluate on those at `test`.
pub fn meta_k_on_split(runs: &[DatasetRuns], train: &[usize], test: &[usize], k_min: usize, k_max: usize) -> Result<(MetaKModel, MetaKEvaluation)> {
    let model = train_meta_k(train.iter().flat_map(|&i| &runs[i].records), k_min, k_max)?;
    let test_runs: Vec<DatasetRuns> = test.iter().map(|&i| runs[i].clone()).collect();
    let eval = evaluate_meta_k(&model, &test_runs)?;
    Ok((model, eval))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::Partition;

    fn rec(k: usize, run: usize, silhouette: f64, ari: f64) -> RunRecord {
        RunRecord { dataset_id: "t".into(), k, run, silhouette, ari: Some(ari), partition: Partition::from_assignment(&[0, 1]) }
    }

    #[test]
    fn recovers_exact_linear_relation() {
        let mut rs = Vec::new();
        for k in 2..=10 {
            for run in 0..10 {
                let s = 0.05 * run as f64 + 0.01 * k as f64;
                rs.push(rec(k, run, s, 2.0 * s - 0.1));
            }
        }
        let m = train_meta_k(&rs, 2, 10).unwrap();
        assert_eq!(m.models.len(), 9);
        for l in &m.models {
            assert!((l.weights[0] - 2.0).abs() < 1e-9 && (l.intercept + 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_targets_and_coverage() {
        let rs: Vec<RunRecord> = (2..=4).flat_map(|k| (0..3).map(move |r| rec(k, r, 0.1 * r as f64, 0.7))).collect();
        let m = train_meta_k(&rs, 2, 4).unwrap();
        assert!(m.models.iter().all(|l| l.weights[0].abs() < 1e-12 && (l.intercept - 0.7).abs() < 1e-12));
        assert!(train_meta_k(&rs, 2, 5).is_err());
    }

    #[test]
    fn tie_picks_smallest_k() {
        let m = MetaKModel::identity(2, 6);
        let rs = vec![rec(5, 0, 0.8, 0.0), rec(3, 0, 0.8, 0.0), rec(4, 0, 0.1, 0.0)];
        assert_eq!(predict_k(&m, &rs).unwrap(), 3);
        let back = MetaKModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
