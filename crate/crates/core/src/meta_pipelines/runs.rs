use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clusterers::{kmeans, outlier_indices, reattach, OutlierCriterion};
use crate::data_model::io::fmt_f64;
use crate::data_model::{labels_to_partition, Dataset, MetaRepository, Partition};
use crate::error::{Error, Result};
use crate::metrics::{adjusted_rand_index, silhouette_with_distances, DistanceMatrix};
use crate::seed::{mix, mix_path};

/// Settings for the per-dataset grid of k-means runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Single-start runs per k.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { k_min: 2, k_max: 10, restarts: 10, seed: 0 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(Error::InvalidArgument(format!("bad k range {}..={}", self.k_min, self.k_max)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be positive".into()));
        }
        Ok(())
    }

    pub fn k_values(&self) -> impl Iterator<Item = usize> {
        self.k_min..=self.k_max
    }

    fn for_dataset(&self, index: usize) -> RunConfig {
        RunConfig { seed: mix(self.seed, index as u64), ..*self }
    }
}

/// One clustering of one dataset at a given k.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dataset_id: String,
    pub k: usize,
    pub run: usize,
    /// Silhouette of the clustering on the data it was computed from (the inliers, after pruning).
    pub silhouette: f64,
    /// ARI of `partition` against the full ground truth; absent for unlabeled data.
    pub ari: Option<f64>,
    /// Clustering of the full dataset.
    pub partition: Partition,
}

/// All run records of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRuns {
    pub dataset_id: String,
    pub records: Vec<RunRecord>,
}

/// `restarts` single-start k-means runs per k, each with its own sub-seed.
pub fn generate_runs(x: &Dataset, cfg: &RunConfig) -> Result<Vec<RunRecord>> {
    generate_pruned_runs(x, cfg, 0.0, OutlierCriterion::default())
}

/// Runs on the data left after removing the `p` fraction of outliers; the
/// removed points are attached to the nearest center before scoring ARI.
/// With nothing removed this is exactly [`generate_runs`].
pub fn generate_pruned_runs(x: &Dataset, cfg: &RunConfig, p: f64, criterion: OutlierCriterion) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("outlier fraction must lie in [0,1), got {p}")));
    }
    let n = x.n();
    let removed = outlier_indices(x.points(), p, criterion);
    let kept = n - removed.len();
    if kept < cfg.k_max {
        return Err(Error::Infeasible(format!(
            "dataset {} keeps {kept} points, fewer than k = {}",
            x.id, cfg.k_max
        )));
    }
    let inlier_points = if removed.is_empty() {
        None
    } else {
        let mut keep = vec![true; n];
        removed.iter().for_each(|&i| keep[i] = false);
        let idx: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
        Some(x.points().select_rows(&idx))
    };
    let work = inlier_points.as_ref().unwrap_or(x.points());
    let dm = DistanceMatrix::new(work);
    let truth = x.labels().map(labels_to_partition).transpose()?;

    let mut out = Vec::with_capacity((cfg.k_max - cfg.k_min + 1) * cfg.restarts);
    for k in cfg.k_values() {
        for run in 0..cfg.restarts {
            let res = kmeans(work, k, 1, mix_path(cfg.seed, &[k as u64, run as u64]))?;
            let silhouette = silhouette_with_distances(&dm, &res.partition)?;
            let partition = if removed.is_empty() {
                res.partition
            } else {
                Partition::from_assignment(&reattach(x.points(), &removed, &res))
            };
            let ari = truth.as_ref().map(|y| adjusted_rand_index(n, y, &partition)).transpose()?;
            out.push(RunRecord { dataset_id: x.id.clone(), k, run, silhouette, ari, partition });
        }
    }
    Ok(out)
}

/// Runs for every dataset of a repository; dataset `i` uses sub-seed `mix(cfg.seed, i)`.
pub fn repository_runs(repo: &MetaRepository, cfg: &RunConfig, p: f64, criterion: OutlierCriterion) -> Result<Vec<DatasetRuns>> {
    let datasets: Vec<&Dataset> = repo.datasets().collect();
    if datasets.len() != repo.len() {
        return Err(Error::InvalidArgument("k-selection pipelines need point-data problems".into()));
    }
    datasets
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let records = generate_pruned_runs(x, &cfg.for_dataset(i), p, criterion)?;
            Ok(DatasetRuns { dataset_id: x.id.clone(), records })
        })
        .collect()
}

/// Index of the record with the highest score; ties go to the smaller k, then the earlier run.
pub(crate) fn argmax_record(records: &[RunRecord], mut score: impl FnMut(&RunRecord) -> Result<f64>) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in records.iter().enumerate() {
        let s = score(r)?;
        let better = match best {
            None => true,
            Some((b, bs)) => {
                let rb = &records[b];
                s > bs || (s == bs && (r.k, r.run) < (rb.k, rb.run))
            }
        };
        if better {
            best = Some((i, s));
        }
    }
    best.map(|b| b.0).ok_or_else(|| Error::InvalidArgument("no run records".into()))
}

fn labeled_ari(r: &RunRecord) -> Result<f64> {
    r.ari.ok_or_else(|| Error::InvalidArgument(format!("run record of {} has no ARI", r.dataset_id)))
}

/// The k whose best run has the highest ARI; ties go to the smallest k.
pub fn best_fit_k(records: &[RunRecord]) -> Result<usize> {
    Ok(records[argmax_record(records, labeled_ari)?].k)
}

/// Record with the highest silhouette.
pub fn baseline_record(records: &[RunRecord]) -> Result<usize> {
    argmax_record(records, |r| Ok(r.silhouette))
}

/// The k of the highest-silhouette run; ties go to the smallest k.
pub fn baseline_k_silhouette(records: &[RunRecord]) -> Result<usize> {
    Ok(records[baseline_record(records)?].k)
}

pub fn write_runs_csv<W: Write>(runs: &[DatasetRuns], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dataset_id", "k", "run", "silhouette", "ari"])?;
    for r in runs.iter().flat_map(|d| &d.records) {
        let ari = r.ari.map(fmt_f64).unwrap_or_default();
        w.write_record([r.dataset_id.clone(), r.k.to_string(), r.run.to_string(), fmt_f64(r.silhouette), ari])?;
    }
    w.flush()?;
    Ok(())
}
