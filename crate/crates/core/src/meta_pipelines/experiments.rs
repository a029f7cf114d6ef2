use std::io::Write;

use serde::{Deserialize, Serialize};

use super::algo_select::{all_member_outcomes, fit_algo_select, seeded_family, MemberOutcome};
use super::meta_k::meta_k_on_split;
use super::runs::{repository_runs, DatasetRuns, RunConfig};
use crate::clusterers::{ClustererSpec, OutlierCriterion};
use crate::data_model::io::fmt_f64;
use crate::data_model::{split_indices, Dataset, MetaRepository, SplitSpec};
use crate::error::{Error, Result};

/// Train fractions and repeated random splits of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatPlan {
    pub train_fractions: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
}

impl RepeatPlan {
    fn splits(&self, n: usize, repo_seed: u64) -> Result<Vec<(f64, usize, Vec<usize>, Vec<usize>)>> {
        if self.train_fractions.is_empty() || self.repeats == 0 {
            return Err(Error::InvalidArgument("need at least one train fraction and one repeat".into()));
        }
        let mut out = Vec::new();
        for &f in &self.train_fractions {
            for r in 0..self.repeats {
                let spec = SplitSpec { train_fraction: f, repeat_index: r as u64, seed: self.seed };
                let (train, test) = split_indices(n, repo_seed, &spec)?;
                out.push((f, r, train, test));
            }
        }
        Ok(out)
    }
}

/// Write a header and rows of pre-formatted cells.
pub fn write_table<W: Write>(header: &[String], rows: &[Vec<String>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaKRow {
    pub train_frac: f64,
    pub repeat: usize,
    pub rmse_meta: f64,
    pub rmse_baseline: f64,
    pub ari_meta: f64,
    pub ari_baseline: f64,
}

impl MetaKRow {
    pub fn header() -> Vec<String> {
        ["train_frac", "repeat", "rmse_meta", "rmse_baseline", "ari_meta", "ari_baseline"].map(String::from).to_vec()
    }

    pub fn cells(&self) -> Vec<String> {
        vec![
            fmt_f64(self.train_frac),
            self.repeat.to_string(),
            fmt_f64(self.rmse_meta),
            fmt_f64(self.rmse_baseline),
            fmt_f64(self.ari_meta),
            fmt_f64(self.ari_baseline),
        ]
    }
}

/// Meta-K against the silhouette baseline for every split of the plan.
pub fn meta_k_experiment(runs: &[DatasetRuns], repo_seed: u64, cfg: &RunConfig, plan: &RepeatPlan) -> Result<Vec<MetaKRow>> {
    plan.splits(runs.len(), repo_seed)?
        .into_iter()
        .map(|(f, r, train, test)| {
            let (_, e) = meta_k_on_split(runs, &train, &test, cfg.k_min, cfg.k_max)?;
            Ok(MetaKRow {
                train_frac: f,
                repeat: r,
                rmse_meta: e.rmse_meta,
                rmse_baseline: e.rmse_baseline,
                ari_meta: e.ari_meta,
                ari_baseline: e.ari_baseline,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSelectRow {
    pub train_frac: f64,
    pub repeat: usize,
    pub ari_meta: f64,
    /// Mean test ARI of each fixed member, in family order.
    pub ari_members: Vec<f64>,
}

impl AlgoSelectRow {
    pub fn best_member_ari(&self) -> f64 {
        self.ari_members.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSelectExperiment {
    pub member_names: Vec<String>,
    pub rows: Vec<AlgoSelectRow>,
}

impl AlgoSelectExperiment {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["train_frac", "repeat", "ari_meta"].map(String::from).to_vec();
        h.extend(self.member_names.iter().map(|n| format!("ari_{n}")));
        h
    }

    pub fn cells(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut c = vec![fmt_f64(r.train_frac), r.repeat.to_string(), fmt_f64(r.ari_meta)];
                c.extend(r.ari_members.iter().map(|&a| fmt_f64(a)));
                c
            })
            .collect()
    }
}

/// Meta-selection against every fixed member. Each member runs once per
/// problem; the splits reuse those outputs.
pub fn algo_select_experiment(repo: &MetaRepository, family: &[ClustererSpec], plan: &RepeatPlan) -> Result<AlgoSelectExperiment> {
    let datasets: Vec<&Dataset> = repo.datasets().collect();
    if datasets.len() != repo.len() || family.is_empty() {
        return Err(Error::InvalidArgument("algorithm selection needs point-data problems and a non-empty family".into()));
    }
    let members = seeded_family(family, plan.seed);
    let outcomes = all_member_outcomes(&members, &datasets)?;
    let member_names = members.iter().map(|m| m.name()).collect();
    let rows = plan
        .splits(repo.len(), repo.seed)?
        .into_iter()
        .map(|(f, r, train, test)| {
            let train_rows: Vec<&[MemberOutcome]> = train.iter().map(|&i| outcomes[i].as_slice()).collect();
            let model = fit_algo_select(members.clone(), &train_rows)?;
            let mut meta = 0.0;
            let mut fixed = vec![0.0; members.len()];
            for &i in &test {
                let o = &outcomes[i];
                meta += match model.choose(o)? {
                    Some(j) => o[j].ari.unwrap_or(0.0),
                    None => 0.0,
                };
                for (acc, oj) in fixed.iter_mut().zip(o) {
                    *acc += oj.ari.unwrap_or(0.0);
                }
            }
            let t = test.len() as f64;
            Ok(AlgoSelectRow { train_frac: f, repeat: r, ari_meta: meta / t, ari_members: fixed.into_iter().map(|s| s / t).collect() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgoSelectExperiment { member_names, rows })
}

/// Mean test ARI of Meta-K per outlier fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierSweepResult {
    pub p_grid: Vec<f64>,
    pub mean_ari: Vec<f64>,
    pub best_p: f64,
}

impl OutlierSweepResult {
    fn new(p_grid: Vec<f64>, mean_ari: Vec<f64>) -> Self {
        let mut best = 0;
        for i in 1..p_grid.len() {
            if mean_ari[i] > mean_ari[best] || (mean_ari[i] == mean_ari[best] && p_grid[i] < p_grid[best]) {
                best = i;
            }
        }
        let best_p = p_grid[best];
        Self { p_grid, mean_ari, best_p }
    }

    pub fn ari_at(&self, p: f64) -> Option<f64> {
        self.p_grid.iter().position(|&q| q == p).map(|i| self.mean_ari[i])
    }
}

pub fn default_p_grid() -> Vec<f64> {
    vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05]
}

fn check_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.is_empty() || p_grid.iter().any(|p| !(0.0..1.0).contains(p)) {
        return Err(Error::InvalidArgument("outlier fractions must be a non-empty list in [0,1)".into()));
    }
    Ok(())
}

/// Runs of the repository after pruning each fraction of the grid.
pub fn pruned_runs(repo: &MetaRepository, p_grid: &[f64], cfg: &RunConfig, criterion: OutlierCriterion) -> Result<Vec<Vec<DatasetRuns>>> {
    check_grid(p_grid)?;
    p_grid.iter().map(|&p| repository_runs(repo, cfg, p, criterion)).collect()
}

fn sweep_on_split(per_p: &[Vec<DatasetRuns>], p_grid: &[f64], cfg: &RunConfig, train: &[usize], test: &[usize]) -> Result<OutlierSweepResult> {
    let mean_ari = per_p
        .iter()
        .map(|runs| Ok(meta_k_on_split(runs, train, test, cfg.k_min, cfg.k_max)?.1.ari_meta))
        .collect::<Result<Vec<_>>>()?;
    Ok(OutlierSweepResult::new(p_grid.to_vec(), mean_ari))
}

/// For each fraction: prune, run, reattach, train Meta-K on the train side
/// and score mean ARI on the test side.
pub fn sweep_outlier_fraction(
    repo: &MetaRepository,
    p_grid: &[f64],
    cfg: &RunConfig,
    split: &SplitSpec,
    criterion: OutlierCriterion,
) -> Result<OutlierSweepResult> {
    let per_p = pruned_runs(repo, p_grid, cfg, criterion)?;
    let (train, test) = split_indices(repo.len(), repo.seed, split)?;
    sweep_on_split(&per_p, p_grid, cfg, &train, &test)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRow {
    pub train_frac: f64,
    pub repeat: usize,
    pub sweep: OutlierSweepResult,
}

impl OutlierRow {
    pub fn header() -> Vec<String> {
        ["train_frac", "repeat", "p", "ari_meta", "best_p"].map(String::from).to_vec()
    }

    pub fn cells(&self) -> Vec<Vec<String>> {
        self.sweep
            .p_grid
            .iter()
            .zip(&self.sweep.mean_ari)
            .map(|(&p, &a)| vec![fmt_f64(self.train_frac), self.repeat.to_string(), fmt_f64(p), fmt_f64(a), fmt_f64(self.sweep.best_p)])
            .collect()
    }
}

/// The sweep for every split of the plan, from precomputed [`pruned_runs`].
pub fn outlier_experiment(
    per_p: &[Vec<DatasetRuns>],
    p_grid: &[f64],
    repo_seed: u64,
    cfg: &RunConfig,
    plan: &RepeatPlan,
) -> Result<Vec<OutlierRow>> {
    if per_p.len() != p_grid.len() || per_p.is_empty() {
        return Err(Error::DimensionMismatch { expected: p_grid.len(), got: per_p.len() });
    }
    plan.splits(per_p[0].len(), repo_seed)?
        .into_iter()
        .map(|(f, r, train, test)| Ok(OutlierRow { train_frac: f, repeat: r, sweep: sweep_on_split(per_p, p_grid, cfg, &train, &test)? }))
        .collect()
}
