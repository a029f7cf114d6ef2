use std::path::Path;

use rayon::prelude::*;

use super::{create_file, data_err, write_text, CliResult, Experiment, ExperimentConfig};
use crate::clusterers::{standard_family, OutlierCriterion};
use crate::data_model::io::{fmt_f64, load_repository};
use crate::data_model::{split_indices, Dataset, MetaRepository, Partition, SplitSpec, WeightedGraph};
use crate::erm_meta::{fit_meta_scale, fit_threshold_kruskal, write_profile_csv};
use crate::meta_pipelines::{
    algo_select_experiment, meta_k_experiment, outlier_experiment, pruned_runs, repository_runs, train_algo_select, train_meta_k,
    write_runs_csv, write_table, MetaKRow, OutlierRow, RepeatPlan, RunConfig,
};
use crate::metrics::clustering_loss;
use crate::seed::mix;
use crate::similarity_net::{evaluate_bsf, sample_pair_splits, train_mlp, write_pairs_csv, PairSampling, TrainConfig};

pub(crate) struct RunOptions {
    pub criterion: OutlierCriterion,
    pub epochs: usize,
    pub batch: usize,
    pub pair_cap: usize,
    pub write_pairs: bool,
}

fn plan(cfg: &ExperimentConfig) -> RepeatPlan {
    RepeatPlan { train_fractions: cfg.train_fractions.clone(), repeats: cfg.repeats, seed: cfg.seed }
}

fn run_config(cfg: &ExperimentConfig) -> RunConfig {
    RunConfig { k_min: cfg.k_min, k_max: cfg.k_max, restarts: 10, seed: cfg.seed }
}

fn table(out: &Path, name: &str, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    data_err(write_table(header, rows, create_file(out, name)?))
}

fn graphs_with_truth(repo: &MetaRepository) -> Vec<(WeightedGraph, Partition)> {
    repo.problems().iter().map(|p| (p.problem.to_graph(), p.truth.clone())).collect()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn run_experiment(exp: Experiment, cfg: &ExperimentConfig, repo_path: &Path, out: &Path, opts: &RunOptions) -> CliResult<()> {
    let repo = data_err(load_repository(repo_path, cfg.seed))?;
    match exp {
        Experiment::AlgoSelect => {
            let family = standard_family(2, cfg.seed);
            let res = algo_select_experiment(&repo, &family, &plan(cfg))?;
            table(out, "algo_select.csv", &res.header(), &res.cells())?;
            let all: Vec<&Dataset> = repo.datasets().collect();
            let model = train_algo_select(&family, &all, cfg.seed)?;
            write_text(out, "model.json", &(model.to_json()? + "\n"))?;
            println!(
                "mean test ARI: meta {:.4}, best fixed member {:.4}",
                mean(res.rows.iter().map(|r| r.ari_meta)),
                mean(res.rows.iter().map(|r| r.best_member_ari()))
            );
        }
        Experiment::MetaK => {
            let rc = run_config(cfg);
            let runs = repository_runs(&repo, &rc, 0.0, OutlierCriterion::default())?;
            data_err(write_runs_csv(&runs, create_file(out, "runs.csv")?))?;
            let rows = meta_k_experiment(&runs, repo.seed, &rc, &plan(cfg))?;
            let cells: Vec<Vec<String>> = rows.iter().map(MetaKRow::cells).collect();
            table(out, "meta_k.csv", &MetaKRow::header(), &cells)?;
            let model = train_meta_k(runs.iter().flat_map(|d| &d.records), rc.k_min, rc.k_max)?;
            write_text(out, "model.json", &(model.to_json()? + "\n"))?;
            println!(
                "RMSE to best k: meta {:.4}, silhouette {:.4}",
                mean(rows.iter().map(|r| r.rmse_meta)),
                mean(rows.iter().map(|r| r.rmse_baseline))
            );
        }
        Experiment::Outliers => {
            let rc = run_config(cfg);
            let per_p = pruned_runs(&repo, &cfg.p_grid, &rc, opts.criterion)?;
            let rows = outlier_experiment(&per_p, &cfg.p_grid, repo.seed, &rc, &plan(cfg))?;
            let cells: Vec<Vec<String>> = rows.iter().flat_map(OutlierRow::cells).collect();
            table(out, "outliers.csv", &OutlierRow::header(), &cells)?;
            for r in &rows {
                println!("train_frac {} repeat {}: best p {}", r.train_frac, r.repeat, r.sweep.best_p);
            }
        }
        Experiment::FitThreshold => {
            let res = fit_threshold_kruskal(&graphs_with_truth(&repo))?;
            data_err(write_profile_csv(&res, create_file(out, "profile.csv")?))?;
            let summary = serde_json::json!({ "r_star": res.r_star, "min_mean_loss": res.min_mean_loss, "candidates": res.profile.len() });
            write_text(out, "threshold.json", &(serde_json::to_string_pretty(&summary).map_err(crate::Error::from)? + "\n"))?;
            println!("r_star = {}", fmt_f64(res.r_star));
            println!("min mean loss = {}", fmt_f64(res.min_mean_loss));
        }
        Experiment::MetaScale => {
            let graphs = graphs_with_truth(&repo);
            let mut rows = Vec::new();
            for &f in &cfg.train_fractions {
                for r in 0..cfg.repeats {
                    let spec = SplitSpec { train_fraction: f, repeat_index: r as u64, seed: cfg.seed };
                    let (train, test) = split_indices(graphs.len(), repo.seed, &spec)?;
                    let train_set: Vec<(WeightedGraph, Partition)> = train.iter().map(|&i| graphs[i].clone()).collect();
                    let rule = fit_meta_scale(&train_set)?;
                    let loss = mean(test.iter().map(|&i| {
                        let (g, y) = &graphs[i];
                        clustering_loss(g.n_vertices(), y, &rule.cluster_graph(g))
                    }));
                    rows.push(vec![fmt_f64(f), r.to_string(), fmt_f64(rule.r_star), fmt_f64(loss)]);
                }
            }
            let header = ["train_frac", "repeat", "r_star", "mean_test_loss"].map(String::from);
            table(out, "meta_scale.csv", &header, &rows)?;
            println!("{} splits evaluated", rows.len());
        }
        Experiment::Bsf => {
            let datasets: Vec<Dataset> = repo.datasets().cloned().collect();
            let repeats: Vec<usize> = (0..cfg.repeats).collect();
            let results = repeats
                .par_iter()
                .map(|&r| {
                    let seed = mix(cfg.seed, r as u64);
                    let split = sample_pair_splits(&datasets, &PairSampling { pair_cap: opts.pair_cap, seed, ..PairSampling::default() })?;
                    let model = train_mlp(&split.meta_train, &TrainConfig { epochs: opts.epochs, batch: opts.batch, seed })?;
                    let eval = evaluate_bsf(&model, &split);
                    Ok((split, model, eval))
                })
                .collect::<crate::Result<Vec<_>>>()?;
            let rows: Vec<Vec<String>> = results
                .iter()
                .enumerate()
                .map(|(r, (s, _, e))| {
                    vec![
                        r.to_string(),
                        s.meta_train.len().to_string(),
                        fmt_f64(e.acc_meta_it),
                        fmt_f64(e.acc_meta_et),
                        fmt_f64(e.acc_majority_it),
                        fmt_f64(e.acc_majority_et),
                    ]
                })
                .collect();
            let header = ["repeat", "n_train_pairs", "acc_meta_it", "acc_meta_et", "acc_majority_it", "acc_majority_et"].map(String::from);
            table(out, "bsf.csv", &header, &rows)?;
            let (split, model, _) = &results[0];
            write_text(out, "mlp.json", &(model.to_json()? + "\n"))?;
            if opts.write_pairs {
                for (name, pairs) in [("pairs_train.csv", &split.meta_train), ("pairs_it.csv", &split.meta_it), ("pairs_et.csv", &split.meta_et)] {
                    data_err(write_pairs_csv(pairs, create_file(out, name)?))?;
                }
            }
            println!(
                "external-test accuracy: network {:.4}, majority rule {:.4}",
                mean(results.iter().map(|x| x.2.acc_meta_et)),
                mean(results.iter().map(|x| x.2.acc_majority_et))
            );
        }
    }
    Ok(())
}

