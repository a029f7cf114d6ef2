//! Experiment pipelines built on the clusterers and regression layers:
//! regression-based algorithm selection, Meta-K selection of the number of
//! clusters, and the outlier-fraction sweep.

mod algo_select;
mod experiments;
mod meta_k;
mod runs;
pub mod scenarios;

pub use algo_select::{
    all_member_outcomes, fit_algo_select, member_outcomes, seeded_family, select_algorithm, train_algo_select, AlgoSelectModel,
    MemberOutcome,
};
pub use experiments::{
    algo_select_experiment, default_p_grid, meta_k_experiment, outlier_experiment, pruned_runs, sweep_outlier_fraction, write_table,
    AlgoSelectExperiment, AlgoSelectRow, MetaKRow, OutlierRow, OutlierSweepResult, RepeatPlan,
};
pub use meta_k::{evaluate_meta_k, meta_k_on_split, meta_k_record, predict_k, train_meta_k, MetaKDatasetOutcome, MetaKEvaluation, MetaKModel};
pub use runs::{
    baseline_k_silhouette, baseline_record, best_fit_k, generate_pruned_runs, generate_runs, repository_runs, write_runs_csv, DatasetRuns,
    RunConfig, RunRecord,
};
pub use scenarios::Scenario;
