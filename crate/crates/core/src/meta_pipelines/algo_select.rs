use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clusterers::ClustererSpec;
use crate::data_model::{labels_to_partition, Dataset, Partition};
use crate::error::{Error, Result};
use crate::metrics::{adjusted_rand_index, DistanceMatrix};
use crate::regression::{covariance_extrema, fit_least_squares, phi_features_cached, LinearModel, PhiFeatures};
use crate::seed::mix;

/// Output of one family member on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberOutcome {
    /// `None` when the member failed.
    pub partition: Option<Partition>,
    /// Meta-features; a failed member gets silhouette 0.
    pub phi: PhiFeatures,
    /// ARI against the ground truth (0 for a failed member); absent for unlabeled data.
    pub ari: Option<f64>,
}

impl MemberOutcome {
    pub fn failed(&self) -> bool {
        self.partition.is_none()
    }
}

/// Family with one least-squares model per member predicting ARI from meta-features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSelectModel {
    pub members: Vec<ClustererSpec>,
    pub models: Vec<LinearModel>,
    /// Training rows that came from a failed member (kept with ARI 0).
    pub failed_rows: usize,
}

impl AlgoSelectModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        if m.members.is_empty() || m.members.len() != m.models.len() {
            return Err(Error::InvalidArgument("malformed algorithm-selection model".into()));
        }
        Ok(m)
    }

    /// Index of the member with the highest predicted ARI among those that
    /// succeeded; ties go to the earliest member.
    pub fn choose(&self, outcomes: &[MemberOutcome]) -> Result<Option<usize>> {
        let mut best: Option<(usize, f64)> = None;
        for (j, o) in outcomes.iter().enumerate() {
            if o.failed() {
                continue;
            }
            let a = self.models[j].predict(&o.phi.to_vec())?;
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((j, a));
            }
        }
        Ok(best.map(|b| b.0))
    }
}

/// Seed the members so that member `j` uses sub-seed `mix(seed, j)`.
pub fn seeded_family(family: &[ClustererSpec], seed: u64) -> Vec<ClustererSpec> {
    family.iter().enumerate().map(|(j, s)| s.clone().with_seed(mix(seed, j as u64))).collect()
}

/// Run every member on `x`.
pub fn member_outcomes(members: &[ClustererSpec], x: &Dataset) -> Result<Vec<MemberOutcome>> {
    let points = x.points();
    let dm = DistanceMatrix::new(points);
    let extrema = covariance_extrema(points)?;
    let truth = x.labels().map(labels_to_partition).transpose()?;
    members
        .iter()
        .map(|spec| {
            let clustered = spec.cluster(points).and_then(|res| {
                let phi = phi_features_cached(points, &dm, extrema, &res.partition)?;
                Ok((res.partition, phi))
            });
            Ok(match clustered {
                Ok((partition, phi)) => {
                    let ari = truth.as_ref().map(|y| adjusted_rand_index(x.n(), y, &partition)).transpose()?;
                    MemberOutcome { partition: Some(partition), phi, ari }
                }
                Err(_) => MemberOutcome {
                    partition: None,
                    phi: PhiFeatures { d: x.d(), m: x.n(), sigma_min: extrema.0, sigma_max: extrema.1, sil: 0.0 },
                    ari: truth.as_ref().map(|_| 0.0),
                },
            })
        })
        .collect()
}

/// Member outcomes for many datasets, in parallel.
pub fn all_member_outcomes(members: &[ClustererSpec], datasets: &[&Dataset]) -> Result<Vec<Vec<MemberOutcome>>> {
    datasets.par_iter().map(|x| member_outcomes(members, x)).collect()
}

/// Fit each member's model from precomputed outcomes (`outcomes[dataset][member]`).
pub fn fit_algo_select(members: Vec<ClustererSpec>, outcomes: &[&[MemberOutcome]]) -> Result<AlgoSelectModel> {
    if outcomes.is_empty() {
        return Err(Error::InvalidArgument("no training problems".into()));
    }
    let mut models = Vec::with_capacity(members.len());
    let mut failed_rows = 0;
    for j in 0..members.len() {
        let mut xs = Vec::with_capacity(outcomes.len());
        let mut ys = Vec::with_capacity(outcomes.len());
        for per_dataset in outcomes {
            let o = per_dataset.get(j).ok_or(Error::DimensionMismatch { expected: members.len(), got: per_dataset.len() })?;
            let ari = o.ari.ok_or_else(|| Error::InvalidArgument("training problems must be labeled".into()))?;
            failed_rows += usize::from(o.failed());
            xs.push(o.phi.to_vec());
            ys.push(ari);
        }
        models.push(fit_least_squares(&xs, &ys)?);
    }
    Ok(AlgoSelectModel { members, models, failed_rows })
}

/// Run the seeded family on the training datasets and fit one ARI model per member.
pub fn train_algo_select(family: &[ClustererSpec], train: &[&Dataset], seed: u64) -> Result<AlgoSelectModel> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let members = seeded_family(family, seed);
    let outcomes = all_member_outcomes(&members, train)?;
    let refs: Vec<&[MemberOutcome]> = outcomes.iter().map(|v| v.as_slice()).collect();
    fit_algo_select(members, &refs)
}

/// Run every member on `x` and return the one with the highest predicted ARI.
pub fn select_algorithm(model: &AlgoSelectModel, x: &Dataset) -> Result<(usize, Partition)> {
    let mut outcomes = member_outcomes(&model.members, x)?;
    let j = model.choose(&outcomes)?.ok_or_else(|| Error::Infeasible(format!("every member failed on {}", x.id)))?;
    Ok((j, outcomes.swap_remove(j).partition.expect("chosen member succeeded")))
}
