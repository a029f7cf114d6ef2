//! Synthetic repositories with planted structure for the pipelines.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data_model::synth::{blob_datasets, gaussian, place_centers, random_unit, BlobSpec};
use crate::data_model::{Dataset, MetaRepository, PointMatrix};
use crate::error::Result;
use crate::seed::{self, mix, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Plain Gaussian blobs.
    Blobs,
    /// Half concentric rings in 2-D, half 6-D blob pairs with far stragglers.
    Regimes,
    /// Sub-clusters grouped into two far-apart groups.
    BiasedK,
    /// Gaussian blobs with 1% of points pushed far away.
    Outliers,
    /// Two classes split along f0 or f1; the sign of the f2-f3 correlation tells which.
    PairRegimes,
}

impl Scenario {
    pub fn datasets(self, problems: usize, seed: u64) -> Result<Vec<Dataset>> {
        match self {
            Scenario::Blobs => blob_datasets(&BlobSpec { problems, seed, ..BlobSpec::default() }),
            Scenario::Regimes => (0..problems).map(|i| regime_problem(seed, i)).collect(),
            Scenario::BiasedK => (0..problems).map(|i| biased_k_problem(seed, i)).collect(),
            Scenario::Outliers => blob_datasets(&outlier_spec(problems, seed)),
            Scenario::PairRegimes => (0..problems).map(|i| pair_regime_problem(seed, i)).collect(),
        }
    }

    pub fn repository(self, problems: usize, seed: u64) -> Result<MetaRepository> {
        MetaRepository::from_datasets(self.datasets(problems, seed)?, seed)
    }
}

/// 200-point, 3-blob problems where exactly 2 points are planted outliers.
pub fn outlier_spec(problems: usize, seed: u64) -> BlobSpec {
    BlobSpec { problems, points: (200, 200), dims: (2, 4), clusters: (3, 3), outlier_fraction: 0.01, seed, ..BlobSpec::default() }
}

fn build(id: String, rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Dataset> {
    Dataset::new(id.clone(), id, PointMatrix::from_rows(&rows)?, Some(labels))
}

fn regime_problem(seed: u64, index: usize) -> Result<Dataset> {
    let mut rng = seed::rng(mix(seed, index as u64));
    if index % 2 == 0 {
        rings(&mut rng, index)
    } else {
        blob_pair(&mut rng, index)
    }
}

/// Two noisy concentric circles, radius 1 and 5.
fn rings(rng: &mut Rng, index: usize) -> Result<Dataset> {
    let n = rng.random_range(100..=140);
    let inner = n / 3;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (radius, label) = if i < inner { (1.0, 0) } else { (5.0, 1) };
        let t = rng.random::<f64>() * std::f64::consts::TAU;
        rows.push(vec![radius * t.cos() + 0.05 * gaussian(rng), radius * t.sin() + 0.05 * gaussian(rng)]);
        labels.push(label);
    }
    build(format!("rings_{index:04}"), rows, labels)
}

/// Two unit Gaussians 8 apart in 6-D, plus one point per blob 15 out from its center.
fn blob_pair(rng: &mut Rng, index: usize) -> Result<Dataset> {
    let d = 6;
    let n = rng.random_range(180..=220);
    let axis = random_unit(rng, d);
    let centers: Vec<Vec<f64>> = [-4.0, 4.0].iter().map(|s| axis.iter().map(|a| a * s).collect()).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n - 2 {
        let c = i % 2;
        rows.push(centers[c].iter().map(|m| m + gaussian(rng)).collect());
        labels.push(c);
    }
    for (c, center) in centers.iter().enumerate() {
        let dir: Vec<f64> = center.iter().map(|m| m / 4.0).collect();
        rows.push(center.iter().zip(&dir).map(|(m, u)| m + 15.0 * u + 0.5 * gaussian(rng)).collect());
        labels.push(c);
    }
    build(format!("pair_{index:04}"), rows, labels)
}

/// 3 to 6 unit Gaussians 5 apart, split between two groups 150 apart.
fn biased_k_problem(seed: u64, index: usize) -> Result<Dataset> {
    let mut rng = seed::rng(mix(seed, index as u64));
    let k: usize = rng.random_range(3..=6);
    let d = rng.random_range(2..=3);
    let n = rng.random_range(150..=250);
    let axis = random_unit(&mut rng, d);
    let first = k.div_ceil(2);
    let mut centers = Vec::with_capacity(k);
    for (g, size) in [first, k - first].into_iter().enumerate() {
        let local = place_centers(&mut rng, size, d, 5.0)?;
        let mid: Vec<f64> = (0..d).map(|j| local.iter().map(|c| c[j]).sum::<f64>() / size as f64).collect();
        for c in local {
            centers.push((0..d).map(|j| c[j] - mid[j] + 150.0 * g as f64 * axis[j]).collect::<Vec<f64>>());
        }
    }
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        rows.push(centers[c].iter().map(|m| m + gaussian(&mut rng)).collect());
        labels.push(c);
    }
    build(format!("grouped_{index:04}"), rows, labels)
}

/// 4-D data with two classes 6 apart along f0 (even index) or f1 (odd index);
/// f3 follows f2 with correlation +0.8 or -0.8 accordingly.
fn pair_regime_problem(seed: u64, index: usize) -> Result<Dataset> {
    let mut rng = seed::rng(mix(seed, index as u64));
    let axis = index % 2;
    let sign = if axis == 0 { 0.8 } else { -0.8 };
    let n = rng.random_range(150..=400);
    let share = rng.random_range(0.3..0.7);
    let n_first = ((n as f64 * share).round() as usize).clamp(2, n - 2);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = usize::from(i >= n_first);
        let mut r: Vec<f64> = (0..3).map(|_| gaussian(&mut rng)).collect();
        r[axis] += if class == 0 { -3.0 } else { 3.0 };
        r.push(sign * r[2] + 0.6 * gaussian(&mut rng));
        rows.push(r);
        labels.push(class);
    }
    build(format!("pairs_{index:04}"), rows, labels)
}
