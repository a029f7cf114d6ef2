//! Synthetic meta-repositories made of isotropic Gaussian blobs.

use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, MetaRepository, PointMatrix};
use crate::error::{Error, Result};
use crate::seed::{self, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub problems: usize,
    /// Inclusive range of points per problem.
    pub points: (usize, usize),
    /// Inclusive range of dimensionality.
    pub dims: (usize, usize),
    /// Inclusive range of blob count.
    pub clusters: (usize, usize),
    /// Minimum distance between blob centers, in units of `sigma`.
    pub separation: f64,
    pub sigma: f64,
    /// Fraction of points moved far away from the data (ground truth keeps their blob).
    pub outlier_fraction: f64,
    /// How far beyond its blob center an outlier is placed, in units of `sigma`.
    pub outlier_distance: f64,
    pub seed: u64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        Self {
            problems: 20,
            points: (100, 200),
            dims: (2, 5),
            clusters: (2, 5),
            separation: 10.0,
            sigma: 1.0,
            outlier_fraction: 0.0,
            outlier_distance: 60.0,
            seed: 0,
        }
    }
}

impl BlobSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Infeasible(m.to_string()));
        if self.points.0 > self.points.1 || self.dims.0 > self.dims.1 || self.clusters.0 > self.clusters.1 {
            return bad("inverted range");
        }
        if self.dims.0 == 0 {
            return bad("dimensionality must be at least 1");
        }
        if self.clusters.0 < 2 {
            return bad("need at least 2 clusters");
        }
        if self.clusters.1 > self.points.0 {
            return bad("more clusters than points");
        }
        if !(self.sigma > 0.0) || !(self.separation >= 0.0) {
            return bad("sigma must be positive and separation non-negative");
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) {
            return bad("outlier fraction must lie in [0,1)");
        }
        Ok(())
    }
}

/// Number of planted outliers for `n` points.
pub fn outlier_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round() as usize
}

pub(crate) fn gaussian(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub(crate) fn random_unit(rng: &mut Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Blob centers with pairwise distance at least `min_dist`.
pub(crate) fn place_centers(rng: &mut Rng, k: usize, d: usize, min_dist: f64) -> Result<Vec<Vec<f64>>> {
    let side = min_dist * (k as f64).powf(1.0 / d as f64) * 2.0 + 1e-9;
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut tries = 0;
    while centers.len() < k {
        tries += 1;
        if tries > 100_000 {
            return Err(Error::Infeasible(format!("could not place {k} centers {min_dist} apart in {d} dims")));
        }
        let c: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * side).collect();
        if centers.iter().all(|o| crate::numeric::dist(o, &c) >= min_dist) {
            centers.push(c);
        }
    }
    Ok(centers)
}

/// Split `n` into `k` sizes differing by at most one.
pub(crate) fn even_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn blob_problem(spec: &BlobSpec, index: usize) -> Result<Dataset> {
    let mut rng = seed::rng(seed::mix(spec.seed, index as u64));
    let n = rng.random_range(spec.points.0..=spec.points.1);
    let d = rng.random_range(spec.dims.0..=spec.dims.1);
    let k = rng.random_range(spec.clusters.0..=spec.clusters.1);
    let centers = place_centers(&mut rng, k, d, spec.separation * spec.sigma)?;

    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (c, size) in even_sizes(n, k).into_iter().enumerate() {
        for _ in 0..size {
            data.extend(centers[c].iter().map(|&m| m + spec.sigma * gaussian(&mut rng)));
            labels.push(c);
        }
    }

    let m = outlier_count(spec.outlier_fraction, n);
    if m > 0 {
        let mid: Vec<f64> = (0..d).map(|j| centers.iter().map(|c| c[j]).sum::<f64>() / k as f64).collect();
        for i in sample(&mut rng, n, m).into_vec() {
            let c = &centers[labels[i]];
            let mut dir: Vec<f64> = c.iter().zip(&mid).map(|(a, b)| a - b).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                dir.iter_mut().for_each(|x| *x /= norm);
            } else {
                dir = random_unit(&mut rng, d);
            }
            let reach = spec.outlier_distance * spec.sigma;
            for j in 0..d {
                data[i * d + j] = c[j] + dir[j] * reach + spec.sigma * gaussian(&mut rng);
            }
        }
    }

    let id = format!("blobs_{index:04}");
    Dataset::new(id.clone(), id, PointMatrix::new(n, d, data)?, Some(labels))
}

pub fn blob_datasets(spec: &BlobSpec) -> Result<Vec<Dataset>> {
    spec.validate()?;
    (0..spec.problems).map(|i| blob_problem(spec, i)).collect()
}

/// Repository of Gaussian-blob problems whose ground truth is blob membership.
pub fn make_synthetic_repository(spec: &BlobSpec) -> Result<MetaRepository> {
    MetaRepository::from_datasets(blob_datasets(spec)?, spec.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let spec = BlobSpec { problems: 3, ..Default::default() };
        assert_eq!(make_synthetic_repository(&spec).unwrap(), make_synthetic_repository(&spec).unwrap());
    }

    #[test]
    fn planted_outlier_count() {
        let spec = BlobSpec { problems: 4, points: (200, 200), outlier_fraction: 0.01, ..Default::default() };
        assert_eq!(outlier_count(0.01, 200), 2);
        for d in blob_datasets(&spec).unwrap() {
            // outliers are the only points far from every blob mean
            let labels = d.labels().unwrap();
            let k = d.n_classes().unwrap();
            let pts = d.points();
            let mut means = vec![vec![0.0; d.d()]; k];
            let mut counts = vec![0usize; k];
            for (i, r) in pts.iter_rows().enumerate() {
                counts[labels[i]] += 1;
                for j in 0..d.d() {
                    means[labels[i]][j] += r[j];
                }
            }
            let far = pts
                .iter_rows()
                .enumerate()
                .filter(|(i, r)| {
                    let m: Vec<f64> = means[labels[*i]].iter().map(|s| s / counts[labels[*i]] as f64).collect();
                    crate::numeric::dist(r, &m) > 30.0
                })
                .count();
            assert_eq!(far, 2);
        }
    }

    #[test]
    fn infeasible_specs() {
        let s = BlobSpec { clusters: (2, 50), points: (10, 10), ..Default::default() };
        assert!(blob_datasets(&s).is_err());
        let s = BlobSpec { clusters: (1, 2), ..Default::default() };
        assert!(blob_datasets(&s).is_err());
    }
}
