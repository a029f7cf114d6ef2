//! Base clustering algorithms and their wrappers.

mod agglomerative;
mod kmeans;
mod outliers;
mod threshold;

use serde::{Deserialize, Serialize};

pub use agglomerative::{agglomerative, Linkage};
pub use kmeans::{kmeans, kmeans_plus_plus, lloyd, LloydOutcome};
pub use outliers::{cluster_with_outlier_removal, outlier_indices, reattach, OutlierCriterion};
pub use threshold::single_linkage_threshold;

use crate::data_model::{normalize_points, Partition, PointMatrix};
use crate::error::{Error, Result};
use crate::numeric::sq_dist;

/// Output of a point clusterer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub partition: Partition,
    /// Arithmetic mean of each part, in the input space.
    pub centers: Vec<Vec<f64>>,
    /// Sum of squared distances to assigned centers; k-means only.
    pub inertia: Option<f64>,
}

impl ClusterResult {
    /// Build from a full assignment with every cluster id `0..k` in use.
    pub fn from_assignment(points: &PointMatrix, assignment: &[usize], with_inertia: bool) -> Self {
        let partition = Partition::from_assignment(assignment);
        let centers = part_means(points, &partition);
        let inertia = with_inertia.then(|| {
            partition
                .parts()
                .iter()
                .zip(&centers)
                .map(|(part, c)| part.iter().map(|&i| sq_dist(points.row(i), c)).sum::<f64>())
                .sum()
        });
        Self { partition, centers, inertia }
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.partition.assignment().expect("cluster results cover every point")
    }
}

pub(crate) fn part_means(points: &PointMatrix, partition: &Partition) -> Vec<Vec<f64>> {
    partition
        .parts()
        .iter()
        .map(|part| {
            let mut c = vec![0.0; points.cols()];
            for &i in part {
                for (m, v) in c.iter_mut().zip(points.row(i)) {
                    *m += v;
                }
            }
            c.iter_mut().for_each(|m| *m /= part.len() as f64);
            c
        })
        .collect()
}

/// Index of the nearest center; ties go to the lowest index.
pub(crate) fn nearest_center(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClustererKind {
    Kmeans,
    AggloSingle,
    AggloComplete,
    AggloAverage,
    AggloWard,
}

impl ClustererKind {
    pub const ALL: [ClustererKind; 5] = [
        ClustererKind::Kmeans,
        ClustererKind::AggloSingle,
        ClustererKind::AggloComplete,
        ClustererKind::AggloAverage,
        ClustererKind::AggloWard,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ClustererKind::Kmeans => "kmeans",
            ClustererKind::AggloSingle => "single",
            ClustererKind::AggloComplete => "complete",
            ClustererKind::AggloAverage => "average",
            ClustererKind::AggloWard => "ward",
        }
    }
}

/// One member of a clustering family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClustererSpec {
    pub kind: ClustererKind,
    pub k: usize,
    /// Standardize columns before clustering (the "-N" variants).
    pub normalize_first: bool,
    pub restarts: usize,
    pub seed: u64,
}

impl ClustererSpec {
    pub fn new(kind: ClustererKind, k: usize) -> Self {
        Self { kind, k, normalize_first: false, restarts: 10, seed: 0 }
    }

    pub fn normalized(mut self, yes: bool) -> Self {
        self.normalize_first = yes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn name(&self) -> String {
        let base = self.kind.short_name();
        if self.normalize_first {
            format!("{base}-N")
        } else {
            base.to_string()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {}", self.k)));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        Ok(())
    }

    /// Cluster the rows of `points`. Centers are always reported in the input space.
    pub fn cluster(&self, points: &PointMatrix) -> Result<ClusterResult> {
        self.validate()?;
        let normalized;
        let work = if self.normalize_first {
            normalized = normalize_points(points);
            &normalized
        } else {
            points
        };
        let result = match self.kind {
            ClustererKind::Kmeans => kmeans(work, self.k, self.restarts, self.seed)?,
            ClustererKind::AggloSingle => agglomerative(work, self.k, Linkage::Single)?,
            ClustererKind::AggloComplete => agglomerative(work, self.k, Linkage::Complete)?,
            ClustererKind::AggloAverage => agglomerative(work, self.k, Linkage::Average)?,
            ClustererKind::AggloWard => agglomerative(work, self.k, Linkage::Ward)?,
        };
        if self.normalize_first {
            let assignment = result.assignment();
            Ok(ClusterResult::from_assignment(points, &assignment, result.inertia.is_some()))
        } else {
            Ok(result)
        }
    }
}

/// The ten-member family: every kind, raw and normalized.
pub fn standard_family(k: usize, seed: u64) -> Vec<ClustererSpec> {
    let mut out = Vec::with_capacity(10);
    for kind in ClustererKind::ALL {
        for norm in [false, true] {
            out.push(ClustererSpec::new(kind, k).normalized(norm).with_seed(seed));
        }
    }
    out
}
