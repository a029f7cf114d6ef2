use serde::{Deserialize, Serialize};

use super::{nearest_center, ClusterResult, ClustererSpec};
use crate::data_model::PointMatrix;
use crate::error::{Error, Result};
use crate::numeric::sq_dist;

/// How points are ranked for removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutlierCriterion {
    /// Euclidean distance from the data mean.
    #[default]
    DistanceFromMean,
    /// Euclidean norm of the raw point.
    Norm,
}

/// Number of points set aside for a fraction `theta` of `n`.
pub fn outlier_count(theta: f64, n: usize) -> usize {
    // tolerate representation error such as 0.29 * 100 = 28.999999999999996
    (theta * n as f64 + 1e-9).floor() as usize
}

/// Indices of the `floor(theta * n)` most outlying points, most outlying
/// first; equal scores rank the lower index first.
pub fn outlier_indices(points: &PointMatrix, theta: f64, criterion: OutlierCriterion) -> Vec<usize> {
    let n = points.rows();
    let m = outlier_count(theta, n);
    if m == 0 {
        return Vec::new();
    }
    let origin = match criterion {
        OutlierCriterion::DistanceFromMean => points.column_means(),
        OutlierCriterion::Norm => vec![0.0; points.cols()],
    };
    let score: Vec<f64> = points.iter_rows().map(|r| sq_dist(r, &origin)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    order.truncate(m);
    order
}

/// Extend a clustering of the inliers to every point: each removed point joins
/// the part whose center is nearest. `inlier_result` indexes the inliers in
/// ascending original order.
pub fn reattach(points: &PointMatrix, removed: &[usize], inlier_result: &ClusterResult) -> Vec<usize> {
    let n = points.rows();
    let mut is_removed = vec![false; n];
    for &i in removed {
        is_removed[i] = true;
    }
    let inlier_assign = inlier_result.assignment();
    let mut out = vec![0usize; n];
    let mut next_inlier = 0;
    for i in 0..n {
        if is_removed[i] {
            out[i] = nearest_center(points.row(i), &inlier_result.centers).0;
        } else {
            out[i] = inlier_assign[next_inlier];
            next_inlier += 1;
        }
    }
    out
}

/// Cluster after setting aside the `floor(theta * n)` points furthest from
/// the mean, then attach each of them to the nearest resulting center.
pub fn cluster_with_outlier_removal(
    points: &PointMatrix,
    theta: f64,
    base: &ClustererSpec,
    criterion: OutlierCriterion,
) -> Result<ClusterResult> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta must lie in [0,1), got {theta}")));
    }
    let n = points.rows();
    let removed = outlier_indices(points, theta, criterion);
    if removed.is_empty() {
        return base.cluster(points);
    }
    if removed.len() + 2 > n || n - removed.len() < base.k {
        return Err(Error::Infeasible(format!(
            "removing {} of {n} points leaves too few for k = {}",
            removed.len(),
            base.k
        )));
    }
    let mut keep = vec![true; n];
    for &i in &removed {
        keep[i] = false;
    }
    let inliers: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    let inlier_result = base.cluster(&points.select_rows(&inliers))?;
    let assignment = reattach(points, &removed, &inlier_result);
    Ok(ClusterResult::from_assignment(points, &assignment, inlier_result.inertia.is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusterers::ClustererKind;

    fn line(xs: &[f64]) -> PointMatrix {
        PointMatrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn theta_zero_matches_base() {
        let p = line(&[0.0, 0.3, 5.0, 5.2, 9.0, 9.1]);
        let base = ClustererSpec::new(ClustererKind::Kmeans, 3).with_seed(4);
        let direct = base.cluster(&p).unwrap();
        let wrapped = cluster_with_outlier_removal(&p, 0.0, &base, OutlierCriterion::DistanceFromMean).unwrap();
        assert_eq!(direct, wrapped);
    }

    #[test]
    fn far_point_removed_and_reattached() {
        let p = line(&[0.0, 0.1, 0.2, 100.0]);
        assert_eq!(outlier_indices(&p, 0.25, OutlierCriterion::DistanceFromMean), vec![3]);
        let base = ClustererSpec::new(ClustererKind::AggloSingle, 2);
        let r = cluster_with_outlier_removal(&p, 0.25, &base, OutlierCriterion::DistanceFromMean).unwrap();
        assert!(r.partition.is_valid());
        // inliers {0,0.1} | {0.2}; 100 joins the nearer center 0.2
        let a = r.assignment();
        assert_eq!(a[3], a[2]);
        assert_ne!(a[0], a[2]);
    }

    #[test]
    fn criteria_differ_on_uncentered_data() {
        let p = line(&[10.0, 11.0, 12.0, 13.0, 14.0, 5.0]);
        assert_eq!(outlier_indices(&p, 0.2, OutlierCriterion::DistanceFromMean), vec![5]);
        assert_eq!(outlier_indices(&p, 0.34, OutlierCriterion::DistanceFromMean), vec![5, 4]);
        assert_eq!(outlier_indices(&p, 0.2, OutlierCriterion::Norm), vec![4]);
        assert_eq!(outlier_count(0.29, 100), 29);
    }

    #[test]
    fn too_many_outliers() {
        let p = line(&[0.0, 1.0, 2.0, 3.0]);
        let base = ClustererSpec::new(ClustererKind::Kmeans, 2);
        assert!(cluster_with_outlier_removal(&p, 0.75, &base, OutlierCriterion::DistanceFromMean).is_err());
        assert!(cluster_with_outlier_removal(&p, 1.0, &base, OutlierCriterion::DistanceFromMean).is_err());
    }
}
