//! Least-squares regression and problem meta-features.

use serde::{Deserialize, Serialize};

use crate::data_model::{Partition, PointMatrix};
use crate::error::{Error, Result};
use crate::metrics::{silhouette_with_distances, DistanceMatrix};

const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), got: x.len() });
        }
        Ok(self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.intercept)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: LinearModel = serde_json::from_str(s)?;
        if !m.intercept.is_finite() || m.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("model coefficients must be finite".into()));
        }
        Ok(m)
    }
}

pub fn predict(model: &LinearModel, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

/// Ordinary least squares with an intercept.
///
/// Columns are centered and scaled to unit norm before forming the normal
/// equations; if those are numerically singular a ridge of `1e-8` is added
/// to the diagonal. Constant columns get weight 0.
pub fn fit_least_squares(features: &[Vec<f64>], targets: &[f64]) -> Result<LinearModel> {
    let n = features.len();
    if n == 0 {
        return Err(Error::InvalidArgument("least squares needs at least one sample".into()));
    }
    if targets.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: targets.len() });
    }
    let p = features[0].len();
    if let Some(bad) = features.iter().find(|r| r.len() != p) {
        return Err(Error::DimensionMismatch { expected: p, got: bad.len() });
    }
    if features.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("least squares inputs must be finite".into()));
    }

    let nf = n as f64;
    let y_mean = targets.iter().sum::<f64>() / nf;
    let x_mean: Vec<f64> = (0..p).map(|j| features.iter().map(|r| r[j]).sum::<f64>() / nf).collect();
    let scale: Vec<f64> = (0..p)
        .map(|j| features.iter().map(|r| (r[j] - x_mean[j]).powi(2)).sum::<f64>().sqrt())
        .collect();
    let cols: Vec<usize> = (0..p).filter(|&j| scale[j] > 0.0).collect();
    let q = cols.len();

    let mut a = vec![0.0; q * q];
    let mut b = vec![0.0; q];
    let mut z = vec![0.0; q];
    for (row, &y) in features.iter().zip(targets) {
        for (t, &j) in cols.iter().enumerate() {
            z[t] = (row[j] - x_mean[j]) / scale[j];
        }
        let yc = y - y_mean;
        for s in 0..q {
            b[s] += z[s] * yc;
            for t in s..q {
                a[s * q + t] += z[s] * z[t];
            }
        }
    }
    for s in 0..q {
        for t in 0..s {
            a[s * q + t] = a[t * q + s];
        }
    }
    let v = match cholesky_solve(&a, &b, q, 0.0) {
        Some(v) => v,
        None => cholesky_solve(&a, &b, q, RIDGE)
            .ok_or_else(|| Error::Infeasible("normal equations are not positive definite".into()))?,
    };

    let mut weights = vec![0.0; p];
    for (t, &j) in cols.iter().enumerate() {
        weights[j] = v[t] / scale[j];
    }
    let intercept = y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
    Ok(LinearModel { weights, intercept })
}

/// Solve `(A + ridge I) x = b`; `None` if a pivot is not comfortably positive.
fn cholesky_solve(a: &[f64], b: &[f64], q: usize, ridge: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; q * q];
    for i in 0..q {
        for j in 0..=i {
            let mut s = a[i * q + j] + if i == j { ridge } else { 0.0 };
            for k in 0..j {
                s -= l[i * q + k] * l[j * q + k];
            }
            if i == j {
                // unit-diagonal system: pivots below 1e-10 mean near-collinear columns
                let tol = if ridge == 0.0 { 1e-10 } else { 0.0 };
                if s <= tol {
                    return None;
                }
                l[i * q + i] = s.sqrt();
            } else {
                l[i * q + j] = s / l[j * q + j];
            }
        }
    }
    let mut y = vec![0.0; q];
    for i in 0..q {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * q + k] * y[k];
        }
        y[i] = s / l[i * q + i];
    }
    let mut x = vec![0.0; q];
    for i in (0..q).rev() {
        let mut s = y[i];
        for k in i + 1..q {
            s -= l[k * q + i] * x[k];
        }
        x[i] = s / l[i * q + i];
    }
    Some(x)
}

/// All eigenvalues of a symmetric `d x d` row-major matrix, ascending, by
/// cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(s: &[f64], d: usize) -> Result<Vec<f64>> {
    if s.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, got: s.len() });
    }
    for i in 0..d {
        for j in i + 1..d {
            if (s[i * d + j] - s[j * d + i]).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i},{j})")));
            }
        }
    }
    let mut a = s.to_vec();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let off = |a: &[f64]| -> f64 {
        let mut t = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    t += a[i * d + j] * a[i * d + j];
                }
            }
        }
        t.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) <= 1e-12 * norm {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - sn * akq;
                    a[k * d + q] = sn * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - sn * aqk;
                    a[q * d + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn symmetric_eigen_extrema(s: &[f64], d: usize) -> Result<(f64, f64)> {
    if d == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let ev = symmetric_eigenvalues(s, d)?;
    Ok((ev[0], ev[d - 1]))
}

/// Meta-features of a dataset and one of its clusterings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiFeatures {
    pub d: usize,
    pub m: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sil: f64,
}

impl PhiFeatures {
    pub const LEN: usize = 5;

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.d as f64, self.m as f64, self.sigma_min, self.sigma_max, self.sil]
    }
}

/// Covariance eigen-extrema of a point matrix (population covariance).
pub fn covariance_extrema(points: &PointMatrix) -> Result<(f64, f64)> {
    let (lo, hi) = symmetric_eigen_extrema(&points.covariance(), points.cols())?;
    if lo < -1e-9 * hi.abs().max(1.0) {
        return Err(Error::Infeasible(format!("covariance has negative eigenvalue {lo}")));
    }
    Ok((lo.max(0.0), hi))
}

pub fn phi_features(points: &PointMatrix, c: &Partition) -> Result<PhiFeatures> {
    let dm = DistanceMatrix::new(points);
    let extrema = covariance_extrema(points)?;
    phi_features_cached(points, &dm, extrema, c)
}

/// As [`phi_features`], reusing distances and covariance extrema computed once per dataset.
pub fn phi_features_cached(
    points: &PointMatrix,
    dm: &DistanceMatrix,
    (sigma_min, sigma_max): (f64, f64),
    c: &Partition,
) -> Result<PhiFeatures> {
    let sil = silhouette_with_distances(dm, c)?;
    Ok(PhiFeatures { d: points.cols(), m: points.rows(), sigma_min, sigma_max, sil })
}
