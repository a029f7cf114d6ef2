use crate::error::{Error, Result};

/// Dense row-major `n x d` matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PointMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at row {}, column {}",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// New matrix made of the selected rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> PointMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        PointMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<PointMatrix> {
        PointMatrix::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.cols];
        for r in self.iter_rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.rows.max(1) as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Population covariance matrix (divide by n), row-major `d x d`.
    pub fn covariance(&self) -> Vec<f64> {
        let d = self.cols;
        let mean = self.column_means();
        let mut cov = vec![0.0; d * d];
        let mut centered = vec![0.0; d];
        for r in self.iter_rows() {
            for j in 0..d {
                centered[j] = r[j] - mean[j];
            }
            for a in 0..d {
                for b in a..d {
                    cov[a * d + b] += centered[a] * centered[b];
                }
            }
        }
        let n = self.rows.max(1) as f64;
        for a in 0..d {
            for b in a..d {
                let v = cov[a * d + b] / n;
                cov[a * d + b] = v;
                cov[b * d + a] = v;
            }
        }
        cov
    }
}

/// A numeric dataset with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub id: String,
    pub name: String,
    points: PointMatrix,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Labels, when present, must use every class id `0..K` with `K >= 2`.
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        points: PointMatrix,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if points.rows() < 2 {
            return Err(Error::InvalidArgument(format!("dataset needs at least 2 rows, got {}", points.rows())));
        }
        if points.cols() < 1 {
            return Err(Error::InvalidArgument("dataset needs at least 1 feature".into()));
        }
        if let Some(l) = &labels {
            if l.len() != points.rows() {
                return Err(Error::DimensionMismatch { expected: points.rows(), got: l.len() });
            }
            check_labels(l)?;
        }
        Ok(Self { id: id.into(), name: name.into(), points, labels })
    }

    pub fn points(&self) -> &PointMatrix {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn n(&self) -> usize {
        self.points.rows()
    }

    pub fn d(&self) -> usize {
        self.points.cols()
    }

    pub fn n_classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    pub fn without_labels(&self) -> Dataset {
        Dataset { labels: None, ..self.clone() }
    }
}

pub(crate) fn check_labels(labels: &[usize]) -> Result<()> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::Label("labels must contain at least two classes".into()));
    }
    let mut seen = vec![false; k];
    for &l in labels {
        seen[l] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Label(format!("class id {missing} does not occur (ids must be 0..{k})")));
    }
    Ok(())
}

/// Zero-mean, unit population variance columns; constant columns become zero.
pub fn normalize_points(points: &PointMatrix) -> PointMatrix {
    let (n, d) = (points.rows(), points.cols());
    if n == 0 {
        return points.clone();
    }
    let mean = points.column_means();
    let mut std = vec![0.0; d];
    for r in points.iter_rows() {
        for j in 0..d {
            std[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
        }
    }
    for (j, s) in std.iter_mut().enumerate() {
        let first = points.row(0)[j];
        let constant = points.iter_rows().all(|r| r[j] == first);
        *s = if constant { 0.0 } else { (*s / n.max(1) as f64).sqrt() };
    }
    let mut data = Vec::with_capacity(n * d);
    for r in points.iter_rows() {
        for j in 0..d {
            data.push(if std[j] > 0.0 { (r[j] - mean[j]) / std[j] } else { 0.0 });
        }
    }
    PointMatrix { rows: n, cols: d, data }
}

pub fn normalize_dataset(x: &Dataset) -> Dataset {
    Dataset { points: normalize_points(&x.points), ..x.clone() }
}
