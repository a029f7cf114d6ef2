use std::io::Write;

use crate::data_model::io::fmt_f64;
use crate::data_model::Dataset;
use crate::error::{Error, Result};

/// Coordinates per point after zero padding.
pub const PAD: usize = 10;
/// Upper triangle (with diagonal) of a `PAD x PAD` matrix.
pub const COV_LEN: usize = PAD * (PAD + 1) / 2;
pub const FEATURE_LEN: usize = 2 * PAD + COV_LEN;

/// A labeled pair of rows from one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PairExample {
    pub features: Vec<f64>,
    /// 1 when both rows share a class.
    pub label: u8,
    pub dataset_id: String,
    pub i: usize,
    pub j: usize,
}

impl PairExample {
    /// The same pair in the opposite order.
    pub fn swapped(&self) -> PairExample {
        PairExample {
            features: swap_blocks(&self.features),
            label: self.label,
            dataset_id: self.dataset_id.clone(),
            i: self.j,
            j: self.i,
        }
    }
}

/// Exchange the two point blocks of a feature vector.
pub fn swap_blocks(f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    out.extend_from_slice(&f[PAD..2 * PAD]);
    out.extend_from_slice(&f[..PAD]);
    out.extend_from_slice(&f[2 * PAD..]);
    out
}

/// Builds pair features for one dataset; the covariance block is computed once.
#[derive(Debug, Clone)]
pub struct PairFeaturizer<'a> {
    x: &'a Dataset,
    cov: Vec<f64>,
}

impl<'a> PairFeaturizer<'a> {
    /// `x` is expected to be column-normalized already.
    pub fn new(x: &'a Dataset) -> Result<Self> {
        let d = x.d();
        if d > PAD {
            return Err(Error::InvalidArgument(format!("pair features support at most {PAD} columns, {} has {d}", x.id)));
        }
        let c = x.points().covariance();
        let mut cov = Vec::with_capacity(COV_LEN);
        for a in 0..PAD {
            for b in a..PAD {
                cov.push(if a < d && b < d { c[a * d + b] } else { 0.0 });
            }
        }
        Ok(Self { x, cov })
    }

    pub fn covariance_block(&self) -> &[f64] {
        &self.cov
    }

    pub fn features(&self, i: usize, j: usize) -> Vec<f64> {
        let mut f = vec![0.0; FEATURE_LEN];
        f[..self.x.d()].copy_from_slice(self.x.points().row(i));
        f[PAD..PAD + self.x.d()].copy_from_slice(self.x.points().row(j));
        f[2 * PAD..].copy_from_slice(&self.cov);
        f
    }

    pub fn example(&self, i: usize, j: usize) -> Result<PairExample> {
        if i == j || i >= self.x.n() || j >= self.x.n() {
            return Err(Error::InvalidArgument(format!("bad pair ({i}, {j}) for {} rows", self.x.n())));
        }
        let labels = self.x.labels().ok_or_else(|| Error::InvalidArgument(format!("{} has no labels", self.x.id)))?;
        Ok(PairExample {
            features: self.features(i, j),
            label: u8::from(labels[i] == labels[j]),
            dataset_id: self.x.id.clone(),
            i,
            j,
        })
    }
}

/// Features and label of rows `i` and `j` of a normalized, labeled dataset.
pub fn build_pair_features(x: &Dataset, i: usize, j: usize) -> Result<PairExample> {
    PairFeaturizer::new(x)?.example(i, j)
}

/// Columns `f0..f74`, then `label` and `dataset_id`.
pub fn write_pairs_csv<W: Write>(pairs: &[PairExample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..FEATURE_LEN).map(|c| format!("f{c}")).collect();
    header.extend(["label".to_string(), "dataset_id".to_string()]);
    w.write_record(&header)?;
    for p in pairs {
        let mut row: Vec<String> = p.features.iter().map(|&v| fmt_f64(v)).collect();
        row.push(p.label.to_string());
        row.push(p.dataset_id.clone());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
