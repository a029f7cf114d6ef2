//! Dataset CSV and repository manifest formats.
//!
//! Dataset CSV: UTF-8, header row, feature columns `f0..f{d-1}` in order and an
//! optional final `label` column of non-negative integers. Manifest: a JSON
//! array of `{"id", "path", "has_labels"}` objects; `path` is resolved
//! relative to the manifest's directory.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dataset, MetaRepository, PointMatrix};
use crate::error::{Error, Result};

/// Float formatting used by every file writer: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn load_dataset_csv(path: impl AsRef<Path>, has_labels: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset").to_string();
    let file = File::open(path)?;
    read_dataset_csv(BufReader::new(file), has_labels, &stem)
}

pub fn read_dataset_csv<R: std::io::Read>(reader: R, has_labels: bool, id: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let label_col = header.iter().position(|h| h == "label");
    if let Some(lc) = label_col {
        if lc != header.len() - 1 {
            return Err(Error::Parse { line: 1, msg: "`label` must be the final column".into() });
        }
    }
    if has_labels && label_col.is_none() {
        return Err(Error::Parse { line: 1, msg: "missing `label` column".into() });
    }
    let d = label_col.unwrap_or(header.len());
    for (j, h) in header.iter().take(d).enumerate() {
        if h != format!("f{j}") {
            return Err(Error::Parse { line: 1, msg: format!("expected column `f{j}`, found `{h}`") });
        }
    }

    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let line = r + 2;
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Parse { line, msg: format!("expected {} cells, found {}", header.len(), rec.len()) });
        }
        for cell in rec.iter().take(d) {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("non-numeric feature `{cell}`") })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, msg: format!("non-finite feature `{cell}`") });
            }
            data.push(v);
        }
        if has_labels {
            let cell = &rec[d];
            let l: usize = cell.parse().map_err(|_| Error::Label(format!("line {line}: label `{cell}` is not a non-negative integer")))?;
            labels.push(l);
        }
    }
    let n = data.len() / d.max(1);
    let points = PointMatrix::new(n, d, data)?;
    let labels = has_labels.then_some(labels);
    Dataset::new(id, id, points, labels).map_err(|e| match e {
        Error::Label(_) => e,
        other => Error::Parse { line: 0, msg: other.to_string() },
    })
}

pub fn write_dataset_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    write_dataset(dataset, &mut f)?;
    f.flush()?;
    Ok(())
}

pub fn write_dataset<W: Write>(dataset: &Dataset, out: &mut W) -> Result<()> {
    let d = dataset.d();
    let mut header: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
    if dataset.labels().is_some() {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, row) in dataset.points().iter_rows().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        if let Some(l) = dataset.labels() {
            cells.push(l[i].to_string());
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub has_labels: bool,
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

/// Resolve a repository location: either a manifest file or a directory holding `manifest.json`.
pub fn manifest_path(repo: impl AsRef<Path>) -> PathBuf {
    let repo = repo.as_ref();
    if repo.is_dir() {
        repo.join("manifest.json")
    } else {
        repo.to_path_buf()
    }
}

/// Load every dataset listed in a manifest, in manifest order.
pub fn load_datasets(repo: impl AsRef<Path>) -> Result<Vec<Dataset>> {
    let manifest = manifest_path(repo);
    let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    read_manifest(&manifest)?
        .into_iter()
        .map(|e| {
            let mut d = load_dataset_csv(base.join(&e.path), e.has_labels)?;
            d.id = e.id.clone();
            d.name = e.id;
            Ok(d)
        })
        .collect()
}

/// Load a labeled repository (every manifest entry must carry labels).
pub fn load_repository(repo: impl AsRef<Path>, seed: u64) -> Result<MetaRepository> {
    MetaRepository::from_datasets(load_datasets(repo)?, seed)
}

/// Write datasets as `<id>.csv` plus `manifest.json` into `dir`.
pub fn write_repository_files(datasets: &[Dataset], dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut manifest = Vec::with_capacity(datasets.len());
    for d in datasets {
        let file = format!("{}.csv", d.id);
        write_dataset_csv(d, dir.join(&file))?;
        manifest.push(ManifestEntry { id: d.id.clone(), path: file, has_labels: d.labels().is_some() });
    }
    let path = dir.join("manifest.json");
    let mut f = File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    writeln!(f)?;
    Ok(path)
}
