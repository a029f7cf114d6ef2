use std::path::{Path, PathBuf};

use super::{create_file, data_err, CliError, CliResult};
use crate::data_model::io::fmt_f64;
use crate::meta_pipelines::write_table;

/// Statistics of every metric column within one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub key: Vec<String>,
    pub n: usize,
    /// `(mean, sample standard deviation, 95% half-width)` per metric.
    pub stats: Vec<(f64, f64, f64)>,
}

/// Group rows by `key_cols` (in order of first appearance) and summarize the
/// `metric_cols` of each group. The half-width uses the normal quantile 1.96.
pub fn summarize(rows: &[Vec<f64>], keys: &[Vec<String>], n_metrics: usize) -> Vec<GroupSummary> {
    let mut order: Vec<Vec<String>> = Vec::new();
    for k in keys {
        if !order.contains(k) {
            order.push(k.clone());
        }
    }
    order
        .into_iter()
        .map(|key| {
            let members: Vec<&Vec<f64>> = rows.iter().zip(keys).filter(|(_, k)| **k == key).map(|(r, _)| r).collect();
            let n = members.len();
            let stats = (0..n_metrics)
                .map(|m| {
                    let vals: Vec<f64> = members.iter().map(|r| r[m]).collect();
                    let mean = vals.iter().sum::<f64>() / n as f64;
                    let sd = if n > 1 { (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt() } else { 0.0 };
                    (mean, sd, 1.96 * sd / (n as f64).sqrt())
                })
                .collect();
            GroupSummary { key, n, stats }
        })
        .collect()
}

fn read_csv(path: &PathBuf) -> CliResult<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rdr.headers().map_err(|e| CliError::data(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

pub(crate) fn run_report(inputs: &[PathBuf], group_by: &[String], out: &Path) -> CliResult<()> {
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for path in inputs {
        let (h, r) = read_csv(path)?;
        match &header {
            None => header = Some(h),
            Some(prev) if *prev != h => return Err(CliError::data(format!("{} has a different header", path.display()))),
            Some(_) => {}
        }
        rows.extend(r);
    }
    let header = header.unwrap_or_default();
    if rows.is_empty() {
        return Err(CliError::data("no data rows in the inputs"));
    }
    let group_cols: Vec<String> = if group_by.is_empty() {
        ["train_frac", "p"].iter().filter(|c| header.iter().any(|h| h == *c)).map(|c| c.to_string()).collect()
    } else {
        group_by.to_vec()
    };
    let group_idx: Vec<usize> = group_cols
        .iter()
        .map(|c| header.iter().position(|h| h == c).ok_or_else(|| CliError::config(format!("no column named {c}"))))
        .collect::<CliResult<_>>()?;
    let metric_idx: Vec<usize> = (0..header.len())
        .filter(|i| !group_idx.contains(i) && header[*i] != "repeat")
        .filter(|&i| rows.iter().all(|r| r.get(i).is_some_and(|v| v.parse::<f64>().is_ok())))
        .collect();
    if metric_idx.is_empty() {
        return Err(CliError::data("no numeric columns to summarize"));
    }
    let keys: Vec<Vec<String>> = rows.iter().map(|r| group_idx.iter().map(|&i| r[i].clone()).collect()).collect();
    let values: Vec<Vec<f64>> = rows.iter().map(|r| metric_idx.iter().map(|&i| r[i].parse().expect("checked numeric")).collect()).collect();
    let groups = summarize(&values, &keys, metric_idx.len());

    let mut out_header = group_cols.clone();
    out_header.push("n".into());
    for &i in &metric_idx {
        for s in ["mean", "std", "ci95"] {
            out_header.push(format!("{}_{s}", header[i]));
        }
    }
    let cells: Vec<Vec<String>> = groups
        .iter()
        .map(|g| {
            let mut c = g.key.clone();
            c.push(g.n.to_string());
            for &(m, s, h) in &g.stats {
                c.extend([fmt_f64(m), fmt_f64(s), fmt_f64(h)]);
            }
            c
        })
        .collect();
    data_err(write_table(&out_header, &cells, create_file(out, "report.csv")?))?;
    println!("{} groups summarized", groups.len());
    Ok(())
}
