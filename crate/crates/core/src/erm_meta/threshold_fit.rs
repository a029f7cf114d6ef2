use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::clusterers::single_linkage_threshold;
use crate::data_model::io::fmt_f64;
use crate::data_model::{Partition, WeightedGraph};
use crate::error::{Error, Result};
use crate::metrics::clustering_loss;
use crate::numeric::{exact_sum, ExactSum};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFitResult {
    pub r_star: f64,
    pub min_mean_loss: f64,
    /// `(r, mean loss of single linkage at <= r)` in increasing `r`.
    pub profile: Vec<(f64, f64)>,
}

impl ThresholdFitResult {
    fn from_profile(profile: Vec<(f64, f64)>) -> Self {
        let mut best = 0;
        for (i, &(_, l)) in profile.iter().enumerate() {
            if l < profile[best].1 {
                best = i;
            }
        }
        Self { r_star: profile[best].0, min_mean_loss: profile[best].1, profile }
    }
}

pub fn write_profile_csv<W: Write>(res: &ThresholdFitResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "mean_loss"])?;
    for &(r, l) in &res.profile {
        w.write_record([fmt_f64(r), fmt_f64(l)])?;
    }
    w.flush()?;
    Ok(())
}

fn check_train(train: &[(WeightedGraph, Partition)]) -> Result<()> {
    if train.is_empty() {
        return Err(Error::InvalidArgument("threshold fitting needs a non-empty training set".into()));
    }
    for (i, (g, y)) in train.iter().enumerate() {
        if !y.is_valid_for(g.n_vertices()) {
            return Err(Error::InvalidPartition(format!("truth of training graph {i} is not a valid clustering of its vertices")));
        }
    }
    Ok(())
}

/// Candidate thresholds: one value below every weight, then the distinct weights ascending.
fn candidates(train: &[(WeightedGraph, Partition)]) -> Vec<f64> {
    let mut ws: Vec<f64> = train.iter().flat_map(|(g, _)| g.edges().iter().map(|e| e.2)).collect();
    ws.sort_by(f64::total_cmp);
    ws.dedup();
    std::iter::once(candidates_below(ws.first().copied())).chain(ws).collect()
}

/// Recomputes every graph's components at every candidate threshold.
pub fn fit_threshold_bruteforce(train: &[(WeightedGraph, Partition)]) -> Result<ThresholdFitResult> {
    check_train(train)?;
    let g_count = train.len() as f64;
    let profile = candidates(train)
        .into_iter()
        .map(|r| {
            let losses = train.iter().map(|(g, y)| clustering_loss(g.n_vertices(), y, &single_linkage_threshold(g, r, false)));
            (r, exact_sum(losses) / g_count)
        })
        .collect();
    Ok(ThresholdFitResult::from_profile(profile))
}

struct GraphState {
    uf: UnionFind,
    hist: Vec<HashMap<usize, u64>>,
    /// Ordered pairs whose co-membership differs between truth and current components.
    disagree: u64,
    ordered_pairs: u64,
    loss: f64,
}

impl GraphState {
    fn new(g: &WeightedGraph, truth: &Partition) -> Self {
        let n = g.n_vertices();
        let mut hist = vec![HashMap::new(); n];
        for (label, part) in truth.parts().iter().enumerate() {
            for &v in part {
                hist[v].insert(label, 1);
            }
        }
        let same_truth: u64 = truth.parts().iter().map(|p| (p.len() as u64) * (p.len() as u64 - 1)).sum();
        let ordered_pairs = (n as u64) * (n as u64 - 1);
        let mut s = Self { uf: UnionFind::new(n), hist, disagree: same_truth, ordered_pairs, loss: 0.0 };
        s.loss = s.current_loss();
        s
    }

    fn current_loss(&self) -> f64 {
        if self.uf.components() < 2 {
            1.0
        } else {
            self.disagree as f64 / self.ordered_pairs as f64
        }
    }

    /// Returns true when the edge joined two components.
    fn merge(&mut self, u: usize, v: usize) -> bool {
        let Some((kept, absorbed)) = self.uf.union(u, v) else {
            return false;
        };
        let small = std::mem::take(&mut self.hist[absorbed]);
        let big = &mut self.hist[kept];
        let size_small: u64 = small.values().sum();
        let size_big: u64 = big.values().sum();
        let mut cross_same = 0u64;
        for (&label, &c) in &small {
            let e = big.entry(label).or_insert(0);
            cross_same += *e * c;
            *e += c;
        }
        let cross_diff = size_small * size_big - cross_same;
        // pairs split by truth now share a component; pairs joined by truth now agree
        self.disagree = self.disagree + 2 * cross_diff - 2 * cross_same;
        true
    }
}

/// Single sweep over all edges in weight order with one union-find per graph.
///
/// The running mean is kept as an exact sum so it is bit-identical to
/// [`fit_threshold_bruteforce`].
pub fn fit_threshold_kruskal(train: &[(WeightedGraph, Partition)]) -> Result<ThresholdFitResult> {
    check_train(train)?;
    let g_count = train.len() as f64;
    let mut states: Vec<GraphState> = train.iter().map(|(g, y)| GraphState::new(g, y)).collect();
    let mut total = ExactSum::new();
    for s in &states {
        total.add(s.loss);
    }

    // (weight order key, graph, u, v): compact entries keep the sort and sweep cache-friendly
    let mut order: Vec<(u64, u32, u32, u32)> = Vec::with_capacity(train.iter().map(|(g, _)| g.edges().len()).sum());
    for (gi, (g, _)) in train.iter().enumerate() {
        if g.n_vertices() > u32::MAX as usize || gi > u32::MAX as usize {
            return Err(Error::InvalidArgument("graph too large for the threshold sweep".into()));
        }
        order.extend(g.edges().iter().map(|&(u, v, w)| (weight_key(w), gi as u32, u as u32, v as u32)));
    }
    order.sort_unstable_by_key(|o| o.0);

    let below = candidates_below(order.first().map(|o| key_weight(o.0)));
    let mut profile = vec![(below, total.value() / g_count)];
    let mut i = 0;
    while i < order.len() {
        let w = key_weight(order[i].0);
        while i < order.len() && key_weight(order[i].0) == w {
            let (_, gi, u, v) = order[i];
            let (gi, u, v) = (gi as usize, u as usize, v as usize);
            let s = &mut states[gi];
            if s.merge(u, v) {
                let new = s.current_loss();
                if new != s.loss {
                    total.add(-s.loss);
                    total.add(new);
                    s.loss = new;
                }
            }
            i += 1;
        }
        profile.push((w, total.value() / g_count));
    }
    Ok(ThresholdFitResult::from_profile(profile))
}

/// Unsigned key whose order matches `f64::total_cmp`.
fn weight_key(w: f64) -> u64 {
    let b = w.to_bits();
    if b >> 63 == 1 { !b } else { b | (1 << 63) }
}

fn key_weight(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

fn candidates_below(min_w: Option<f64>) -> f64 {
    match min_w {
        Some(w) if w > 0.0 => w / 2.0,
        Some(_) => -1.0,
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::labels_to_partition;

    fn path_instance() -> (WeightedGraph, Partition) {
        let g = WeightedGraph::new(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 5.0)]).unwrap();
        (g, labels_to_partition(&[0, 0, 0, 1]).unwrap())
    }

    #[test]
    fn path_profile() {
        for fit in [fit_threshold_kruskal, fit_threshold_bruteforce] {
            let res = fit(&[path_instance()]).unwrap();
            assert_eq!(res.profile, vec![(0.5, 0.5), (1.0, 0.0), (5.0, 1.0)]);
            assert_eq!((res.r_star, res.min_mean_loss), (1.0, 0.0));
            let twice = fit(&[path_instance(), path_instance()]).unwrap();
            assert_eq!(twice, res);
        }
    }

    #[test]
    fn single_edge_collapses_to_invalid() {
        let g = WeightedGraph::new(2, vec![(0, 1, 3.0)]).unwrap();
        // truth {{0},{1}} is the only valid clustering of two vertices
        let y = labels_to_partition(&[0, 1]).unwrap();
        let res = fit_threshold_kruskal(&[(g.clone(), y.clone())]).unwrap();
        assert_eq!(res.profile, vec![(1.5, 0.0), (3.0, 1.0)]);
        assert_eq!(res.r_star, 1.5);
        assert_eq!(res, fit_threshold_bruteforce(&[(g, y)]).unwrap());
    }

    #[test]
    fn three_vertex_pair_truth() {
        // truth {{0,1},{2}}: merging 0-1 alone is perfect
        let g = WeightedGraph::new(3, vec![(0, 1, 2.0), (1, 2, 4.0)]).unwrap();
        let y = labels_to_partition(&[0, 0, 1]).unwrap();
        let res = fit_threshold_kruskal(&[(g.clone(), y.clone())]).unwrap();
        assert_eq!(res.profile, vec![(1.0, 2.0 / 6.0), (2.0, 0.0), (4.0, 1.0)]);
        assert_eq!(res, fit_threshold_bruteforce(&[(g, y)]).unwrap());
    }

    #[test]
    fn errors_and_csv() {
        assert!(fit_threshold_kruskal(&[]).is_err());
        assert!(fit_threshold_bruteforce(&[]).is_err());
        let (g, _) = path_instance();
        let bad = labels_to_partition(&[0, 1]).unwrap();
        assert!(fit_threshold_kruskal(&[(g, bad)]).is_err());

        let res = fit_threshold_kruskal(&[path_instance()]).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,mean_loss\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn zero_weight_edges() {
        let g = WeightedGraph::new(3, vec![(0, 1, 0.0), (1, 2, 2.0)]).unwrap();
        let y = labels_to_partition(&[0, 0, 1]).unwrap();
        let res = fit_threshold_kruskal(&[(g.clone(), y.clone())]).unwrap();
        assert_eq!(res.profile[0].0, -1.0);
        assert_eq!((res.r_star, res.min_mean_loss), (0.0, 0.0));
        assert_eq!(res, fit_threshold_bruteforce(&[(g, y)]).unwrap());
    }
}
