use rand::Rng as _;

use super::{nearest_center, ClusterResult};
use crate::data_model::PointMatrix;
use crate::error::{Error, Result};
use crate::numeric::sq_dist;
use crate::seed::{self, Rng};

const MAX_ITER: usize = 300;

/// k-means++ seeding.
pub fn kmeans_plus_plus(points: &PointMatrix, k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let n = points.rows();
    let mut centers = Vec::with_capacity(k);
    centers.push(points.row(rng.random_range(0..n)).to_vec());
    let mut d2: Vec<f64> = points.iter_rows().map(|r| sq_dist(r, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points.row(pick).to_vec();
        for (i, r) in points.iter_rows().enumerate() {
            d2[i] = d2[i].min(sq_dist(r, &c));
        }
        centers.push(c);
    }
    centers
}

#[derive(Debug, Clone)]
pub struct LloydOutcome {
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Inertia after each assignment step.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Lloyd iteration from the given centers until assignments stop changing
/// (or 300 iterations). Empty clusters are reseeded with the point that is
/// furthest from its current center.
pub fn lloyd(points: &PointMatrix, mut centers: Vec<Vec<f64>>) -> LloydOutcome {
    let n = points.rows();
    let k = centers.len();
    let mut assignment = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut next = Vec::with_capacity(n);
        let mut dists = Vec::with_capacity(n);
        for r in points.iter_rows() {
            let (c, d) = nearest_center(r, &centers);
            next.push(c);
            dists.push(d);
        }
        reseed_empty(&mut next, &mut dists, k);
        trace.push(dists.iter().sum());
        let changed = next != assignment;
        assignment = next;
        centers = means(points, &assignment, k, &centers);
        if !changed || iterations >= MAX_ITER {
            break;
        }
    }
    LloydOutcome { assignment, centers, trace, iterations }
}

fn reseed_empty(assign: &mut [usize], dists: &mut [f64], k: usize) {
    let mut sizes = vec![0usize; k];
    for &a in assign.iter() {
        sizes[a] += 1;
    }
    for c in 0..k {
        if sizes[c] > 0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..assign.len() {
            if sizes[assign[i]] > 1 && best.is_none_or(|(_, d)| dists[i] > d) {
                best = Some((i, dists[i]));
            }
        }
        let Some((i, _)) = best else { return };
        sizes[assign[i]] -= 1;
        sizes[c] += 1;
        assign[i] = c;
        dists[i] = 0.0;
    }
}

fn means(points: &PointMatrix, assign: &[usize], k: usize, previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = points.cols();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (r, &a) in points.iter_rows().zip(assign) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(r) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .enumerate()
        .map(|(c, (s, cnt))| {
            if cnt == 0 {
                previous[c].clone()
            } else {
                s.into_iter().map(|v| v / cnt as f64).collect()
            }
        })
        .collect()
}

/// Best-inertia result over `restarts` k-means++ / Lloyd runs; ties keep the
/// earliest restart.
pub fn kmeans(points: &PointMatrix, k: usize, restarts: usize, seed: u64) -> Result<ClusterResult> {
    let n = points.rows();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the number of points {n}")));
    }
    if k < 1 || restarts < 1 {
        return Err(Error::InvalidArgument("k and restarts must be positive".into()));
    }
    let mut best: Option<ClusterResult> = None;
    for r in 0..restarts {
        let mut rng = seed::rng(seed::mix(seed, r as u64));
        let init = kmeans_plus_plus(points, k, &mut rng);
        let out = lloyd(points, init);
        let result = ClusterResult::from_assignment(points, &out.assignment, true);
        if best.as_ref().is_none_or(|b| result.inertia < b.inertia) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ari_labels;

    fn two_blobs() -> (PointMatrix, Vec<usize>) {
        let mut rng = seed::rng(5);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, off) in [0.0, 10.0].into_iter().enumerate() {
            for _ in 0..40 {
                rows.push(vec![off + crate::data_model::synth::gaussian(&mut rng), crate::data_model::synth::gaussian(&mut rng)]);
                labels.push(c);
            }
        }
        (PointMatrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn separates_blobs() {
        let (p, labels) = two_blobs();
        let r = kmeans(&p, 2, 3, 1).unwrap();
        assert_eq!(ari_labels(&labels, &r.assignment()).unwrap(), 1.0);
    }

    #[test]
    fn identical_points_get_two_parts() {
        let p = PointMatrix::from_rows(&vec![vec![1.0, 2.0]; 6]).unwrap();
        let r = kmeans(&p, 2, 2, 0).unwrap();
        assert_eq!(r.partition.n_parts(), 2);
        assert!(r.partition.is_valid());
        assert_eq!(r.inertia, Some(0.0));
    }

    #[test]
    fn deterministic_and_k_bound() {
        let (p, _) = two_blobs();
        let a = kmeans(&p, 3, 4, 9).unwrap();
        let b = kmeans(&p, 3, 4, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.inertia.unwrap().to_bits(), b.inertia.unwrap().to_bits());
        assert!(kmeans(&p, 81, 1, 0).is_err());
    }

    #[test]
    fn lloyd_trace_non_increasing_and_fixed_point() {
        let (p, _) = two_blobs();
        for s in 0..10 {
            let init = kmeans_plus_plus(&p, 4, &mut seed::rng(s));
            let out = lloyd(&p, init);
            for w in out.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{:?}", out.trace);
            }
            for (i, r) in p.iter_rows().enumerate() {
                let (_, best) = nearest_center(r, &out.centers);
                assert!(sq_dist(r, &out.centers[out.assignment[i]]) <= best + 1e-12);
            }
        }
    }
}
