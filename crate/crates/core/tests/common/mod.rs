//! Independent reference implementations and generators shared by the
//! integration tests. Oracles work from pair enumeration or first principles,
//! never from the library's contingency tables or union-find.
#![allow(dead_code)]

use meta_unsup::data_model::{Partition, PointMatrix, WeightedGraph};
use meta_unsup::seed::Rng;
use rand::Rng as _;

pub fn labels(p: &Partition) -> Vec<Option<usize>> {
    p.membership()
}

fn is_valid(p: &Partition, n: usize) -> bool {
    let m = labels(p);
    m.len() == n && m.iter().all(Option::is_some) && p.n_parts() >= 2
}

/// Ordered distinct pairs whose co-membership differs, over `n(n-1)`; 1 when
/// either side is not a full clustering with two or more parts.
pub fn pair_loss(n: usize, y: &Partition, z: &Partition) -> f64 {
    if !is_valid(y, n) || !is_valid(z, n) {
        return 1.0;
    }
    let (a, b) = (labels(y), labels(z));
    let mut bad = 0u64;
    for i in 0..n {
        for j in 0..n {
            if i != j && (a[i] == a[j]) != (b[i] == b[j]) {
                bad += 1;
            }
        }
    }
    bad as f64 / (n * (n - 1)) as f64
}

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1) / 2) as f64
}

/// Hubert–Arabie adjusted Rand index from pair counts.
pub fn ari(y: &[usize], z: &[usize]) -> f64 {
    let n = y.len();
    let (mut both, mut in_y, mut in_z) = (0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let sy = y[i] == y[j];
            let sz = z[i] == z[j];
            both += u64::from(sy && sz);
            in_y += u64::from(sy);
            in_z += u64::from(sz);
        }
    }
    let total = choose2(n as u64);
    let expected = in_y as f64 * in_z as f64 / total;
    let max = 0.5 * (in_y + in_z) as f64;
    if max == expected {
        let agree = (0..n).all(|i| (i + 1..n).all(|j| (y[i] == y[j]) == (z[i] == z[j])));
        return if agree { 1.0 } else { 0.0 };
    }
    (both as f64 - expected) / (max - expected)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean silhouette with singleton points scored 0.
pub fn silhouette(x: &PointMatrix, assign: &[usize]) -> f64 {
    let n = x.rows();
    let k = assign.iter().max().unwrap() + 1;
    let mut total = 0.0;
    for i in 0..n {
        let mut sum = vec![0.0; k];
        let mut cnt = vec![0usize; k];
        for j in 0..n {
            if j != i {
                sum[assign[j]] += dist(x.row(i), x.row(j));
                cnt[assign[j]] += 1;
            }
        }
        let own = assign[i];
        if cnt[own] == 0 {
            continue;
        }
        let a = sum[own] / cnt[own] as f64;
        let b = (0..k).filter(|&c| c != own && cnt[c] > 0).map(|c| sum[c] / cnt[c] as f64).fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / n as f64
}

/// Components of the subgraph with edges `w <= r` (or `< r`), by graph search.
pub fn threshold_components(g: &WeightedGraph, r: f64, strict: bool) -> Vec<usize> {
    let n = g.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in g.edges() {
        if (strict && w < r) || (!strict && w <= r) {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = next;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn random_labels(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Random labels with every id in `0..k` used at least once (`k <= n`).
pub fn surjective_labels(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    let mut l: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        l.swap(i, rng.random_range(0..=i));
    }
    l
}

/// Sparse random graph with small integer weights, so ties are common.
pub fn random_graph(rng: &mut Rng, n: usize) -> WeightedGraph {
    let density = rng.random_range(0.2..1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v, rng.random_range(0..6) as f64 * 0.5));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Up to `max_graphs` graphs of 2..=`max_vertices` vertices, each with a valid truth.
pub fn random_collection(rng: &mut Rng, max_graphs: usize, max_vertices: usize) -> Vec<(WeightedGraph, Partition)> {
    let g = rng.random_range(1..=max_graphs);
    (0..g)
        .map(|_| {
            let n = rng.random_range(2..=max_vertices);
            let k = rng.random_range(2..=n.min(4));
            let truth = Partition::from_assignment(&surjective_labels(rng, n, k));
            (random_graph(rng, n), truth)
        })
        .collect()
}

pub fn random_points(rng: &mut Rng, n: usize, d: usize) -> PointMatrix {
    PointMatrix::new(n, d, (0..n * d).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap()
}

/// Complete distance graph over well-separated groups; returns the graph and its truth.
pub fn clustered_graph(rng: &mut Rng, n: usize, k: usize) -> (WeightedGraph, Partition) {
    let assign = surjective_labels(rng, n, k);
    let pts: Vec<Vec<f64>> = assign
        .iter()
        .map(|&c| vec![c as f64 * 10.0 + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
        .collect();
    let x = PointMatrix::from_rows(&pts).unwrap();
    (WeightedGraph::complete_from_points(&x), Partition::from_assignment(&assign))
}

/// Largest relative gap between analytic and central-difference gradients of
/// the mean NLL over `batch`, with the denominator floored at `floor`.
pub fn max_grad_error(model: &meta_unsup::similarity_net::MlpModel, batch: &[(&[f64], usize)], h: f64, floor: f64) -> f64 {
    let (_, grad) = model.loss_and_grad(batch);
    let mut m = model.clone();
    let mut worst = 0.0f64;
    for i in 0..grad.len() {
        let orig = m.params()[i];
        m.params_mut()[i] = orig + h;
        let up = m.loss_and_grad(batch).0;
        m.params_mut()[i] = orig - h;
        let down = m.loss_and_grad(batch).0;
        m.params_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let err = (grad[i] - numeric).abs() / (grad[i].abs().max(numeric.abs())).max(floor);
        worst = worst.max(err);
    }
    worst
}

/// One parameter of Adadelta, written out from the update equations.
pub struct ScalarAdadelta {
    pub x: f64,
    mean_sq_grad: f64,
    mean_sq_step: f64,
}

impl ScalarAdadelta {
    pub fn new(x: f64) -> Self {
        Self { x, mean_sq_grad: 0.0, mean_sq_step: 0.0 }
    }

    pub fn update(&mut self, g: f64, rho: f64, eps: f64, lr: f64) {
        self.mean_sq_grad = rho * self.mean_sq_grad + (1.0 - rho) * g * g;
        let rms_step = (self.mean_sq_step + eps).sqrt();
        let rms_grad = (self.mean_sq_grad + eps).sqrt();
        let step = -(rms_step / rms_grad) * g;
        self.mean_sq_step = rho * self.mean_sq_step + (1.0 - rho) * step * step;
        self.x += lr * step;
    }
}

/// Max |got - reference| over `steps` Adadelta steps on `sum_i c_i (x_i - t_i)^2`.
pub fn adadelta_gap(start: &[f64], steps: usize) -> f64 {
    use meta_unsup::similarity_net::Adadelta;
    let target: Vec<f64> = (0..start.len()).map(|i| i as f64 - 1.5).collect();
    let curv: Vec<f64> = (0..start.len()).map(|i| 0.5 + i as f64).collect();
    let grad = |x: &[f64]| -> Vec<f64> { x.iter().enumerate().map(|(i, v)| 2.0 * curv[i] * (v - target[i])).collect() };
    let mut opt = Adadelta::new(start.len(), 0.9, 1e-6, 1.0);
    let mut params = start.to_vec();
    let mut refs: Vec<ScalarAdadelta> = start.iter().map(|&x| ScalarAdadelta::new(x)).collect();
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let g = grad(&params);
        opt.step(&mut params, &g);
        let rg = grad(&refs.iter().map(|r| r.x).collect::<Vec<_>>());
        for (r, g) in refs.iter_mut().zip(rg) {
            r.update(g, 0.9, 1e-6, 1.0);
        }
        for (p, r) in params.iter().zip(&refs) {
            worst = worst.max((p - r.x).abs());
        }
    }
    worst
}
