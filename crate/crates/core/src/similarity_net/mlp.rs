use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::features::{swap_blocks, PairExample, FEATURE_LEN};
use crate::error::{Error, Result};
use crate::seed::{self, mix, mix_path};

/// Widths from input to output.
pub const LAYER_DIMS: [usize; 6] = [FEATURE_LEN, 100, 50, 25, 12, 2];

/// Adadelta with decay `rho`, stabilizer `eps` and learning rate `lr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adadelta {
    pub rho: f64,
    pub eps: f64,
    pub lr: f64,
    /// Running average of squared gradients, one per parameter.
    pub sq_grad: Vec<f64>,
    /// Running average of squared updates, one per parameter.
    pub sq_delta: Vec<f64>,
}

impl Adadelta {
    pub fn new(n_params: usize, rho: f64, eps: f64, lr: f64) -> Self {
        Self { rho, eps, lr, sq_grad: vec![0.0; n_params], sq_delta: vec![0.0; n_params] }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        let (rho, eps) = (self.rho, self.eps);
        for (((p, &g), sg), sd) in params.iter_mut().zip(grads).zip(&mut self.sq_grad).zip(&mut self.sq_delta) {
            *sg = rho * *sg + (1.0 - rho) * g * g;
            let delta = (*sd + eps).sqrt() / (*sg + eps).sqrt() * g;
            *sd = rho * *sd + (1.0 - rho) * delta * delta;
            *p -= self.lr * delta;
        }
    }
}

/// Fully connected ReLU network with a log-softmax output.
///
/// Parameters are stored flat, layer by layer: the `out x in` weight matrix
/// (row-major) followed by the bias vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    dims: Vec<usize>,
    params: Vec<f64>,
    pub optimizer: Adadelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LayerJson {
    weights: Vec<f64>,
    biases: Vec<f64>,
    sq_grad_weights: Vec<f64>,
    sq_grad_biases: Vec<f64>,
    sq_delta_weights: Vec<f64>,
    sq_delta_biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CheckpointJson {
    dims: Vec<usize>,
    rho: f64,
    eps: f64,
    lr: f64,
    layers: Vec<LayerJson>,
}

fn n_params(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl MlpModel {
    /// Weights uniform in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn new(dims: &[usize], seed: u64) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) || dims[dims.len() - 1] != 2 {
            return Err(Error::InvalidArgument(format!("bad layer widths {dims:?}")));
        }
        let mut rng = seed::rng(seed);
        let mut params = Vec::with_capacity(n_params(dims));
        for w in dims.windows(2) {
            let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
            params.extend((0..w[0] * w[1]).map(|_| rng.random_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, w[1]));
        }
        let n = params.len();
        Ok(Self { dims: dims.to_vec(), params, optimizer: Adadelta::new(n, 0.9, 1e-6, 1.0) })
    }

    pub fn standard(seed: u64) -> Self {
        Self::new(&LAYER_DIMS, seed).expect("fixed widths are valid")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Log-probabilities of the two classes.
    pub fn log_probs(&self, x: &[f64]) -> [f64; 2] {
        let mut scratch = Scratch::new(&self.dims);
        self.forward(x, &mut scratch);
        let out = scratch.acts.last().expect("output layer");
        [out[0], out[1]]
    }

    /// Probability that the pair is from the same class.
    pub fn prob_same(&self, x: &[f64]) -> f64 {
        self.log_probs(x)[1].exp()
    }

    fn forward(&self, x: &[f64], s: &mut Scratch) {
        s.acts[0].copy_from_slice(x);
        let mut off = 0;
        let last = self.dims.len() - 2;
        for l in 0..=last {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let w = &self.params[off..off + n_in * n_out];
            let b = &self.params[off + n_in * n_out..off + n_in * n_out + n_out];
            let (before, after) = s.acts.split_at_mut(l + 1);
            let input = &before[l];
            let out = &mut after[0];
            for o in 0..n_out {
                let row = &w[o * n_in..(o + 1) * n_in];
                let z = b[o] + row.iter().zip(input.iter()).map(|(a, v)| a * v).sum::<f64>();
                out[o] = if l < last { z.max(0.0) } else { z };
            }
            off += n_in * n_out + n_out;
        }
        let out = s.acts.last_mut().expect("output layer");
        let m = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + out.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        out.iter_mut().for_each(|v| *v -= lse);
    }

    /// Add the gradient of `-log p(label | x)` scaled by `scale` into `grad`; returns the loss.
    fn backward(&self, x: &[f64], label: usize, scale: f64, s: &mut Scratch, grad: &mut [f64]) -> f64 {
        self.forward(x, s);
        let n_layers = self.dims.len() - 1;
        let out = &s.acts[n_layers];
        let loss = -out[label];
        // d loss / d logits = softmax - onehot
        let delta = &mut s.deltas[n_layers];
        for (c, d) in delta.iter_mut().enumerate() {
            *d = scale * (out[c].exp() - if c == label { 1.0 } else { 0.0 });
        }
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for l in 0..n_layers {
            offsets.push(off);
            off += self.dims[l] * self.dims[l + 1] + self.dims[l + 1];
        }
        for l in (0..n_layers).rev() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let off = offsets[l];
            let (dw, db) = grad[off..off + n_in * n_out + n_out].split_at_mut(n_in * n_out);
            let (lower, upper) = s.deltas.split_at_mut(l + 1);
            let d_out = &upper[0];
            let input = &s.acts[l];
            for o in 0..n_out {
                let g = d_out[o];
                if g == 0.0 {
                    continue;
                }
                db[o] += g;
                for (dwi, &v) in dw[o * n_in..(o + 1) * n_in].iter_mut().zip(input.iter()) {
                    *dwi += g * v;
                }
            }
            if l > 0 {
                let w = &self.params[off..off + n_in * n_out];
                let d_in = &mut lower[l];
                d_in.iter_mut().for_each(|v| *v = 0.0);
                for o in 0..n_out {
                    let g = d_out[o];
                    if g == 0.0 {
                        continue;
                    }
                    for (di, &wi) in d_in.iter_mut().zip(&w[o * n_in..(o + 1) * n_in]) {
                        *di += g * wi;
                    }
                }
                // ReLU: the stored activation is zero exactly where the unit was inactive
                for (di, &a) in d_in.iter_mut().zip(input.iter()) {
                    if a <= 0.0 {
                        *di = 0.0;
                    }
                }
            }
        }
        loss
    }

    /// Mean negative log-likelihood over a batch and its gradient.
    pub fn loss_and_grad(&self, batch: &[(&[f64], usize)]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let mut s = Scratch::new(&self.dims);
        let scale = 1.0 / batch.len() as f64;
        let mut total = 0.0;
        for &(x, y) in batch {
            total += self.backward(x, y, scale, &mut s, &mut grad);
        }
        (total * scale, grad)
    }

    pub fn mean_nll(&self, data: &[PairExample]) -> f64 {
        let mut s = Scratch::new(&self.dims);
        let mut total = 0.0;
        for p in data {
            self.forward(&p.features, &mut s);
            total -= s.acts.last().expect("output layer")[usize::from(p.label)];
        }
        total / data.len() as f64
    }

    pub fn to_json(&self) -> Result<String> {
        let mut layers = Vec::new();
        let mut off = 0;
        for w in self.dims.windows(2) {
            let nw = w[0] * w[1];
            let take = |v: &[f64]| (v[off..off + nw].to_vec(), v[off + nw..off + nw + w[1]].to_vec());
            let (weights, biases) = take(&self.params);
            let (sq_grad_weights, sq_grad_biases) = take(&self.optimizer.sq_grad);
            let (sq_delta_weights, sq_delta_biases) = take(&self.optimizer.sq_delta);
            layers.push(LayerJson { weights, biases, sq_grad_weights, sq_grad_biases, sq_delta_weights, sq_delta_biases });
            off += nw + w[1];
        }
        let ck = CheckpointJson { dims: self.dims.clone(), rho: self.optimizer.rho, eps: self.optimizer.eps, lr: self.optimizer.lr, layers };
        Ok(serde_json::to_string(&ck)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ck: CheckpointJson = serde_json::from_str(s)?;
        let mut m = MlpModel::new(&ck.dims, 0)?;
        if ck.layers.len() != ck.dims.len() - 1 {
            return Err(Error::InvalidArgument("checkpoint layer count does not match its widths".into()));
        }
        m.optimizer.rho = ck.rho;
        m.optimizer.eps = ck.eps;
        m.optimizer.lr = ck.lr;
        let (mut p, mut g, mut d): (Vec<f64>, Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new(), Vec::new());
        for (layer, w) in ck.layers.iter().zip(ck.dims.windows(2)) {
            let nw = w[0] * w[1];
            for (v, len) in [
                (&layer.weights, nw),
                (&layer.biases, w[1]),
                (&layer.sq_grad_weights, nw),
                (&layer.sq_grad_biases, w[1]),
                (&layer.sq_delta_weights, nw),
                (&layer.sq_delta_biases, w[1]),
            ] {
                if v.len() != len {
                    return Err(Error::DimensionMismatch { expected: len, got: v.len() });
                }
            }
            p.extend(&layer.weights);
            p.extend(&layer.biases);
            g.extend(&layer.sq_grad_weights);
            g.extend(&layer.sq_grad_biases);
            d.extend(&layer.sq_delta_weights);
            d.extend(&layer.sq_delta_biases);
        }
        if p.iter().chain(&g).chain(&d).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("checkpoint contains non-finite values".into()));
        }
        m.params = p;
        m.optimizer.sq_grad = g;
        m.optimizer.sq_delta = d;
        Ok(m)
    }
}

struct Scratch {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Scratch {
    fn new(dims: &[usize]) -> Self {
        Self { acts: dims.iter().map(|&d| vec![0.0; d]).collect(), deltas: dims.iter().map(|&d| vec![0.0; d]).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 10, batch: 250, seed: 0 }
    }
}

/// Initial weights for a training seed.
pub fn initial_model(seed: u64) -> MlpModel {
    MlpModel::standard(mix(seed, 0))
}

/// Mini-batch Adadelta on the mean negative log-likelihood; the visiting
/// order of each epoch is a seeded shuffle.
pub fn train_mlp(train: &[PairExample], cfg: &TrainConfig) -> Result<MlpModel> {
    if train.is_empty() || cfg.batch == 0 {
        return Err(Error::InvalidArgument("training needs examples and a positive batch size".into()));
    }
    if let Some(p) = train.iter().find(|p| p.features.len() != FEATURE_LEN) {
        return Err(Error::DimensionMismatch { expected: FEATURE_LEN, got: p.features.len() });
    }
    let mut model = initial_model(cfg.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 0..cfg.epochs {
        let mut rng = seed::rng(mix_path(cfg.seed, &[1, epoch as u64]));
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch) {
            let batch: Vec<(&[f64], usize)> = chunk.iter().map(|&i| (train[i].features.as_slice(), usize::from(train[i].label))).collect();
            let (_, grad) = model.loss_and_grad(&batch);
            let MlpModel { params, optimizer, .. } = &mut model;
            optimizer.step(params, &grad);
        }
    }
    Ok(model)
}

/// Average of the same-class probabilities of both orders, and whether it exceeds 0.5.
pub fn predict_features(model: &MlpModel, features: &[f64]) -> (f64, bool) {
    let p = 0.5 * (model.prob_same(features) + model.prob_same(&swap_blocks(features)));
    (p, p > 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_softmax_normalizes() {
        let m = MlpModel::standard(3);
        let mut rng = seed::rng(4);
        for _ in 0..20 {
            let x: Vec<f64> = (0..FEATURE_LEN).map(|_| rng.random_range(-3.0..3.0)).collect();
            let [a, b] = m.log_probs(&x);
            assert!((a.exp() + b.exp() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn adadelta_first_step() {
        let mut opt = Adadelta::new(1, 0.9, 1e-6, 1.0);
        let mut p = [1.0];
        opt.step(&mut p, &[2.0]);
        let sg = 0.1 * 4.0;
        let delta = (1e-6f64).sqrt() / (sg + 1e-6f64).sqrt() * 2.0;
        assert_eq!(p[0], 1.0 - delta);
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut m = MlpModel::new(&[4, 3, 2], 1).unwrap();
        let g: Vec<f64> = (0..m.params().len()).map(|i| i as f64 * 0.01).collect();
        let MlpModel { params, optimizer, .. } = &mut m;
        optimizer.step(params, &g);
        let back = MlpModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
