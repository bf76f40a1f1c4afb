//! Feedforward autoencoder trained with mini-batch momentum SGD.
//!
//! Layer sizes are `[d, h, b, h, d]` with a bottleneck `b < d`. Hidden layers
//! use a leaky rectifier, the output layer is linear.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::Standardizer;

pub const LEAKY_SLOPE: f64 = 0.01;

const FORMAT_TAG: &str = "mlp v1";
const SCALED_FORMAT_TAG: &str = "autoencoder v1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AutoencoderError {
    #[error("input has length {found}, network expects {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("bottleneck {bottleneck} must be smaller than input size {input}")]
    NoBottleneck { input: usize, bottleneck: usize },
    #[error("layer sizes must all be positive: {0:?}")]
    BadSizes(Vec<usize>),
    #[error("training data is empty")]
    EmptyData,
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error("parameter vector has length {found}, expected {expected}")]
    ParamCount { expected: usize, found: usize },
    #[error("model file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Row-major `outputs x inputs`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    fn affine(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| {
                let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[o]
            })
            .collect()
    }

    fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

fn leaky(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        LEAKY_SLOPE * z
    }
}

fn leaky_grad(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// Mini-batch gradient descent settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Seeds the per-epoch shuffle.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 16,
            epochs: 500,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), AutoencoderError> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(AutoencoderError::BadConfig(format!(
                "learning rate {} must be finite and non-negative",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(AutoencoderError::BadConfig(format!(
                "momentum {} must be in [0, 1)",
                self.momentum
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(AutoencoderError::BadConfig(
                "epochs and batch size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Multilayer perceptron used as an autoencoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    layers: Vec<Layer>,
}

impl Mlp {
    /// `[d, hidden, bottleneck, hidden, d]` with Glorot-uniform weights
    /// (`±sqrt(6 / (fan_in + fan_out))`) and zero biases.
    pub fn new(d: usize, hidden: usize, bottleneck: usize, seed: u64) -> Result<Self, AutoencoderError> {
        if bottleneck >= d {
            return Err(AutoencoderError::NoBottleneck {
                input: d,
                bottleneck,
            });
        }
        Self::with_sizes_unchecked(&[d, hidden, bottleneck, hidden, d], seed)
    }

    /// Any layer sizes, no bottleneck check. Intended for tests and
    /// experiments.
    pub fn with_sizes_unchecked(sizes: &[usize], seed: u64) -> Result<Self, AutoencoderError> {
        let mut m = Self::zeros(sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in &mut m.layers {
            let scale = (6.0 / (l.inputs + l.outputs) as f64).sqrt();
            for w in &mut l.weights {
                *w = rng.random_range(-scale..=scale);
            }
        }
        Ok(m)
    }

    /// All weights and biases zero.
    pub fn zeros(sizes: &[usize]) -> Result<Self, AutoencoderError> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(AutoencoderError::BadSizes(sizes.to_vec()));
        }
        let layers = sizes
            .windows(2)
            .map(|w| Layer {
                inputs: w[0],
                outputs: w[1],
                weights: vec![0.0; w[0] * w[1]],
                bias: vec![0.0; w[1]],
            })
            .collect();
        Ok(Mlp {
            sizes: sizes.to_vec(),
            layers,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    /// Flattened parameters: per layer, weights row-major then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), AutoencoderError> {
        if params.len() != self.n_params() {
            return Err(AutoencoderError::ParamCount {
                expected: self.n_params(),
                found: params.len(),
            });
        }
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    /// Sets one layer's weights and biases directly.
    pub fn set_layer(&mut self, index: usize, weights: &[f64], bias: &[f64]) -> Result<(), AutoencoderError> {
        let l = &mut self.layers[index];
        if weights.len() != l.weights.len() || bias.len() != l.bias.len() {
            return Err(AutoencoderError::ParamCount {
                expected: l.n_params(),
                found: weights.len() + bias.len(),
            });
        }
        l.weights.copy_from_slice(weights);
        l.bias.copy_from_slice(bias);
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<(), AutoencoderError> {
        if x.len() != self.input_dim() {
            return Err(AutoencoderError::SizeMismatch {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Pre-activations and activations of every layer; `acts[0]` is the input.
    fn trace(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let last = self.layers.len() - 1;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut acts = vec![x.to_vec()];
        for (i, l) in self.layers.iter().enumerate() {
            let z = l.affine(acts.last().unwrap());
            let a = if i == last { z.clone() } else { z.iter().map(|&v| leaky(v)).collect() };
            pre.push(z);
            acts.push(a);
        }
        (pre, acts)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, AutoencoderError> {
        self.check_input(x)?;
        Ok(self.trace(x).1.pop().unwrap())
    }

    /// Output together with the activations of the narrowest hidden layer.
    pub fn forward_with_latent(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), AutoencoderError> {
        self.check_input(x)?;
        let (_, mut acts) = self.trace(x);
        let out = acts.pop().unwrap();
        let latent = acts
            .iter()
            .enumerate()
            .skip(1)
            .min_by_key(|(i, a)| (a.len(), *i))
            .map(|(_, a)| a.clone())
            .unwrap_or_else(|| out.clone());
        Ok((out, latent))
    }

    /// Mean squared error between `x` and its reconstruction.
    pub fn reconstruction_error(&self, x: &[f64]) -> Result<f64, AutoencoderError> {
        let y = self.forward(x)?;
        Ok(mse(x, &y))
    }

    /// True when the reconstruction error exceeds `threshold`.
    pub fn detect(&self, x: &[f64], threshold: f64) -> Result<bool, AutoencoderError> {
        Ok(self.reconstruction_error(x)? > threshold)
    }

    pub fn denoise(&self, x: &[f64]) -> Result<Vec<f64>, AutoencoderError> {
        self.forward(x)
    }

    /// `mean + 3 * std` of reconstruction errors on held-out normal data.
    pub fn calibrate_threshold(&self, normal: &[Vec<f64>]) -> Result<f64, AutoencoderError> {
        if normal.is_empty() {
            return Err(AutoencoderError::EmptyData);
        }
        let errs = normal
            .iter()
            .map(|x| self.reconstruction_error(x))
            .collect::<Result<Vec<_>, _>>()?;
        let n = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / n;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
        Ok(mean + 3.0 * var.sqrt())
    }

    /// Batch loss (mean over samples of per-sample MSE) and its gradient with
    /// respect to [`Mlp::params`].
    pub fn loss_and_gradient(&self, batch: &[Vec<f64>]) -> Result<(f64, Vec<f64>), AutoencoderError> {
        if batch.is_empty() {
            return Err(AutoencoderError::EmptyData);
        }
        let mut grads: Vec<(Vec<f64>, Vec<f64>)> = self
            .layers
            .iter()
            .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
            .collect();
        let scale = 1.0 / (batch.len() as f64 * self.input_dim() as f64);
        let last = self.layers.len() - 1;
        let mut loss = 0.0;
        for x in batch {
            self.check_input(x)?;
            let (pre, acts) = self.trace(x);
            let y = &acts[acts.len() - 1];
            loss += mse(x, y) / batch.len() as f64;
            let mut delta: Vec<f64> = y.iter().zip(x).map(|(a, b)| 2.0 * (a - b) * scale).collect();
            for li in (0..self.layers.len()).rev() {
                if li != last {
                    for (d, &z) in delta.iter_mut().zip(&pre[li]) {
                        *d *= leaky_grad(z);
                    }
                }
                let l = &self.layers[li];
                let input = &acts[li];
                let (gw, gb) = &mut grads[li];
                for o in 0..l.outputs {
                    gb[o] += delta[o];
                    for i in 0..l.inputs {
                        gw[o * l.inputs + i] += delta[o] * input[i];
                    }
                }
                if li > 0 {
                    delta = (0..l.inputs)
                        .map(|i| (0..l.outputs).map(|o| l.weights[o * l.inputs + i] * delta[o]).sum())
                        .collect();
                }
            }
        }
        let flat = grads.into_iter().flat_map(|(w, b)| w.into_iter().chain(b)).collect();
        Ok((loss, flat))
    }

    /// Mean reconstruction error over a dataset.
    pub fn dataset_loss(&self, data: &[Vec<f64>]) -> Result<f64, AutoencoderError> {
        if data.is_empty() {
            return Err(AutoencoderError::EmptyData);
        }
        let mut total = 0.0;
        for x in data {
            total += self.reconstruction_error(x)?;
        }
        Ok(total / data.len() as f64)
    }

    /// Trains in place; returns the dataset loss after each epoch.
    pub fn train(&mut self, data: &[Vec<f64>], cfg: &TrainConfig) -> Result<Vec<f64>, AutoencoderError> {
        cfg.validate()?;
        if data.is_empty() {
            return Err(AutoencoderError::EmptyData);
        }
        for x in data {
            self.check_input(x)?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut params = self.params();
        let mut velocity = vec![0.0; params.len()];
        let mut history = Vec::with_capacity(cfg.epochs);
        let mut batch: Vec<Vec<f64>> = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(cfg.batch_size) {
                batch.clear();
                batch.extend(chunk.iter().map(|&i| data[i].clone()));
                let (_, grad) = self.loss_and_gradient(&batch)?;
                for ((p, v), g) in params.iter_mut().zip(&mut velocity).zip(&grad) {
                    *v = cfg.momentum * *v - cfg.learning_rate * g;
                    *p += *v;
                }
                self.set_params(&params)?;
            }
            history.push(self.dataset_loss(data)?);
        }
        Ok(history)
    }

    /// Plain-text model: a tag line, a `sizes` line, then per layer one line
    /// per weight row followed by one bias line. Values use 17 significant
    /// digits so parsing restores them exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_TAG}");
        out.push_str("sizes");
        for s in &self.sizes {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
        for l in &self.layers {
            for row in l.weights.chunks(l.inputs) {
                write_values(&mut out, row);
            }
            write_values(&mut out, &l.bias);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AutoencoderError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        Self::read_from(&mut lines)
    }

    fn read_from<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<Self, AutoencoderError> {
        let bad = |m: &str| AutoencoderError::Format(m.to_string());
        if lines.next().map(str::trim) != Some(FORMAT_TAG) {
            return Err(bad("missing `mlp v1` tag line"));
        }
        let sizes_line = lines.next().ok_or_else(|| bad("missing sizes line"))?;
        let mut parts = sizes_line.split_whitespace();
        if parts.next() != Some("sizes") {
            return Err(bad("expected `sizes` line"));
        }
        let sizes = parts
            .map(|s| s.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad layer size"))?;
        let mut m = Self::zeros(&sizes)?;
        for l in &mut m.layers {
            for o in 0..l.outputs {
                let row = read_values(lines.next(), l.inputs)?;
                l.weights[o * l.inputs..(o + 1) * l.inputs].copy_from_slice(&row);
            }
            l.bias = read_values(lines.next(), l.outputs)?;
        }
        Ok(m)
    }
}

fn write_values(out: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

fn read_values(line: Option<&str>, n: usize) -> Result<Vec<f64>, AutoencoderError> {
    let line = line.ok_or_else(|| AutoencoderError::Format("truncated parameter block".into()))?;
    let values = line
        .split_whitespace()
        .map(|s| s.parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| AutoencoderError::Format(format!("bad value: {e}")))?;
    if values.len() != n {
        return Err(AutoencoderError::Format(format!(
            "expected {n} values on a line, found {}",
            values.len()
        )));
    }
    Ok(values)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// An autoencoder over z-scored inputs. Inputs and outputs are in the
/// original feature units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledAutoencoder {
    pub scaler: Standardizer,
    pub mlp: Mlp,
}

impl ScaledAutoencoder {
    /// Fits the scaler on `data`, then trains a fresh `[d, hidden, bottleneck,
    /// hidden, d]` network on the scaled data.
    pub fn fit(
        data: &[Vec<f64>],
        hidden: usize,
        bottleneck: usize,
        cfg: &TrainConfig,
    ) -> Result<(Self, Vec<f64>), AutoencoderError> {
        let d = data.first().ok_or(AutoencoderError::EmptyData)?.len();
        let scaler = Standardizer::fit(data);
        let scaled: Vec<Vec<f64>> = data.iter().map(|x| scaler.apply(x)).collect();
        let mut mlp = Mlp::new(d, hidden, bottleneck, cfg.seed)?;
        let history = mlp.train(&scaled, cfg)?;
        Ok((ScaledAutoencoder { scaler, mlp }, history))
    }

    pub fn denoise(&self, x: &[f64]) -> Result<Vec<f64>, AutoencoderError> {
        self.mlp.check_input(x)?;
        let y = self.mlp.forward(&self.scaler.apply(x))?;
        Ok(self.scaler.invert(&y))
    }

    /// Reconstruction error measured in scaled units.
    pub fn reconstruction_error(&self, x: &[f64]) -> Result<f64, AutoencoderError> {
        self.mlp.check_input(x)?;
        self.mlp.reconstruction_error(&self.scaler.apply(x))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SCALED_FORMAT_TAG}");
        out.push_str("mean ");
        write_values(&mut out, &self.scaler.mean);
        out.push_str("std ");
        write_values(&mut out, &self.scaler.std);
        out.push_str(&self.mlp.to_text());
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AutoencoderError> {
        let bad = |m: &str| AutoencoderError::Format(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(SCALED_FORMAT_TAG) {
            return Err(bad("missing `autoencoder v1` tag line"));
        }
        let mut labeled = |label: &str| -> Result<Vec<f64>, AutoencoderError> {
            let line = lines.next().ok_or_else(|| bad("truncated scaler block"))?;
            let rest = line
                .strip_prefix(label)
                .ok_or_else(|| AutoencoderError::Format(format!("expected `{label}` line")))?;
            rest.split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| AutoencoderError::Format(format!("bad value: {e}")))
        };
        let mean = labeled("mean")?;
        let std = labeled("std")?;
        let mlp = Mlp::read_from(&mut lines)?;
        if mean.len() != mlp.input_dim() || std.len() != mlp.input_dim() {
            return Err(bad("scaler length does not match network input size"));
        }
        Ok(ScaledAutoencoder {
            scaler: Standardizer { mean, std },
            mlp,
        })
    }
}
