//! Softmax-regression probe trained with mini-batch SGD and momentum.

use crate::compositor::Pipeline;
use crate::dataset::CifarRecord;
use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::{derive_stream, splitmix64_mix, SeedSpec};

/// Pixels scaled to `[-0.5, 0.5]`, channel-planar. Uncentered inputs put
/// lr 0.01 with momentum 0.9 at the edge of stability.
pub fn features(image: &ImageTensor) -> Vec<f64> {
    image.data().iter().map(|&b| b as f64 / 255.0 - 0.5).collect()
}

/// Row-major `classes x input_dim` weights plus one bias per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel {
    pub classes: usize,
    pub input_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ProbeModel {
    pub fn zeros(classes: usize, input_dim: usize) -> Result<Self> {
        if classes < 2 || input_dim == 0 {
            return Err(Error::argument(format!(
                "probe needs >= 2 classes and a non-empty input, got {classes} x {input_dim}"
            )));
        }
        Ok(ProbeModel {
            classes,
            input_dim,
            weights: vec![0.0; classes * input_dim],
            bias: vec![0.0; classes],
        })
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.input_dim);
        (0..self.classes)
            .map(|k| {
                let row = &self.weights[k * self.input_dim..(k + 1) * self.input_dim];
                self.bias[k] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    /// Predicted class and its softmax probability.
    pub fn predict(&self, x: &[f64]) -> (usize, f64) {
        let p = self.probabilities(x);
        let (k, &conf) = p
            .iter()
            .enumerate()
            .fold((0, &p[0]), |best, cur| if cur.1 > best.1 { cur } else { best });
        (k, conf)
    }

    /// Mean cross-entropy over `batch` and its gradient.
    pub fn loss_and_grad(&self, batch: &[(&[f64], usize)]) -> Result<(f64, ProbeGradient)> {
        if batch.is_empty() {
            return Err(Error::argument("empty batch"));
        }
        let mut grad = ProbeGradient {
            weights: vec![0.0; self.weights.len()],
            bias: vec![0.0; self.classes],
        };
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for &(x, y) in batch {
            if x.len() != self.input_dim || y >= self.classes {
                return Err(Error::argument(format!(
                    "sample of dim {} / label {y} does not fit a {} x {} probe",
                    x.len(),
                    self.classes,
                    self.input_dim
                )));
            }
            let logits = self.logits(x);
            let lse = log_sum_exp(&logits);
            loss += (lse - logits[y]) * scale;
            for (k, &logit) in logits.iter().enumerate() {
                let d = ((logit - lse).exp() - if k == y { 1.0 } else { 0.0 }) * scale;
                grad.bias[k] += d;
                let row = &mut grad.weights[k * self.input_dim..(k + 1) * self.input_dim];
                for (g, v) in row.iter_mut().zip(x) {
                    *g += d * v;
                }
            }
        }
        Ok((loss, grad))
    }

    pub fn loss(&self, batch: &[(&[f64], usize)]) -> Result<f64> {
        self.loss_and_grad(batch).map(|(l, _)| l)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn softmax(v: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(v);
    v.iter().map(|x| (x - lse).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            epochs: 20,
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 100,
            seed: 0,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::argument("epochs and batch_size must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::argument(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::argument(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRun {
    pub model: ProbeModel,
    /// Mean mini-batch loss of each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Seed for the augmentation streams of one epoch.
pub fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    splitmix64_mix(seed ^ splitmix64_mix(epoch as u64 + 1))
}

/// Trains a probe; every epoch re-augments every record with fresh streams
/// and visits them in a seed-determined shuffled order.
pub fn train_linear_probe(
    records: &[CifarRecord],
    pipeline: &Pipeline,
    config: &ProbeConfig,
) -> Result<ProbeRun> {
    config.validate()?;
    pipeline.validate()?;
    let first = records
        .first()
        .ok_or_else(|| Error::argument("probe training needs at least one record"))?;
    let mut seen = [false; 256];
    for r in records {
        seen[r.fine_label as usize] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::argument("probe training needs at least 2 classes present"));
    }
    let classes = records.iter().map(|r| r.fine_label as usize).max().unwrap_or(0) + 1;
    let dim = first.image.data().len();
    if records.iter().any(|r| r.image.data().len() != dim) {
        return Err(Error::argument("all training images must share one shape"));
    }

    let mut model = ProbeModel::zeros(classes, dim)?;
    let mut vel_w = vec![0.0; model.weights.len()];
    let mut vel_b = vec![0.0; classes];
    let mut order: Vec<usize> = (0..records.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let aug_seed = epoch_seed(config.seed, epoch);
        let feats = records
            .iter()
            .enumerate()
            .map(|(i, r)| Ok(features(&pipeline.apply(&r.image, aug_seed, i as u64)?)))
            .collect::<Result<Vec<_>>>()?;

        let mut shuffle = derive_stream(SeedSpec::new(config.seed, u64::MAX - epoch as u64));
        for i in (1..order.len()).rev() {
            let j = shuffle.next_index(i + 1)?;
            order.swap(i, j);
        }

        let mut total = 0.0;
        let mut batches = 0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<(&[f64], usize)> = chunk
                .iter()
                .map(|&i| (feats[i].as_slice(), records[i].fine_label as usize))
                .collect();
            let (loss, grad) = model.loss_and_grad(&batch)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, batch: b });
            }
            for ((w, v), g) in model.weights.iter_mut().zip(&mut vel_w).zip(&grad.weights) {
                *v = config.momentum * *v - config.learning_rate * g;
                *w += *v;
            }
            for ((w, v), g) in model.bias.iter_mut().zip(&mut vel_b).zip(&grad.bias) {
                *v = config.momentum * *v - config.learning_rate * g;
                *w += *v;
            }
            if !model.is_finite() {
                return Err(Error::Divergence { epoch, batch: b });
            }
            total += loss;
            batches += 1;
        }
        epoch_losses.push(total / batches as f64);
    }
    Ok(ProbeRun { model, epoch_losses })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord {
    /// Max softmax probability.
    pub confidence: f64,
    pub correct: bool,
}

pub fn predict_records(model: &ProbeModel, records: &[CifarRecord]) -> Vec<PredictionRecord> {
    records
        .iter()
        .map(|r| {
            let (k, confidence) = model.predict(&features(&r.image));
            PredictionRecord {
                confidence,
                correct: k == r.fine_label as usize,
            }
        })
        .collect()
}

pub fn accuracy(predictions: &[PredictionRecord]) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    predictions.iter().filter(|p| p.correct).count() as f64 / predictions.len() as f64
}
