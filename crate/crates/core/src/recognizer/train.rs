use std::fmt;

use log::debug;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{LstmNetwork, NUM_LAYERS};
use super::{ActivityIntent, Dataset, RecognizerError};
use crate::activity::{ActivityClass, NUM_CLASSES};

/// Mini-batch gradient descent settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Global gradient-norm clip applied to each batch gradient.
    pub clip_norm: f64,
    pub seed: u64,
    pub hidden: [usize; NUM_LAYERS],
    pub init_range: f64,
    pub forget_bias: f64,
    /// Stop once the mean training loss drops below this value.
    pub stop_at_loss: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 40,
            batch_size: 10,
            clip_norm: 5.0,
            seed: 42,
            hidden: [64, 64, 64],
            init_range: 0.08,
            forget_bias: 1.0,
            stop_at_loss: Some(0.01),
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), RecognizerError> {
        let bad = |m: &str| Err(RecognizerError::Config(m.to_string()));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be positive");
        }
        if !(self.clip_norm.is_finite() && self.clip_norm > 0.0) {
            return bad("clip_norm must be positive");
        }
        if self.hidden.contains(&0) {
            return bad("hidden sizes must be positive");
        }
        if !(self.init_range.is_finite() && self.init_range > 0.0) {
            return bad("init_range must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub network: LstmNetwork,
    /// Mean training loss after each epoch (index 0 is before any update).
    pub epoch_losses: Vec<f64>,
    pub epoch_accuracy: Vec<f64>,
}

impl TrainedModel {
    /// First epoch (1-based) at which training accuracy reached 100%.
    pub fn perfect_after(&self) -> Option<usize> {
        self.epoch_accuracy.iter().position(|a| *a >= 1.0)
    }
}

/// Trains a fresh network by BPTT with clipped mini-batch gradient descent.
/// Deterministic in `config.seed`.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<TrainedModel, RecognizerError> {
    config.validate()?;
    dataset.validate()?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = LstmNetwork::random(config.hidden, config.init_range, config.forget_bias, &mut init_rng);
    net.validate()?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed_5eed_5eed);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut grad = net.zeros_like();

    let (loss, acc) = epoch_stats(&net, dataset)?;
    let mut epoch_losses = vec![loss];
    let mut epoch_accuracy = vec![acc];

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        for batch in order.chunks(config.batch_size) {
            for t in grad.tensors_mut() {
                t.fill(0.0);
            }
            for &i in batch {
                let s = &dataset.samples()[i];
                net.loss_and_gradient(&s.features, s.label, &mut grad)?;
            }
            let scale = 1.0 / batch.len() as f64;
            let norm = grad
                .parameters()
                .map(|g| (g * scale) * (g * scale))
                .sum::<f64>()
                .sqrt();
            let clip = if norm > config.clip_norm { config.clip_norm / norm } else { 1.0 };
            let step = config.learning_rate * scale * clip;
            for (p, g) in net.tensors_mut().into_iter().zip(grad.tensors()) {
                for (pi, gi) in p.iter_mut().zip(g) {
                    *pi -= step * gi;
                }
            }
        }
        let (loss, acc) = epoch_stats(&net, dataset)?;
        debug!("epoch {epoch}: loss {loss:.6} accuracy {acc:.4}");
        epoch_losses.push(loss);
        epoch_accuracy.push(acc);
        if config.stop_at_loss.is_some_and(|target| loss < target) {
            break;
        }
    }
    if net.parameters().any(|v| !v.is_finite()) {
        return Err(RecognizerError::Config("training diverged".into()));
    }
    Ok(TrainedModel { network: net, epoch_losses, epoch_accuracy })
}

fn epoch_stats(net: &LstmNetwork, dataset: &Dataset) -> Result<(f64, f64), RecognizerError> {
    let mut loss = 0.0;
    let mut correct = 0usize;
    for s in dataset.samples() {
        let p = net.forward(&s.features)?;
        loss -= p[s.label].max(f64::MIN_POSITIVE).ln();
        if ActivityIntent::from_probabilities(p).class.index() == s.label {
            correct += 1;
        }
    }
    let n = dataset.len() as f64;
    Ok((loss / n, correct as f64 / n))
}

/// Rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[usize; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..NUM_CLASSES).map(|k| self.counts[k][k]).sum();
        match self.total() {
            0 => 0.0,
            n => correct as f64 / n as f64,
        }
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>20}", "true \\ predicted")?;
        for k in 0..NUM_CLASSES {
            write!(f, "{k:>5}")?;
        }
        writeln!(f)?;
        for (k, row) in self.counts.iter().enumerate() {
            write!(f, "{:>17} {k:>2}", ActivityClass::ALL[k].name())?;
            for c in row {
                write!(f, "{c:>5}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn evaluate(net: &LstmNetwork, dataset: &Dataset) -> Result<ConfusionMatrix, RecognizerError> {
    let mut m = ConfusionMatrix::default();
    for s in dataset.samples() {
        let predicted = ActivityIntent::from_probabilities(net.forward(&s.features)?);
        m.counts[s.label][predicted.class.index()] += 1;
    }
    Ok(m)
}
