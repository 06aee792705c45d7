//! Three-layer LSTM activity classifier written from scratch: forward pass,
//! BPTT training, gradient checking and weight persistence.

mod gradcheck;
mod matrix;
mod network;
mod train;
mod weights;

pub use gradcheck::{check_instance, gradient_check, gradient_check_many, loss_difference, numeric_gradient, GradientReport};
pub use matrix::Matrix;
pub use network::{lstm_cell_step, softmax, Gate, LstmLayerParams, LstmNetwork, NUM_LAYERS};
pub use train::{evaluate, train, ConfusionMatrix, TrainConfig, TrainedModel};
pub use weights::{load_weights, parse_weights, save_weights, weights_to_string, WeightsError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::activity::{ActivityClass, NUM_CLASSES};
use crate::skeleton::{window_to_features, FeatureSequence, FrameWindow, SkeletonError, DEFAULT_STRIDE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecognizerError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("label {0} out of range")]
    LabelOutOfRange(usize),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("class {0} has no samples")]
    EmptyClass(ActivityClass),
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("architecture: {0}")]
    Architecture(String),
    #[error(transparent)]
    Features(#[from] SkeletonError),
}

/// A recognized interaction intent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivityIntent {
    pub class: ActivityClass,
    pub confidence: f64,
    pub probabilities: [f64; NUM_CLASSES],
}

impl ActivityIntent {
    /// Argmax with ties resolved toward the lowest class index.
    pub fn from_probabilities(probabilities: [f64; NUM_CLASSES]) -> Self {
        let mut best = 0;
        for (k, p) in probabilities.iter().enumerate() {
            if *p > probabilities[best] {
                best = k;
            }
        }
        ActivityIntent {
            class: ActivityClass::ALL[best],
            confidence: probabilities[best],
            probabilities,
        }
    }

    /// A certain prediction; used by scripted recognizers.
    pub fn certain(class: ActivityClass) -> Self {
        let mut probabilities = [0.0; NUM_CLASSES];
        probabilities[class.index()] = 1.0;
        ActivityIntent { class, confidence: 1.0, probabilities }
    }
}

pub fn predict(
    net: &LstmNetwork,
    window: &FrameWindow,
    stride: usize,
) -> Result<ActivityIntent, RecognizerError> {
    let seq = window_to_features(window, stride)?;
    Ok(ActivityIntent::from_probabilities(net.forward(&seq)?))
}

/// Anything that turns a recorded window into an intent.
pub trait IntentRecognizer {
    fn recognize(&mut self, window: &FrameWindow) -> Result<ActivityIntent, RecognizerError>;
}

/// The trained network plus its feature stride.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmRecognizer {
    pub net: LstmNetwork,
    pub stride: usize,
}

impl LstmRecognizer {
    pub fn new(net: LstmNetwork) -> Self {
        LstmRecognizer { net, stride: DEFAULT_STRIDE }
    }
}

impl IntentRecognizer for LstmRecognizer {
    fn recognize(&mut self, window: &FrameWindow) -> Result<ActivityIntent, RecognizerError> {
        predict(&self.net, window, self.stride)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: FeatureSequence,
    pub label: usize,
}

/// Labeled sequences plus the set of classes they were drawn from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    samples: Vec<Sample>,
    classes: Vec<ActivityClass>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, classes: Vec<ActivityClass>) -> Self {
        Dataset { samples, classes }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn classes(&self) -> &[ActivityClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn validate(&self) -> Result<(), RecognizerError> {
        if self.samples.is_empty() {
            return Err(RecognizerError::EmptyDataset);
        }
        for s in &self.samples {
            if s.label >= NUM_CLASSES {
                return Err(RecognizerError::LabelOutOfRange(s.label));
            }
            if s.features.is_empty() {
                return Err(RecognizerError::EmptySequence);
            }
        }
        for c in &self.classes {
            if !self.samples.iter().any(|s| s.label == c.index()) {
                return Err(RecognizerError::EmptyClass(*c));
            }
        }
        Ok(())
    }
}
