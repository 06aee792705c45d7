use super::network::{softmax, LstmNetwork};
use super::RecognizerError;
use crate::skeleton::FRAME_DIM;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use crate::activity::NUM_CLASSES;
use crate::skeleton::FeatureSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    pub max_relative_error: f64,
    /// Flat parameter index where the maximum occurred.
    pub worst_index: usize,
    pub parameters: usize,
}

/// Central-difference derivative of the loss for every parameter, in
/// [`LstmNetwork::tensors`] order.
///
/// `L(θ+ε) - L(θ-ε)` is evaluated from the two logit vectors directly
/// rather than by subtracting two losses of order `ln 8`, which would leave
/// one ulp of the loss (about 1e-11 after dividing by `2ε`) in every entry.
pub fn numeric_gradient(
    net: &LstmNetwork,
    seq: &FeatureSequence,
    label: usize,
    epsilon: f64,
) -> Result<Vec<f64>, RecognizerError> {
    if label >= NUM_CLASSES {
        return Err(RecognizerError::LabelOutOfRange(label));
    }
    let mut probe = net.clone();
    let shape: Vec<usize> = net.tensors().iter().map(|t| t.len()).collect();
    let mut out = Vec::with_capacity(shape.iter().sum());
    for (ti, len) in shape.into_iter().enumerate() {
        for k in 0..len {
            let orig = probe.tensors()[ti][k];
            probe.tensors_mut()[ti][k] = orig + epsilon;
            let plus = probe.output_logits(seq)?;
            probe.tensors_mut()[ti][k] = orig - epsilon;
            let minus = probe.output_logits(seq)?;
            probe.tensors_mut()[ti][k] = orig;
            out.push(loss_difference(&plus, &minus, label) / (2.0 * epsilon));
        }
    }
    Ok(out)
}

/// Cross-entropy at logits `a` minus cross-entropy at logits `b`:
/// `ln Σ_k softmax(b)_k e^(a_k - b_k) - (a_label - b_label)`.
pub fn loss_difference(a: &[f64; NUM_CLASSES], b: &[f64; NUM_CLASSES], label: usize) -> f64 {
    let pb = softmax(b);
    let s: f64 = (0..NUM_CLASSES).map(|k| pb[k] * (a[k] - b[k]).exp_m1()).sum();
    s.ln_1p() - (a[label] - b[label])
}

/// Compares BPTT gradients with central finite differences over every
/// parameter: `max |g_a - g_n| / max(|g_a|, |g_n|, 1e-8)`.
pub fn gradient_check(
    net: &LstmNetwork,
    seq: &FeatureSequence,
    label: usize,
    epsilon: f64,
) -> Result<GradientReport, RecognizerError> {
    let mut grad = net.zeros_like();
    net.loss_and_gradient(seq, label, &mut grad)?;
    let numeric = numeric_gradient(net, seq, label, epsilon)?;
    let mut report = GradientReport {
        max_relative_error: 0.0,
        worst_index: 0,
        parameters: numeric.len(),
    };
    for (i, (a, n)) in grad.parameters().zip(numeric).enumerate() {
        let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
        if rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst_index = i;
        }
    }
    Ok(report)
}

/// A random small problem: hidden sizes 2..=8, 1..=5 steps of inputs in
/// `[-1, 1)`, a random label, and weights from the training initializer.
pub fn check_instance(seed: u64) -> (LstmNetwork, FeatureSequence, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = [rng.random_range(2..=8), rng.random_range(2..=8), rng.random_range(2..=8)];
    let net = LstmNetwork::random(hidden, 0.08, 1.0, &mut rng);
    let len = rng.random_range(1..=5);
    let steps = (0..len)
        .map(|_| {
            let mut s = [0.0; FRAME_DIM];
            for v in &mut s {
                *v = rng.random_range(-1.0..1.0);
            }
            s
        })
        .collect();
    (net, FeatureSequence::new(steps, 1), rng.random_range(0..NUM_CLASSES))
}

/// Worst report over `count` instances starting at `seed`.
pub fn gradient_check_many(seed: u64, count: u64, epsilon: f64) -> Result<GradientReport, RecognizerError> {
    let mut worst: Option<GradientReport> = None;
    for s in seed..seed + count {
        let (net, seq, label) = check_instance(s);
        let r = gradient_check(&net, &seq, label, epsilon)?;
        if worst.as_ref().is_none_or(|w| r.max_relative_error > w.max_relative_error) {
            worst = Some(r);
        }
    }
    worst.ok_or_else(|| RecognizerError::Config("count must be positive".into()))
}
