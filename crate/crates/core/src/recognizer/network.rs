//! Stacked LSTM with a softmax head, forward pass and backpropagation through
//! time.
//!
//! Gate pre-activations are stored stacked in `[i, f, o, g]` order, so each
//! layer holds one `4H × I` input matrix, one `4H × H` recurrent matrix and a
//! `4H` bias:
//!
//! ```text
//! i = σ(W_i x + U_i h + b_i)    f = σ(W_f x + U_f h + b_f)
//! o = σ(W_o x + U_o h + b_o)    g = tanh(W_g x + U_g h + b_g)
//! c' = f ⊙ c + i ⊙ g            h' = o ⊙ tanh(c')
//! ```

use rand::Rng;

use super::matrix::Matrix;
use super::RecognizerError;
use crate::activity::NUM_CLASSES;
use crate::skeleton::{FeatureSequence, FRAME_DIM};

pub const NUM_LAYERS: usize = 3;

/// Gate block order inside the stacked matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    Cell = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Output, Gate::Cell];

    pub fn suffix(self) -> &'static str {
        match self {
            Gate::Input => "i",
            Gate::Forget => "f",
            Gate::Output => "o",
            Gate::Cell => "g",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayerParams {
    input_dim: usize,
    hidden_dim: usize,
    pub(crate) w: Matrix,
    pub(crate) u: Matrix,
    pub(crate) b: Vec<f64>,
}

impl LstmLayerParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        LstmLayerParams {
            input_dim,
            hidden_dim,
            w: Matrix::zeros(4 * hidden_dim, input_dim),
            u: Matrix::zeros(4 * hidden_dim, hidden_dim),
            b: vec![0.0; 4 * hidden_dim],
        }
    }

    pub(crate) fn from_parts(
        input_dim: usize,
        hidden_dim: usize,
        w: Matrix,
        u: Matrix,
        b: Vec<f64>,
    ) -> Self {
        LstmLayerParams { input_dim, hidden_dim, w, u, b }
    }

    pub fn random<R: Rng>(input_dim: usize, hidden_dim: usize, range: f64, forget_bias: f64, rng: &mut R) -> Self {
        let w = Matrix::uniform(4 * hidden_dim, input_dim, range, rng);
        let u = Matrix::uniform(4 * hidden_dim, hidden_dim, range, rng);
        let mut b = vec![0.0; 4 * hidden_dim];
        b[hidden_dim..2 * hidden_dim].fill(forget_bias);
        LstmLayerParams { input_dim, hidden_dim, w, u, b }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    /// Rows of one gate in the input matrix (row-major `H × I`).
    pub fn w_gate(&self, gate: Gate) -> &[f64] {
        let n = self.hidden_dim * self.input_dim;
        &self.w.as_slice()[gate as usize * n..(gate as usize + 1) * n]
    }

    pub fn w_gate_mut(&mut self, gate: Gate) -> &mut [f64] {
        let n = self.hidden_dim * self.input_dim;
        &mut self.w.as_mut_slice()[gate as usize * n..(gate as usize + 1) * n]
    }

    pub fn u_gate(&self, gate: Gate) -> &[f64] {
        let n = self.hidden_dim * self.hidden_dim;
        &self.u.as_slice()[gate as usize * n..(gate as usize + 1) * n]
    }

    pub fn u_gate_mut(&mut self, gate: Gate) -> &mut [f64] {
        let n = self.hidden_dim * self.hidden_dim;
        &mut self.u.as_mut_slice()[gate as usize * n..(gate as usize + 1) * n]
    }

    pub fn b_gate(&self, gate: Gate) -> &[f64] {
        let h = self.hidden_dim;
        &self.b[gate as usize * h..(gate as usize + 1) * h]
    }

    pub fn b_gate_mut(&mut self, gate: Gate) -> &mut [f64] {
        let h = self.hidden_dim;
        &mut self.b[gate as usize * h..(gate as usize + 1) * h]
    }

    fn check(&self) -> bool {
        let h4 = 4 * self.hidden_dim;
        self.w.rows() == h4
            && self.w.cols() == self.input_dim
            && self.u.rows() == h4
            && self.u.cols() == self.hidden_dim
            && self.b.len() == h4
    }

    /// Post-activation gates `[i, f, o, g]` for one step.
    fn gates(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let hd = self.hidden_dim;
        let mut a = self.b.clone();
        self.w.mul_vec_add(x, &mut a);
        self.u.mul_vec_add(h, &mut a);
        for v in &mut a[..3 * hd] {
            *v = sigmoid(*v);
        }
        for v in &mut a[3 * hd..] {
            *v = v.tanh();
        }
        a
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One LSTM cell update; returns `(h', c')`.
pub fn lstm_cell_step(
    params: &LstmLayerParams,
    x: &[f64],
    h: &[f64],
    c: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), RecognizerError> {
    let hd = params.hidden_dim;
    for (got, expected) in [(x.len(), params.input_dim), (h.len(), hd), (c.len(), hd)] {
        if got != expected {
            return Err(RecognizerError::Dimension { expected, got });
        }
    }
    let g = params.gates(x, h);
    let mut c_next = vec![0.0; hd];
    let mut h_next = vec![0.0; hd];
    for k in 0..hd {
        c_next[k] = g[hd + k] * c[k] + g[k] * g[3 * hd + k];
        h_next[k] = g[2 * hd + k] * c_next[k].tanh();
    }
    Ok((h_next, c_next))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmNetwork {
    pub(crate) layers: Vec<LstmLayerParams>,
    pub(crate) out_w: Matrix,
    pub(crate) out_b: Vec<f64>,
}

impl LstmNetwork {
    /// All-zero weights: the network outputs a uniform distribution.
    pub fn zeros(hidden: [usize; NUM_LAYERS]) -> Self {
        let mut input = FRAME_DIM;
        let layers = hidden
            .iter()
            .map(|&h| {
                let l = LstmLayerParams::zeros(input, h);
                input = h;
                l
            })
            .collect();
        LstmNetwork {
            layers,
            out_w: Matrix::zeros(NUM_CLASSES, input),
            out_b: vec![0.0; NUM_CLASSES],
        }
    }

    pub fn random<R: Rng>(hidden: [usize; NUM_LAYERS], range: f64, forget_bias: f64, rng: &mut R) -> Self {
        let mut input = FRAME_DIM;
        let layers = hidden
            .iter()
            .map(|&h| {
                let l = LstmLayerParams::random(input, h, range, forget_bias, rng);
                input = h;
                l
            })
            .collect();
        LstmNetwork {
            layers,
            out_w: Matrix::uniform(NUM_CLASSES, input, range, rng),
            out_b: vec![0.0; NUM_CLASSES],
        }
    }

    pub(crate) fn from_parts(
        layers: Vec<LstmLayerParams>,
        out_w: Matrix,
        out_b: Vec<f64>,
    ) -> Result<Self, RecognizerError> {
        let net = LstmNetwork { layers, out_w, out_b };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<(), RecognizerError> {
        if self.layers.len() != NUM_LAYERS {
            return Err(RecognizerError::Architecture(format!(
                "expected {NUM_LAYERS} layers, got {}",
                self.layers.len()
            )));
        }
        let mut input = FRAME_DIM;
        for (k, l) in self.layers.iter().enumerate() {
            if l.input_dim != input || !l.check() {
                return Err(RecognizerError::Architecture(format!("layer {k} dimensions inconsistent")));
            }
            input = l.hidden_dim;
        }
        if self.out_w.rows() != NUM_CLASSES || self.out_w.cols() != input || self.out_b.len() != NUM_CLASSES {
            return Err(RecognizerError::Architecture("output head dimensions inconsistent".into()));
        }
        if self.parameters().any(|v| !v.is_finite()) {
            return Err(RecognizerError::Architecture("non-finite parameter".into()));
        }
        Ok(())
    }

    pub fn layers(&self) -> &[LstmLayerParams] {
        &self.layers
    }

    pub fn output_weights(&self) -> &Matrix {
        &self.out_w
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.out_b
    }

    pub fn output_weights_mut(&mut self) -> &mut Matrix {
        &mut self.out_w
    }

    pub fn output_bias_mut(&mut self) -> &mut [f64] {
        &mut self.out_b
    }

    pub fn layer_mut(&mut self, k: usize) -> &mut LstmLayerParams {
        &mut self.layers[k]
    }

    /// `[45, h1, h2, h3, 8]`
    pub fn arch(&self) -> Vec<usize> {
        let mut a = vec![FRAME_DIM];
        a.extend(self.layers.iter().map(|l| l.hidden_dim));
        a.push(NUM_CLASSES);
        a
    }

    pub fn hidden_sizes(&self) -> [usize; NUM_LAYERS] {
        let mut h = [0; NUM_LAYERS];
        for (o, l) in h.iter_mut().zip(&self.layers) {
            *o = l.hidden_dim;
        }
        h
    }

    /// Every tensor in a fixed order: per layer `w, u, b`, then head `w, b`.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::with_capacity(3 * self.layers.len() + 2);
        for l in &self.layers {
            out.push(l.w.as_slice());
            out.push(l.u.as_slice());
            out.push(&l.b);
        }
        out.push(self.out_w.as_slice());
        out.push(&self.out_b);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::with_capacity(3 * self.layers.len() + 2);
        for l in &mut self.layers {
            out.push(l.w.as_mut_slice());
            out.push(l.u.as_mut_slice());
            out.push(&mut l.b);
        }
        out.push(self.out_w.as_mut_slice());
        out.push(&mut self.out_b);
        out
    }

    pub fn parameters(&self) -> impl Iterator<Item = f64> + '_ {
        self.tensors().into_iter().flat_map(|t| t.iter().copied())
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.fill(0.0);
        }
        z
    }

    fn check_sequence(&self, seq: &FeatureSequence) -> Result<(), RecognizerError> {
        if seq.is_empty() {
            return Err(RecognizerError::EmptySequence);
        }
        Ok(())
    }

    /// Class probabilities after the final timestep.
    pub fn forward(&self, seq: &FeatureSequence) -> Result<[f64; NUM_CLASSES], RecognizerError> {
        Ok(softmax(&self.output_logits(seq)?))
    }

    /// Pre-softmax scores after the final timestep.
    pub fn output_logits(&self, seq: &FeatureSequence) -> Result<[f64; NUM_CLASSES], RecognizerError> {
        self.check_sequence(seq)?;
        let mut input: Vec<Vec<f64>> = seq.steps().iter().map(|s| s.to_vec()).collect();
        for layer in &self.layers {
            let hd = layer.hidden_dim;
            let mut h = vec![0.0; hd];
            let mut c = vec![0.0; hd];
            let mut outputs = Vec::with_capacity(input.len());
            for x in &input {
                let (hn, cn) = lstm_cell_step(layer, x, &h, &c)?;
                h = hn;
                c = cn;
                outputs.push(h.clone());
            }
            input = outputs;
        }
        let last = input.last().expect("non-empty sequence");
        Ok(self.logits(last))
    }

    fn logits(&self, h: &[f64]) -> [f64; NUM_CLASSES] {
        let mut z = [0.0; NUM_CLASSES];
        z.copy_from_slice(&self.out_b);
        self.out_w.mul_vec_add(h, &mut z);
        z
    }

    /// Cross-entropy loss of one labeled sequence; accumulates its gradient
    /// into `grad` (a network of identical shape).
    pub fn loss_and_gradient(
        &self,
        seq: &FeatureSequence,
        label: usize,
        grad: &mut LstmNetwork,
    ) -> Result<f64, RecognizerError> {
        self.check_sequence(seq)?;
        if label >= NUM_CLASSES {
            return Err(RecognizerError::LabelOutOfRange(label));
        }
        let traces = self.trace(seq);
        let top = traces.last().expect("three layers");
        let h_last = top.h.last().expect("non-empty");
        let probs = softmax(&self.logits(h_last));
        let loss = -probs[label].max(f64::MIN_POSITIVE).ln();

        // softmax + cross-entropy: dz = p - onehot
        let mut dz = probs;
        dz[label] -= 1.0;
        grad.out_w.add_outer(&dz, h_last);
        for (g, d) in grad.out_b.iter_mut().zip(dz) {
            *g += d;
        }
        let steps = seq.len();
        let mut dh_seq: Vec<Vec<f64>> = vec![vec![0.0; top.hidden]; steps];
        self.out_w.mul_t_vec_add(&dz, &mut dh_seq[steps - 1]);

        for (k, (layer, trace)) in self.layers.iter().zip(&traces).enumerate().rev() {
            let need_dx = k > 0;
            dh_seq = backward_layer(layer, trace, &dh_seq, &mut grad.layers[k], need_dx);
        }
        Ok(loss)
    }

    pub fn loss(&self, seq: &FeatureSequence, label: usize) -> Result<f64, RecognizerError> {
        if label >= NUM_CLASSES {
            return Err(RecognizerError::LabelOutOfRange(label));
        }
        let p = self.forward(seq)?;
        Ok(-p[label].max(f64::MIN_POSITIVE).ln())
    }

    fn trace(&self, seq: &FeatureSequence) -> Vec<LayerTrace> {
        let mut traces: Vec<LayerTrace> = Vec::with_capacity(self.layers.len());
        for (k, layer) in self.layers.iter().enumerate() {
            let inputs: Vec<Vec<f64>> = if k == 0 {
                seq.steps().iter().map(|s| s.to_vec()).collect()
            } else {
                traces[k - 1].h[1..].to_vec()
            };
            traces.push(LayerTrace::run(layer, inputs));
        }
        traces
    }
}

/// Forward activations of one layer kept for the backward pass.
struct LayerTrace {
    hidden: usize,
    inputs: Vec<Vec<f64>>,
    /// `h[0]` is the zero initial state.
    h: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    gates: Vec<Vec<f64>>,
    tanh_c: Vec<Vec<f64>>,
}

impl LayerTrace {
    fn run(layer: &LstmLayerParams, inputs: Vec<Vec<f64>>) -> Self {
        let hd = layer.hidden_dim;
        let n = inputs.len();
        let mut h = Vec::with_capacity(n + 1);
        let mut c = Vec::with_capacity(n + 1);
        let mut gates = Vec::with_capacity(n);
        let mut tanh_c = Vec::with_capacity(n);
        h.push(vec![0.0; hd]);
        c.push(vec![0.0; hd]);
        for (t, x) in inputs.iter().enumerate() {
            let g = layer.gates(x, &h[t]);
            let mut cn = vec![0.0; hd];
            let mut tc = vec![0.0; hd];
            let mut hn = vec![0.0; hd];
            for k in 0..hd {
                cn[k] = g[hd + k] * c[t][k] + g[k] * g[3 * hd + k];
                tc[k] = cn[k].tanh();
                hn[k] = g[2 * hd + k] * tc[k];
            }
            gates.push(g);
            tanh_c.push(tc);
            h.push(hn);
            c.push(cn);
        }
        LayerTrace { hidden: hd, inputs, h, c, gates, tanh_c }
    }
}

/// BPTT through one layer given `∂L/∂h_t` from above; returns `∂L/∂x_t`.
fn backward_layer(
    layer: &LstmLayerParams,
    trace: &LayerTrace,
    dh_above: &[Vec<f64>],
    grad: &mut LstmLayerParams,
    need_dx: bool,
) -> Vec<Vec<f64>> {
    let hd = layer.hidden_dim;
    let steps = trace.inputs.len();
    let mut dx_seq = if need_dx {
        vec![vec![0.0; layer.input_dim]; steps]
    } else {
        Vec::new()
    };
    let mut dh_next = vec![0.0; hd];
    let mut dc_next = vec![0.0; hd];
    let mut da = vec![0.0; 4 * hd];
    for t in (0..steps).rev() {
        let g = &trace.gates[t];
        let tc = &trace.tanh_c[t];
        let c_prev = &trace.c[t];
        for k in 0..hd {
            let (i, f, o, gg) = (g[k], g[hd + k], g[2 * hd + k], g[3 * hd + k]);
            let dh = dh_above[t][k] + dh_next[k];
            let dc = dh * o * (1.0 - tc[k] * tc[k]) + dc_next[k];
            da[k] = dc * gg * i * (1.0 - i);
            da[hd + k] = dc * c_prev[k] * f * (1.0 - f);
            da[2 * hd + k] = dh * tc[k] * o * (1.0 - o);
            da[3 * hd + k] = dc * i * (1.0 - gg * gg);
            dc_next[k] = dc * f;
        }
        grad.w.add_outer(&da, &trace.inputs[t]);
        grad.u.add_outer(&da, &trace.h[t]);
        for (b, d) in grad.b.iter_mut().zip(&da) {
            *b += d;
        }
        dh_next.fill(0.0);
        layer.u.mul_t_vec_add(&da, &mut dh_next);
        if need_dx {
            layer.w.mul_t_vec_add(&da, &mut dx_seq[t]);
        }
    }
    dx_seq
}

pub fn softmax(z: &[f64; NUM_CLASSES]) -> [f64; NUM_CLASSES] {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p = [0.0; NUM_CLASSES];
    let mut sum = 0.0;
    for (pi, zi) in p.iter_mut().zip(z) {
        *pi = (zi - max).exp();
        sum += *pi;
    }
    for pi in &mut p {
        *pi /= sum;
    }
    p
}
