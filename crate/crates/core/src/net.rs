//! Stacked LSTM with a dense read-out, parameterized by one flat weight vector.
//!
//! Flat layout, layer by layer from the input side:
//!
//! ```text
//! W  (4h x d)  input kernel, row-major, gate blocks in order input, forget, cell, output
//! U  (4h x h)  recurrent kernel, same gate order
//! b  (4h)      bias
//! ```
//!
//! followed by the read-out `V (out x h_last)` and `c (out)`. The hidden and
//! cell states start at zero for every window.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::{Partition, SeriesDataset, WindowSet};
use crate::error::{ResnError, Result};
use crate::genome::ArchGenome;

/// Windows per forward chunk in batched inference.
const INFERENCE_CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputActivation {
    #[default]
    Sigmoid,
    Linear,
    Tanh,
}

impl OutputActivation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Self::Sigmoid => sigmoid(x),
            Self::Linear => x,
            Self::Tanh => tanh(x),
        }
    }

    /// Derivative expressed through the activated value `y`.
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Self::Sigmoid => y * (1.0 - y),
            Self::Linear => 1.0,
            Self::Tanh => 1.0 - y * y,
        }
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `tanh` through a single `exp`, about twice as fast as `f64::tanh` and
/// within a few ulps of it. Small arguments use the library call to avoid
/// cancellation in `1 - e`.
#[inline]
pub(crate) fn tanh(x: f64) -> f64 {
    let a = x.abs();
    if a < 0.3 {
        return x.tanh();
    }
    let e = (-2.0 * a).exp();
    ((1.0 - e) / (1.0 + e)).copysign(x)
}

/// Number of scalar weights of a genome's network.
pub fn param_count(genome: &ArchGenome, input_dim: usize, output_dim: usize) -> usize {
    Layout::new(genome, input_dim, output_dim).total
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LayerSpan {
    pub input: usize,
    pub hidden: usize,
    pub w: usize,
    pub u: usize,
    pub b: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub layers: Vec<LayerSpan>,
    pub dense_w: usize,
    pub dense_b: usize,
    pub total: usize,
}

impl Layout {
    fn new(genome: &ArchGenome, input_dim: usize, output_dim: usize) -> Self {
        let mut offset = 0;
        let mut d = input_dim;
        let mut layers = Vec::with_capacity(genome.hidden_layers());
        for &h in genome.hidden() {
            let w = offset;
            let u = w + 4 * h * d;
            let b = u + 4 * h * h;
            offset = b + 4 * h;
            layers.push(LayerSpan { input: d, hidden: h, w, u, b });
            d = h;
        }
        let dense_w = offset;
        let dense_b = dense_w + output_dim * d;
        Self {
            layers,
            dense_w,
            dense_b,
            total: dense_b + output_dim,
        }
    }
}

/// Predictions `z` against targets `y`, both `windows x output_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBatch {
    predictions: Array2<f64>,
    targets: Array2<f64>,
}

impl PredictionBatch {
    pub fn new(predictions: Array2<f64>, targets: Array2<f64>) -> Result<Self> {
        if predictions.dim() != targets.dim() {
            return Err(ResnError::Shape(format!(
                "predictions {:?} vs targets {:?}",
                predictions.dim(),
                targets.dim()
            )));
        }
        Ok(Self { predictions, targets })
    }

    pub fn predictions(&self) -> &Array2<f64> {
        &self.predictions
    }

    pub fn targets(&self) -> &Array2<f64> {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }
}

/// Per-layer activations kept for backpropagation through time.
#[derive(Debug, Clone)]
pub(crate) struct LayerTrace {
    /// Layer inputs after dropout, one `batch x d` matrix per step.
    pub inputs: Vec<Array2<f64>>,
    /// Dropout masks already scaled by `1 / (1 - p)`.
    pub masks: Option<Vec<Array2<f64>>>,
    /// Activated gates `[i | f | g | o]`, `batch x 4h` per step.
    pub gates: Vec<Array2<f64>>,
    pub cells: Vec<Array2<f64>>,
    pub hidden: Vec<Array2<f64>>,
}

#[derive(Debug, Clone)]
pub(crate) struct Trace {
    pub layers: Vec<LayerTrace>,
    /// Read-out input after dropout.
    pub readout_input: Array2<f64>,
    pub readout_mask: Option<Array2<f64>>,
    pub output: Array2<f64>,
}

/// Inverted-dropout masks, already scaled by `1 / (1 - p)`. `layers[l][t]`
/// multiplies layer `l`'s input at step `t`; `readout` multiplies the last
/// hidden state before the dense layer.
#[derive(Debug, Clone, Default)]
pub(crate) struct DropoutMasks {
    pub layers: Vec<Option<Vec<Array2<f64>>>>,
    pub readout: Option<Array2<f64>>,
}

#[derive(Debug, Clone)]
pub struct StackedRnn {
    genome: ArchGenome,
    input_dim: usize,
    output_dim: usize,
    output_activation: OutputActivation,
    weights: Vec<f64>,
    layout: Layout,
}

impl StackedRnn {
    /// Builds a network with all weights zero.
    pub fn new(
        genome: ArchGenome,
        input_dim: usize,
        output_dim: usize,
        output_activation: OutputActivation,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(ResnError::Shape("input and output dimensions must be positive".into()));
        }
        let layout = Layout::new(&genome, input_dim, output_dim);
        Ok(Self {
            genome,
            input_dim,
            output_dim,
            output_activation,
            weights: vec![0.0; layout.total],
            layout,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.set_weights(weights)?;
        Ok(self)
    }

    pub fn genome(&self) -> &ArchGenome {
        &self.genome
    }

    pub fn look_back(&self) -> usize {
        self.genome.look_back()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output_activation
    }

    pub fn param_count(&self) -> usize {
        self.layout.total
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.layout.total {
            return Err(ResnError::Shape(format!(
                "expected {} weights, got {}",
                self.layout.total,
                weights.len()
            )));
        }
        self.weights = weights;
        Ok(())
    }

    pub(crate) fn kernel(&self, span: &LayerSpan) -> ArrayView2<'_, f64> {
        let n = 4 * span.hidden * span.input;
        ArrayView2::from_shape((4 * span.hidden, span.input), &self.weights[span.w..span.w + n])
            .expect("layout")
    }

    pub(crate) fn recurrent(&self, span: &LayerSpan) -> ArrayView2<'_, f64> {
        let n = 4 * span.hidden * span.hidden;
        ArrayView2::from_shape((4 * span.hidden, span.hidden), &self.weights[span.u..span.u + n])
            .expect("layout")
    }

    pub(crate) fn bias(&self, span: &LayerSpan) -> ArrayView1<'_, f64> {
        ArrayView1::from(&self.weights[span.b..span.b + 4 * span.hidden])
    }

    pub(crate) fn dense(&self) -> (ArrayView2<'_, f64>, ArrayView1<'_, f64>) {
        let h = self.genome.hidden().last().copied().unwrap_or(self.input_dim);
        let l = &self.layout;
        let v = ArrayView2::from_shape((self.output_dim, h), &self.weights[l.dense_w..l.dense_b])
            .expect("layout");
        let c = ArrayView1::from(&self.weights[l.dense_b..l.total]);
        (v, c)
    }

    /// Prediction for a single `look_back x input_dim` window.
    pub fn forward(&self, window: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if window.dim() != (self.look_back(), self.input_dim) {
            return Err(ResnError::Shape(format!(
                "window is {:?}, network expects ({}, {})",
                window.dim(),
                self.look_back(),
                self.input_dim
            )));
        }
        let xs: Vec<Array2<f64>> = window
            .axis_iter(Axis(0))
            .map(|row| row.to_owned().insert_axis(Axis(0)))
            .collect();
        Ok(self.forward_batch(xs).row(0).to_owned())
    }

    /// Batched inference over time-major inputs (`look_back` matrices of
    /// `batch x input_dim`). Returns `batch x output_dim`.
    pub(crate) fn forward_batch(&self, mut xs: Vec<Array2<f64>>) -> Array2<f64> {
        let batch = xs[0].nrows();
        for span in &self.layout.layers {
            let (w, u, b) = (self.kernel(span), self.recurrent(span), self.bias(span));
            let h = span.hidden;
            let mut gates = Array2::zeros((batch, 4 * h));
            let mut cell = Array2::zeros((batch, h));
            let mut hidden = Array2::<f64>::zeros((batch, h));
            let steps = xs.len();
            for (t, x) in xs.iter_mut().enumerate() {
                step(&mut gates, x, &hidden, t > 0, w, u, b);
                cell_update_in_place(&gates, &mut cell, &mut hidden);
                if t + 1 < steps {
                    // The input at step t is no longer needed; reuse its slot.
                    *x = hidden.clone();
                }
            }
            *xs.last_mut().expect("look-back >= 1") = hidden;
        }
        self.read_out(xs.last().expect("look-back >= 1"))
    }

    /// Forward pass recording everything BPTT needs.
    pub(crate) fn forward_trace(&self, xs: Vec<Array2<f64>>, masks: Option<DropoutMasks>) -> Trace {
        let batch = xs[0].nrows();
        let DropoutMasks { layers: layer_mask_list, readout: readout_mask } = masks.unwrap_or_default();
        let mut masks = layer_mask_list.into_iter();
        let mut layer_inputs = xs;
        let mut layers = Vec::with_capacity(self.layout.layers.len());
        for span in &self.layout.layers {
            let (w, u, b) = (self.kernel(span), self.recurrent(span), self.bias(span));
            let h = span.hidden;
            let layer_masks = masks.next().flatten();
            if let Some(lm) = &layer_masks {
                for (x, m) in layer_inputs.iter_mut().zip(lm) {
                    *x *= m;
                }
            }
            let steps = layer_inputs.len();
            let mut gates_seq = Vec::with_capacity(steps);
            let mut cells = Vec::with_capacity(steps);
            let mut hidden_seq: Vec<Array2<f64>> = Vec::with_capacity(steps);
            let zero = Array2::zeros((batch, h));
            for (t, x) in layer_inputs.iter().enumerate() {
                let mut gates = Array2::zeros((batch, 4 * h));
                let (h_prev, c_prev) = if t == 0 {
                    (&zero, &zero)
                } else {
                    (&hidden_seq[t - 1], &cells[t - 1])
                };
                step(&mut gates, x, h_prev, t > 0, w, u, b);
                let (c_new, h_new) = cell_update(&gates, c_prev);
                gates_seq.push(gates);
                cells.push(c_new);
                hidden_seq.push(h_new);
            }
            let next_inputs = hidden_seq.clone();
            layers.push(LayerTrace {
                inputs: layer_inputs,
                masks: layer_masks,
                gates: gates_seq,
                cells,
                hidden: hidden_seq,
            });
            layer_inputs = next_inputs;
        }
        let mut readout_input = layer_inputs.pop().expect("look-back >= 1");
        if let Some(m) = &readout_mask {
            readout_input *= m;
        }
        let output = self.read_out(&readout_input);
        Trace {
            layers,
            readout_input,
            readout_mask,
            output,
        }
    }

    fn read_out(&self, last_hidden: &Array2<f64>) -> Array2<f64> {
        let (v, c) = self.dense();
        let mut out = Array2::zeros((last_hidden.nrows(), self.output_dim));
        out += &c;
        general_mat_mul(1.0, last_hidden, &v.t(), 1.0, &mut out);
        let act = self.output_activation;
        out.mapv_inplace(|x| act.apply(x));
        out
    }

    /// Predictions for every window, in order.
    pub fn predict_windows(&self, windows: &WindowSet) -> Result<Array2<f64>> {
        self.check_windows(windows)?;
        let n = windows.len();
        let mut out = Array2::zeros((n, self.output_dim));
        let mut start = 0;
        while start < n {
            let end = (start + INFERENCE_CHUNK).min(n);
            let rows: Vec<usize> = (start..end).collect();
            let pred = self.forward_batch(windows.time_major(&rows));
            out.slice_mut(ndarray::s![start..end, ..]).assign(&pred);
            start = end;
        }
        Ok(out)
    }

    pub(crate) fn check_windows(&self, windows: &WindowSet) -> Result<()> {
        if windows.is_empty() {
            return Err(ResnError::Empty("no windows to evaluate".into()));
        }
        if windows.look_back() != self.look_back()
            || windows.input_dim() != self.input_dim
            || windows.output_dim() != self.output_dim
        {
            return Err(ResnError::Shape(format!(
                "windows (lb {}, in {}, out {}) do not fit network (lb {}, in {}, out {})",
                windows.look_back(),
                windows.input_dim(),
                windows.output_dim(),
                self.look_back(),
                self.input_dim,
                self.output_dim
            )));
        }
        Ok(())
    }

    /// One prediction per window of `partition`, paired with its target.
    pub fn predict_series(
        &self,
        dataset: &SeriesDataset,
        partition: Partition,
    ) -> Result<PredictionBatch> {
        let windows = dataset.window(self.look_back(), partition)?;
        let predictions = self.predict_windows(&windows)?;
        PredictionBatch::new(predictions, windows.targets)
    }
}

/// `gates <- x W^T + h U^T + b`, then gate nonlinearities in place.
fn step(
    gates: &mut Array2<f64>,
    x: &Array2<f64>,
    h_prev: &Array2<f64>,
    use_recurrent: bool,
    w: ArrayView2<'_, f64>,
    u: ArrayView2<'_, f64>,
    b: ArrayView1<'_, f64>,
) {
    gates.assign(&b);
    general_mat_mul(1.0, x, &w.t(), 1.0, gates);
    if use_recurrent {
        general_mat_mul(1.0, h_prev, &u.t(), 1.0, gates);
    }
    let h = gates.ncols() / 4;
    for mut row in gates.rows_mut() {
        let r = row.as_slice_mut().expect("standard layout");
        for v in &mut r[..2 * h] {
            *v = sigmoid(*v);
        }
        for v in &mut r[2 * h..3 * h] {
            *v = tanh(*v);
        }
        for v in &mut r[3 * h..] {
            *v = sigmoid(*v);
        }
    }
}

/// In-place form of [`cell_update`] for inference.
fn cell_update_in_place(gates: &Array2<f64>, cell: &mut Array2<f64>, hidden: &mut Array2<f64>) {
    let h = cell.ncols();
    for ((g, mut c), mut hid) in gates.rows().into_iter().zip(cell.rows_mut()).zip(hidden.rows_mut()) {
        let g = g.as_slice().expect("standard layout");
        let c = c.as_slice_mut().expect("standard layout");
        let hid = hid.as_slice_mut().expect("standard layout");
        for j in 0..h {
            c[j] = g[h + j] * c[j] + g[j] * g[2 * h + j];
            hid[j] = g[3 * h + j] * tanh(c[j]);
        }
    }
}

/// `c = f * c_prev + i * g`, `h = o * tanh(c)`.
fn cell_update(gates: &Array2<f64>, c_prev: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let (batch, h) = c_prev.dim();
    let mut c = Array2::zeros((batch, h));
    let mut hid = Array2::zeros((batch, h));
    for r in 0..batch {
        let g = gates.row(r);
        let g = g.as_slice().expect("standard layout");
        let cp = c_prev.row(r);
        let cp = cp.as_slice().expect("standard layout");
        let mut crow = c.row_mut(r);
        let cr = crow.as_slice_mut().expect("standard layout");
        for j in 0..h {
            cr[j] = g[h + j] * cp[j] + g[j] * g[2 * h + j];
        }
        let mut hrow = hid.row_mut(r);
        let hr = hrow.as_slice_mut().expect("standard layout");
        for j in 0..h {
            hr[j] = g[3 * h + j] * tanh(cr[j]);
        }
    }
    (c, hid)
}

#[cfg(test)]
mod tests {
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn genome(v: &[usize]) -> ArchGenome {
        ArchGenome::new(v.to_vec()).unwrap()
    }

    /// Weight enumeration oracle: walks every gate matrix entry one by one.
    fn enumerate_weights(hidden: &[usize], input: usize, output: usize) -> usize {
        let mut count = 0;
        let mut d = input;
        for &h in hidden {
            for _gate in 0..4 {
                for _cell in 0..h {
                    count += d; // input kernel row
                    count += h; // recurrent kernel row
                    count += 1; // bias
                }
            }
            d = h;
        }
        for _o in 0..output {
            count += d + 1;
        }
        count
    }

    #[test]
    fn param_count_examples() {
        assert_eq!(param_count(&genome(&[1, 1]), 1, 1), 14);
        assert_eq!(param_count(&genome(&[2, 2, 3]), 1, 1), 108);
        assert_eq!(enumerate_weights(&[2, 3], 1, 1), 108);
        let big = genome(&[30, 100, 100, 100]);
        let a = param_count(&big, 217, 217);
        assert_eq!(a, param_count(&big, 217, 217));
        assert_eq!(a, enumerate_weights(&[100, 100, 100], 217, 217));
    }

    #[test]
    fn zero_weights_outputs() {
        let g = genome(&[3, 4, 2]);
        let window = Array2::from_elem((3, 2), 0.7);
        let sig = StackedRnn::new(g.clone(), 2, 3, OutputActivation::Sigmoid).unwrap();
        assert_eq!(sig.forward(window.view()).unwrap(), array![0.5, 0.5, 0.5]);
        let lin = StackedRnn::new(g, 2, 3, OutputActivation::Linear).unwrap();
        assert_eq!(lin.forward(window.view()).unwrap(), array![0.0, 0.0, 0.0]);
    }

    #[test]
    fn forward_rejects_wrong_shape() {
        let net = StackedRnn::new(genome(&[3, 2]), 1, 1, OutputActivation::Sigmoid).unwrap();
        assert!(net.forward(Array2::zeros((2, 1)).view()).is_err());
        assert!(net.forward(Array2::zeros((3, 2)).view()).is_err());
    }

    /// Straight-line LSTM written from the textbook equations, one scalar at a time.
    fn reference_forward(
        hidden: &[usize],
        input_dim: usize,
        weights: &[f64],
        window: &[Vec<f64>],
        act: OutputActivation,
    ) -> Vec<f64> {
        let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
        let mut seq: Vec<Vec<f64>> = window.to_vec();
        let mut off = 0;
        let mut d = input_dim;
        for &h in hidden {
            let w = &weights[off..off + 4 * h * d];
            let u = &weights[off + 4 * h * d..off + 4 * h * d + 4 * h * h];
            let b = &weights[off + 4 * h * (d + h)..off + 4 * h * (d + h + 1)];
            off += 4 * h * (d + h + 1);
            let mut hs = vec![0.0; h];
            let mut cs = vec![0.0; h];
            let mut out = Vec::new();
            for x in &seq {
                let pre = |gate: usize, j: usize, hs: &[f64]| {
                    let row = gate * h + j;
                    let mut s = b[row];
                    for k in 0..d {
                        s += w[row * d + k] * x[k];
                    }
                    for k in 0..h {
                        s += u[row * h + k] * hs[k];
                    }
                    s
                };
                let mut nh = vec![0.0; h];
                let mut nc = vec![0.0; h];
                for j in 0..h {
                    let i = sig(pre(0, j, &hs));
                    let f = sig(pre(1, j, &hs));
                    let g = pre(2, j, &hs).tanh();
                    let o = sig(pre(3, j, &hs));
                    nc[j] = f * cs[j] + i * g;
                    nh[j] = o * nc[j].tanh();
                }
                hs = nh;
                cs = nc;
                out.push(hs.clone());
            }
            seq = out;
            d = h;
        }
        let last = seq.last().unwrap();
        let out_dim = (weights.len() - off) / (d + 1);
        (0..out_dim)
            .map(|o| {
                let mut s = weights[off + out_dim * d + o];
                for k in 0..d {
                    s += weights[off + o * d + k] * last[k];
                }
                act.apply(s)
            })
            .collect()
    }

    #[test]
    fn matches_reference_implementation() {
        let g = genome(&[2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = param_count(&g, 1, 1);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let net = StackedRnn::new(g, 1, 1, OutputActivation::Sigmoid)
            .unwrap()
            .with_weights(w.clone())
            .unwrap();
        let got = net.forward(array![[0.1], [0.2]].view()).unwrap();
        let want = reference_forward(&[3], 1, &w, &[vec![0.1], vec![0.2]], OutputActivation::Sigmoid);
        assert!((got[0] - want[0]).abs() < 1e-14, "{} vs {}", got[0], want[0]);

        // deeper, multi-output, tanh head
        let g = genome(&[4, 3, 2, 5]);
        let n = param_count(&g, 2, 3);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let net = StackedRnn::new(g, 2, 3, OutputActivation::Tanh)
            .unwrap()
            .with_weights(w.clone())
            .unwrap();
        let window: Vec<Vec<f64>> = (0..4).map(|t| vec![t as f64 * 0.3, -0.5]).collect();
        let arr = Array2::from_shape_fn((4, 2), |(t, k)| window[t][k]);
        let got = net.forward(arr.view()).unwrap();
        let want = reference_forward(&[3, 2, 5], 2, &w, &window, OutputActivation::Tanh);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn batched_matches_single() {
        let g = genome(&[3, 5, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = param_count(&g, 2, 1);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let net = StackedRnn::new(g, 2, 1, OutputActivation::Linear)
            .unwrap()
            .with_weights(w)
            .unwrap();
        let inputs = ndarray::Array3::from_shape_fn((6, 3, 2), |(k, t, f)| (k * 7 + t * 3 + f) as f64 * 0.05);
        let windows = WindowSet {
            inputs: inputs.clone(),
            targets: Array2::zeros((6, 1)),
            first_target_row: 0,
        };
        let batched = net.predict_windows(&windows).unwrap();
        for k in 0..6 {
            let single = net.forward(inputs.index_axis(Axis(0), k)).unwrap();
            assert!((single[0] - batched[[k, 0]]).abs() < 1e-14);
        }
    }

    #[test]
    fn set_weights_checks_length() {
        let mut net = StackedRnn::new(genome(&[2, 2]), 1, 1, OutputActivation::Sigmoid).unwrap();
        assert!(net.set_weights(vec![0.0; 3]).is_err());
        let n = net.param_count();
        let w: Vec<f64> = (0..n).map(|i| i as f64).collect();
        net.set_weights(w.clone()).unwrap();
        assert_eq!(net.weights(), &w[..]);
    }
}
