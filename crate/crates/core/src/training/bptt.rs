//! Backpropagation through time for [`StackedRnn`].

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayViewMut1, ArrayViewMut2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::WindowSet;
use crate::error::Result;
use crate::net::{tanh, StackedRnn, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    #[default]
    Mae,
    Mse,
}

impl Loss {
    /// Mean loss over every entry.
    pub fn value(self, predictions: &Array2<f64>, targets: &Array2<f64>) -> f64 {
        let n = predictions.len() as f64;
        let sum: f64 = predictions
            .iter()
            .zip(targets)
            .map(|(z, y)| match self {
                Loss::Mae => (z - y).abs(),
                Loss::Mse => (z - y).powi(2),
            })
            .sum();
        sum / n
    }

    fn derivative(self, residual: f64, n: f64) -> f64 {
        match self {
            // subgradient 0 at a zero residual
            Loss::Mae => {
                if residual > 0.0 {
                    1.0 / n
                } else if residual < 0.0 {
                    -1.0 / n
                } else {
                    0.0
                }
            }
            Loss::Mse => 2.0 * residual / n,
        }
    }
}

/// Gradient of the mean batch loss over all windows, no dropout.
pub fn bptt_gradient(net: &StackedRnn, windows: &WindowSet, loss: Loss) -> Result<Vec<f64>> {
    net.check_windows(windows)?;
    let rows: Vec<usize> = (0..windows.len()).collect();
    let trace = net.forward_trace(windows.time_major(&rows), None);
    Ok(backward(net, &trace, &windows.targets, loss).1)
}

/// Returns `(loss, gradient)` for a recorded forward pass.
pub(crate) fn backward(
    net: &StackedRnn,
    trace: &Trace,
    targets: &Array2<f64>,
    loss: Loss,
) -> (f64, Vec<f64>) {
    let layout = net.layout();
    let mut grad = vec![0.0; net.param_count()];
    let output = &trace.output;
    let n = output.len() as f64;
    let loss_value = loss.value(output, targets);

    let act = net.output_activation();
    let mut d_pre = Array2::zeros(output.raw_dim());
    for ((d, &y), &t) in d_pre.iter_mut().zip(output).zip(targets) {
        *d = loss.derivative(y - t, n) * act.derivative_from_output(y);
    }

    let top = trace.layers.last().expect("at least one layer");
    let last_hidden = &trace.readout_input;
    let (v, _) = net.dense();
    let h_last = last_hidden.ncols();
    {
        let (dv_slice, rest) = grad[layout.dense_w..].split_at_mut(net.output_dim() * h_last);
        let mut dv = ArrayViewMut2::from_shape((net.output_dim(), h_last), dv_slice).expect("layout");
        general_mat_mul(1.0, &d_pre.t(), last_hidden, 0.0, &mut dv);
        let mut dc = ArrayViewMut1::from(&mut rest[..net.output_dim()]);
        dc.assign(&d_pre.sum_axis(Axis(0)));
    }

    let steps = top.hidden.len();
    let batch = last_hidden.nrows();
    // Gradient w.r.t. each layer's output sequence; starts with the read-out.
    let mut d_out: Vec<Option<Array2<f64>>> = vec![None; steps];
    let mut d_top = d_pre.dot(&v);
    if let Some(m) = &trace.readout_mask {
        d_top *= m;
    }
    d_out[steps - 1] = Some(d_top);

    for (l, span) in layout.layers.iter().enumerate().rev() {
        let lt = &trace.layers[l];
        let h = span.hidden;
        let d = span.input;
        let w = net.kernel(span);
        let u = net.recurrent(span);

        let mut da_seq: Vec<Array2<f64>> = vec![Array2::zeros((0, 0)); steps];
        let mut dh_next = Array2::<f64>::zeros((batch, h));
        let mut dc_next = Array2::<f64>::zeros((batch, h));
        for t in (0..steps).rev() {
            let mut dh = dh_next;
            if let Some(extra) = &d_out[t] {
                dh += extra;
            }
            let gates = &lt.gates[t];
            let cells = &lt.cells[t];
            let mut da = Array2::zeros((batch, 4 * h));
            let mut dc_prev = Array2::zeros((batch, h));
            for r in 0..batch {
                let g = gates.row(r);
                let g = g.as_slice().expect("standard layout");
                let c = cells.row(r);
                let c = c.as_slice().expect("standard layout");
                let c_prev_row = (t > 0).then(|| lt.cells[t - 1].row(r));
                let dh_r = dh.row(r);
                let dc_n = dc_next.row(r);
                let mut da_row = da.row_mut(r);
                let da_r = da_row.as_slice_mut().expect("standard layout");
                let mut dcp_row = dc_prev.row_mut(r);
                let dcp = dcp_row.as_slice_mut().expect("standard layout");
                for j in 0..h {
                    let (i, f, gg, o) = (g[j], g[h + j], g[2 * h + j], g[3 * h + j]);
                    let tc = tanh(c[j]);
                    let dhj = dh_r[j];
                    let d_o = dhj * tc;
                    let dc = dc_n[j] + dhj * o * (1.0 - tc * tc);
                    let cp = c_prev_row.as_ref().map_or(0.0, |row| row[j]);
                    da_r[j] = dc * gg * i * (1.0 - i);
                    da_r[h + j] = dc * cp * f * (1.0 - f);
                    da_r[2 * h + j] = dc * i * (1.0 - gg * gg);
                    da_r[3 * h + j] = d_o * o * (1.0 - o);
                    dcp[j] = dc * f;
                }
            }
            dh_next = if t > 0 { da.dot(&u) } else { Array2::zeros((batch, h)) };
            dc_next = dc_prev;
            da_seq[t] = da;
        }

        let (dw_slice, rest) = grad[span.w..].split_at_mut(4 * h * d);
        let (du_slice, rest) = rest.split_at_mut(4 * h * h);
        let db_slice = &mut rest[..4 * h];
        let mut dw = ArrayViewMut2::from_shape((4 * h, d), dw_slice).expect("layout");
        let mut du = ArrayViewMut2::from_shape((4 * h, h), du_slice).expect("layout");
        let mut db = ArrayViewMut1::from(db_slice);
        for t in 0..steps {
            let da = &da_seq[t];
            general_mat_mul(1.0, &da.t(), &lt.inputs[t], 1.0, &mut dw);
            if t > 0 {
                general_mat_mul(1.0, &da.t(), &lt.hidden[t - 1], 1.0, &mut du);
            }
            db += &da.sum_axis(Axis(0));
        }

        if l > 0 {
            d_out = (0..steps)
                .map(|t| {
                    let mut dx = da_seq[t].dot(&w);
                    if let Some(masks) = &lt.masks {
                        dx *= &masks[t];
                    }
                    Some(dx)
                })
                .collect();
        }
    }
    (loss_value, grad)
}
