//! Gradient training of a single architecture: mini-batch BPTT with Adam or
//! Nesterov SGD, norm clipping/boosting, input dropout and validation-based
//! early stopping.

mod bptt;
mod optim;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use bptt::{bptt_gradient, Loss};
pub use optim::{adam_step, sgd_nesterov_step, AdamState, OptimizerKind, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};

use crate::data::{Partition, SeriesDataset, WindowSet};
use crate::error::{ResnError, Result};
use crate::genome::ArchGenome;
use crate::net::{DropoutMasks, OutputActivation, StackedRnn};
use ndarray::Array2;
use crate::seed;
use optim::OptimizerState;

/// Training hyper-parameters. `None` in `clip_norm_above`,
/// `boost_norm_below` or `early_stop_loss` disables that mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub loss: Loss,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub clip_norm_above: Option<f64>,
    pub boost_norm_below: Option<f64>,
    pub dropout_p: f64,
    pub early_stop_loss: Option<f64>,
    pub batch_size: usize,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Adam,
            loss: Loss::Mae,
            epochs: 100,
            learning_rate: 0.001,
            momentum: 0.9,
            clip_norm_above: None,
            boost_norm_below: None,
            dropout_p: 0.5,
            early_stop_loss: Some(1e-5),
            batch_size: 32,
            rng_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(ResnError::Config(m));
        if self.epochs == 0 {
            return err("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return err("batch_size must be at least 1".into());
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return err(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return err(format!("momentum must lie in [0, 1), got {}", self.momentum));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return err(format!("dropout_p must lie in [0, 1), got {}", self.dropout_p));
        }
        let (above, below) = self.norm_band();
        if !(below >= 0.0) || !(above > below) {
            return err(format!(
                "need clip_norm_above > boost_norm_below >= 0, got {above} and {below}"
            ));
        }
        Ok(())
    }

    fn norm_band(&self) -> (f64, f64) {
        (
            self.clip_norm_above.unwrap_or(f64::INFINITY),
            self.boost_norm_below.unwrap_or(0.0),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EpochsExhausted,
    EarlyStop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    pub epochs_completed: usize,
    pub stop_reason: StopReason,
    pub final_weights: Vec<f64>,
    pub seconds: f64,
}

/// Rescales `grad` so its L2 norm lies in `[below, above]`. A zero vector and
/// a vector already inside the band are returned unchanged.
pub fn clip_or_boost(grad: &mut [f64], above: f64, below: f64) {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let target = if norm > above {
        above
    } else if norm > 0.0 && norm < below {
        below
    } else {
        return;
    };
    let scale = target / norm;
    grad.iter_mut().for_each(|g| *g *= scale);
}

/// Glorot-uniform kernels, zero biases except a unit forget-gate bias, and a
/// Glorot-uniform read-out.
pub fn glorot_init<R: Rng + ?Sized>(net: &mut StackedRnn, rng: &mut R) {
    let spans = net.layout().layers.clone();
    let (dense_w, dense_b) = (net.layout().dense_w, net.layout().dense_b);
    let output_dim = net.output_dim();
    let weights = net.weights_mut();
    let mut fill = |range: std::ops::Range<usize>, fan_in: usize, fan_out: usize| {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for w in &mut weights[range] {
            *w = rng.random_range(-limit..limit);
        }
    };
    let mut last = 0;
    for s in &spans {
        fill(s.w..s.u, s.input, 4 * s.hidden);
        fill(s.u..s.b, s.hidden, 4 * s.hidden);
        last = s.hidden;
    }
    fill(dense_w..dense_b, last, output_dim);
    for s in &spans {
        let b = &mut weights[s.b..s.b + 4 * s.hidden];
        b.fill(0.0);
        b[s.hidden..2 * s.hidden].fill(1.0);
    }
    weights[dense_b..].fill(0.0);
}

/// Trains a freshly initialized network for `genome` on the training windows,
/// monitoring the validation windows once per epoch.
pub fn train(
    genome: &ArchGenome,
    dataset: &SeriesDataset,
    activation: OutputActivation,
    cfg: &TrainConfig,
) -> Result<(StackedRnn, TrainReport)> {
    cfg.validate()?;
    let train_windows = dataset.window(genome.look_back(), Partition::Train)?;
    let val_windows = dataset.window(genome.look_back(), Partition::Validation)?;
    let mut net = StackedRnn::new(genome.clone(), dataset.input_dim(), dataset.output_dim(), activation)?;
    glorot_init(&mut net, &mut seed::rng_for(cfg.rng_seed, &[0]));
    let report = train_net(&mut net, &train_windows, &val_windows, cfg)?;
    Ok((net, report))
}

/// Runs the epoch loop on an already initialized network.
pub fn train_net(
    net: &mut StackedRnn,
    train_windows: &WindowSet,
    val_windows: &WindowSet,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    net.check_windows(train_windows)?;
    net.check_windows(val_windows)?;
    let started = Instant::now();
    let mut rng = seed::rng_for(cfg.rng_seed, &[1]);
    let (above, below) = cfg.norm_band();
    let mut opt = OptimizerState::new(cfg.optimizer, net.param_count());
    let mut order: Vec<usize> = (0..train_windows.len()).collect();
    let mut train_loss = Vec::with_capacity(cfg.epochs);
    let mut validation_loss = Vec::with_capacity(cfg.epochs);
    let mut stop_reason = StopReason::EpochsExhausted;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut weighted = 0.0;
        for rows in order.chunks(cfg.batch_size) {
            let xs = train_windows.time_major(rows);
            let targets = train_windows.targets_of(rows);
            let masks = (cfg.dropout_p > 0.0).then(|| dropout_masks(net, rows.len(), cfg.dropout_p, &mut rng));
            let trace = net.forward_trace(xs, masks);
            let (loss, mut grad) = bptt::backward(net, &trace, &targets, cfg.loss);
            if !loss.is_finite() {
                return Err(ResnError::NonFiniteLoss { epoch, loss });
            }
            clip_or_boost(&mut grad, above, below);
            opt.step(net.weights_mut(), &grad, cfg.learning_rate, cfg.momentum);
            weighted += loss * rows.len() as f64;
        }
        let epoch_loss = weighted / order.len() as f64;
        let val = cfg.loss.value(&net.predict_windows(val_windows)?, &val_windows.targets);
        if !val.is_finite() {
            return Err(ResnError::NonFiniteLoss { epoch, loss: val });
        }
        train_loss.push(epoch_loss);
        validation_loss.push(val);
        if cfg.early_stop_loss.is_some_and(|limit| val < limit) {
            stop_reason = StopReason::EarlyStop;
            break;
        }
    }

    Ok(TrainReport {
        epochs_completed: train_loss.len(),
        train_loss,
        validation_loss,
        stop_reason,
        final_weights: net.weights().to_vec(),
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Inverted-dropout masks on the non-recurrent connections between layers:
/// the input of every layer after the first, and the read-out input. The raw
/// series is never dropped.
fn dropout_masks<R: Rng + ?Sized>(net: &StackedRnn, batch: usize, p: f64, rng: &mut R) -> DropoutMasks {
    let keep = 1.0 / (1.0 - p);
    let mut mask = |cols: usize| {
        Array2::from_shape_simple_fn((batch, cols), || if rng.random::<f64>() < p { 0.0 } else { keep })
    };
    let spans = &net.layout().layers;
    let mut layers = vec![None];
    for span in &spans[1..] {
        layers.push(Some((0..net.look_back()).map(|_| mask(span.input)).collect()));
    }
    let readout = Some(mask(spans.last().expect("at least one layer").hidden));
    DropoutMasks { layers, readout }
}
