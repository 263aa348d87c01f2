//! First-order update rules over flat weight vectors.

use serde::{Deserialize, Serialize};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Adam,
    SgdNesterov,
}

/// Bias-corrected Adam moments.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }
}

pub fn adam_step(weights: &mut [f64], grad: &[f64], state: &mut AdamState, learning_rate: f64) {
    assert_eq!(weights.len(), grad.len(), "weights/gradient length");
    assert_eq!(weights.len(), state.m.len(), "weights/state length");
    state.t += 1;
    let c1 = 1.0 - ADAM_BETA1.powi(state.t as i32);
    let c2 = 1.0 - ADAM_BETA2.powi(state.t as i32);
    for (((w, &g), m), v) in weights.iter_mut().zip(grad).zip(&mut state.m).zip(&mut state.v) {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *w -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
}

/// Nesterov momentum in the velocity form:
/// `v <- mu v - lr g`, `w <- w + mu v - lr g`.
pub fn sgd_nesterov_step(
    weights: &mut [f64],
    grad: &[f64],
    velocity: &mut [f64],
    learning_rate: f64,
    momentum: f64,
) {
    assert_eq!(weights.len(), grad.len(), "weights/gradient length");
    assert_eq!(weights.len(), velocity.len(), "weights/velocity length");
    for ((w, &g), v) in weights.iter_mut().zip(grad).zip(velocity.iter_mut()) {
        *v = momentum * *v - learning_rate * g;
        *w += momentum * *v - learning_rate * g;
    }
}

#[derive(Debug, Clone)]
pub(crate) enum OptimizerState {
    Adam(AdamState),
    Sgd(Vec<f64>),
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, n: usize) -> Self {
        match kind {
            OptimizerKind::Adam => Self::Adam(AdamState::new(n)),
            OptimizerKind::SgdNesterov => Self::Sgd(vec![0.0; n]),
        }
    }

    pub fn step(&mut self, weights: &mut [f64], grad: &[f64], learning_rate: f64, momentum: f64) {
        match self {
            Self::Adam(s) => adam_step(weights, grad, s, learning_rate),
            Self::Sgd(v) => sgd_nesterov_step(weights, grad, v, learning_rate, momentum),
        }
    }
}
