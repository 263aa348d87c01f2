//! Architecture search for stacked LSTM forecasters using MAE random sampling
//! as a training-free fitness, plus the gradient training and experiment
//! harness around it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod harness;
pub mod metrics;
pub mod mrs;
pub mod net;
pub mod seed;
pub mod training;

pub use error::{ResnError, Result};
pub use genome::{ArchGenome, GenomeBounds};
