//! MAE random sampling: how likely is an architecture, under standard-normal
//! random weights, to land below an error threshold?
//!
//! Each sample draws a fresh weight vector, measures the MAE on the training
//! windows, and the collected errors are summarized by a normal truncated at
//! zero. The fitted CDF at the threshold is the architecture's score `p_t`.

mod truncnorm;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use truncnorm::{
    fit_truncated_normal, log_normal_cdf, normal_cdf, normal_sf, p_truncated_normal, SD_FLOOR,
};

use crate::data::{Partition, SeriesDataset, WindowSet};
use crate::error::{ResnError, Result};
use crate::genome::ArchGenome;
use crate::metrics;
use crate::net::{OutputActivation, PredictionBatch, StackedRnn};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MrsConfig {
    pub max_samples: usize,
    pub threshold: f64,
    pub rng_seed: u64,
}

impl Default for MrsConfig {
    fn default() -> Self {
        Self {
            max_samples: 100,
            threshold: 0.01,
            rng_seed: 0,
        }
    }
}

impl MrsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_samples < 2 {
            return Err(ResnError::Config(format!(
                "max_samples must be at least 2, got {}",
                self.max_samples
            )));
        }
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(ResnError::Config(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrsReport {
    pub mae_samples: Vec<f64>,
    pub fit_mean: f64,
    pub fit_sd: f64,
    pub p_t: f64,
}

/// `n` i.i.d. standard-normal draws.
pub fn sample_random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Runs MRS for `genome` on the dataset's training partition.
pub fn mrs_evaluate(
    genome: &ArchGenome,
    dataset: &SeriesDataset,
    activation: OutputActivation,
    cfg: &MrsConfig,
) -> Result<MrsReport> {
    let windows = dataset.window(genome.look_back(), Partition::Train)?;
    let net = StackedRnn::new(genome.clone(), dataset.input_dim(), dataset.output_dim(), activation)?;
    mrs_on_windows(&net, &windows, cfg)
}

/// MRS with prebuilt windows. Sample `k` draws from the sub-stream
/// `(cfg.rng_seed, k)`, so the report does not depend on thread scheduling.
pub fn mrs_on_windows(net: &StackedRnn, windows: &WindowSet, cfg: &MrsConfig) -> Result<MrsReport> {
    cfg.validate()?;
    net.check_windows(windows)?;
    let n_weights = net.param_count();
    let mae_samples = (0..cfg.max_samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng_for(cfg.rng_seed, &[k]);
            let weights = sample_random_weights(n_weights, &mut rng);
            let sampled = net.clone().with_weights(weights)?;
            let predictions = sampled.predict_windows(windows)?;
            let batch = PredictionBatch::new(predictions, windows.targets.clone())?;
            let mae = metrics::mae(&batch)?;
            if !mae.is_finite() {
                return Err(ResnError::Data(format!("sample {k} produced a non-finite MAE")));
            }
            Ok(mae)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (fit_mean, fit_sd) = fit_truncated_normal(&mae_samples)?;
    let p_t = p_truncated_normal(fit_mean, fit_sd, cfg.threshold);
    Ok(MrsReport {
        mae_samples,
        fit_mean,
        fit_sd,
        p_t,
    })
}
