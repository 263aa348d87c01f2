//! Fitness functions the evolutionary loop can maximize.

use serde::{Deserialize, Serialize};

use crate::data::{Partition, SeriesDataset};
use crate::error::Result;
use crate::genome::ArchGenome;
use crate::metrics;
use crate::mrs::{mrs_evaluate, MrsConfig, MrsReport};
use crate::net::OutputActivation;
use crate::training::{train, TrainConfig};

/// Result of scoring one genome. Higher `fitness` is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub fitness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mrs: Option<MrsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_mae: Option<f64>,
}

pub trait Evaluator: Sync {
    /// Scores `genome`; `seed` identifies the random sub-stream for this call.
    fn evaluate(&self, genome: &ArchGenome, seed: u64) -> Result<Evaluation>;

    /// `(input_dim, output_dim)` of the networks being scored.
    fn io_dims(&self) -> (usize, usize);
}

/// Fitness = `p_t` from MAE random sampling on the training partition.
pub struct MrsEvaluator<'a> {
    pub dataset: &'a SeriesDataset,
    pub activation: OutputActivation,
    pub config: MrsConfig,
}

impl Evaluator for MrsEvaluator<'_> {
    fn evaluate(&self, genome: &ArchGenome, seed: u64) -> Result<Evaluation> {
        let cfg = MrsConfig { rng_seed: seed, ..self.config };
        let report = mrs_evaluate(genome, self.dataset, self.activation, &cfg)?;
        Ok(Evaluation {
            fitness: report.p_t,
            mrs: Some(report),
            validation_mae: None,
        })
    }

    fn io_dims(&self) -> (usize, usize) {
        (self.dataset.input_dim(), self.dataset.output_dim())
    }
}

/// Fitness = negated validation MAE after a short training run.
pub struct ShortTrainEvaluator<'a> {
    pub dataset: &'a SeriesDataset,
    pub activation: OutputActivation,
    pub config: TrainConfig,
}

impl Evaluator for ShortTrainEvaluator<'_> {
    fn evaluate(&self, genome: &ArchGenome, seed: u64) -> Result<Evaluation> {
        let cfg = TrainConfig { rng_seed: seed, ..self.config.clone() };
        let (net, _) = train(genome, self.dataset, self.activation, &cfg)?;
        let mae = metrics::mae(&net.predict_series(self.dataset, Partition::Validation)?)?;
        Ok(Evaluation {
            fitness: -mae,
            mrs: None,
            validation_mae: Some(mae),
        })
    }

    fn io_dims(&self) -> (usize, usize) {
        (self.dataset.input_dim(), self.dataset.output_dim())
    }
}
