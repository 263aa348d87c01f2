//! Experiment orchestration: JSON configs, the optimize/sample/train/evaluate
//! pipeline stages, repeated seeded studies and their run logs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    load_csv, sine_series, ColumnSchema, DatasetSummary, NormalizationMode, Partition, SeriesDataset,
    SineSpec, SplitFractions,
};
use crate::error::{ResnError, Result};
use crate::evolution::{
    run_evolution, EvoConfig, Evaluation, Evaluator, GenerationRecord, MrsEvaluator, SearchMode,
    ShortTrainEvaluator,
};
use crate::genome::ArchGenome;
use crate::metrics::{self, Metrics};
use crate::mrs::{mrs_evaluate, MrsConfig, MrsReport};
use crate::net::{param_count, OutputActivation, PredictionBatch, StackedRnn};
use crate::seed;
use crate::training::{train, TrainConfig, TrainReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Sine(SineSpec),
    Csv {
        path: PathBuf,
        #[serde(default)]
        columns: ColumnSchema,
    },
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self::Sine(SineSpec::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Evolution guided by MRS.
    #[default]
    Resn,
    /// Evolution guided by the validation error after a short training run.
    Gdet,
    /// Uniform genomes, same budget.
    RandomSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomSearchFitness {
    #[default]
    ShortTrain,
    Mrs,
}

fn short_train_default() -> TrainConfig {
    TrainConfig {
        epochs: 1,
        dropout_p: 0.0,
        early_stop_loss: None,
        ..TrainConfig::default()
    }
}

/// One JSON document describing a whole study.
/// Missing fields take the values of [`ExperimentConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetSpec,
    pub normalization: NormalizationMode,
    pub split: SplitFractions,
    pub output_activation: OutputActivation,
    pub evolution: EvoConfig,
    pub mrs: MrsConfig,
    /// Training of the final architecture.
    pub train: TrainConfig,
    /// Candidate training under the short-training fitness.
    pub search_train: TrainConfig,
    pub strategy: Strategy,
    pub random_search_fitness: RandomSearchFitness,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Repetitions run concurrently; `None` uses every core.
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: String::new(),
            dataset: DatasetSpec::default(),
            normalization: NormalizationMode::Minmax,
            split: SplitFractions::default(),
            output_activation: OutputActivation::Sigmoid,
            evolution: EvoConfig::default(),
            mrs: MrsConfig::default(),
            train: TrainConfig::default(),
            search_train: short_train_default(),
            strategy: Strategy::Resn,
            random_search_fitness: RandomSearchFitness::ShortTrain,
            repetitions: 1,
            master_seed: 0,
            workers: None,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: Self = read_json(path.as_ref())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(ResnError::Config("repetitions must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(ResnError::Config("workers must be at least 1".into()));
        }
        self.evolution.validate()?;
        self.mrs.validate()?;
        self.train.validate()?;
        self.search_train.validate()
    }

    /// Loads or generates the series, splits it with room for the largest
    /// look-back and fits the normalization on the training rows.
    pub fn build_dataset(&self) -> Result<SeriesDataset> {
        let base = match &self.dataset {
            DatasetSpec::Sine(spec) => sine_series(spec)?,
            DatasetSpec::Csv { path, columns } => load_csv(path, columns)?,
        };
        base.split(self.split, self.evolution.bounds.max_lb)?
            .normalize(self.normalization)
    }

    /// Seed of repetition `rep`.
    pub fn repetition_seed(&self, rep: usize) -> u64 {
        seed::derive_seed(self.master_seed, &[rep as u64])
    }

    fn search_mode(&self) -> SearchMode {
        match self.strategy {
            Strategy::Resn | Strategy::Gdet => SearchMode::Evolve,
            Strategy::RandomSearch => SearchMode::RandomSearch,
        }
    }

    fn uses_mrs(&self) -> bool {
        match self.strategy {
            Strategy::Resn => true,
            Strategy::Gdet => false,
            Strategy::RandomSearch => self.random_search_fitness == RandomSearchFitness::Mrs,
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| ResnError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ResnError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes pretty JSON, creating parent directories.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| ResnError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|source| ResnError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text + "\n").map_err(|source| ResnError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Trained network as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub schema_version: u32,
    pub genome: ArchGenome,
    pub input_dim: usize,
    pub output_dim: usize,
    pub output_activation: OutputActivation,
    pub weights: Vec<f64>,
}

impl WeightsFile {
    pub fn from_net(net: &StackedRnn) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            genome: net.genome().clone(),
            input_dim: net.input_dim(),
            output_dim: net.output_dim(),
            output_activation: net.output_activation(),
            weights: net.weights().to_vec(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(path.as_ref(), self)
    }

    pub fn into_net(self) -> Result<StackedRnn> {
        StackedRnn::new(self.genome, self.input_dim, self.output_dim, self.output_activation)?
            .with_weights(self.weights)
    }
}

/// Test-split metrics in normalized and original units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestMetrics {
    pub normalized: Metrics,
    pub original_units: Metrics,
}

pub fn evaluate_net(net: &StackedRnn, dataset: &SeriesDataset, partition: Partition) -> Result<TestMetrics> {
    let batch = net.predict_series(dataset, partition)?;
    let normalized = metrics::metrics(&batch)?;
    let original = PredictionBatch::new(
        dataset.denormalize_outputs(batch.predictions()),
        dataset.denormalize_outputs(batch.targets()),
    )?;
    Ok(TestMetrics {
        normalized,
        original_units: metrics::metrics(&original)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub report: TrainReport,
    pub test: TestMetrics,
}

/// Trains `genome` from scratch with `seed` and scores it on the test split.
pub fn train_and_test(
    cfg: &ExperimentConfig,
    dataset: &SeriesDataset,
    genome: &ArchGenome,
    seed: u64,
) -> Result<(StackedRnn, TrainOutcome)> {
    let train_cfg = TrainConfig {
        rng_seed: seed,
        ..cfg.train.clone()
    };
    let (net, report) = train(genome, dataset, cfg.output_activation, &train_cfg)?;
    let test = evaluate_net(&net, dataset, Partition::Test)?;
    Ok((net, TrainOutcome { report, test }))
}

/// Runs one search with the configured strategy and seed.
pub fn search(
    cfg: &ExperimentConfig,
    dataset: &SeriesDataset,
    seed: u64,
) -> Result<crate::evolution::EvoOutcome> {
    let evo = EvoConfig {
        rng_seed: seed,
        ..cfg.evolution.clone()
    };
    let evaluator: Box<dyn Evaluator + '_> = if cfg.uses_mrs() {
        Box::new(MrsEvaluator {
            dataset,
            activation: cfg.output_activation,
            config: cfg.mrs,
        })
    } else {
        Box::new(ShortTrainEvaluator {
            dataset,
            activation: cfg.output_activation,
            config: cfg.search_train.clone(),
        })
    };
    run_evolution(&evo, evaluator.as_ref(), cfg.search_mode())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub repetition: usize,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub best_genome: Option<ArchGenome>,
    pub best_weight_count: Option<usize>,
    pub best_evaluation: Option<Evaluation>,
    pub history: Vec<GenerationRecord>,
    pub training: Option<TrainOutcome>,
    pub optimization_seconds: f64,
    pub training_seconds: f64,
    pub total_seconds: f64,
}

impl RepetitionResult {
    pub fn test_mae(&self) -> Option<f64> {
        self.training.as_ref().map(|t| t.test.normalized.mae)
    }
}

/// Search, final training and test scoring for one repetition. Failures are
/// captured in the result rather than propagated.
pub fn run_repetition(cfg: &ExperimentConfig, dataset: &SeriesDataset, rep: usize) -> RepetitionResult {
    let rep_seed = cfg.repetition_seed(rep);
    let started = Instant::now();
    let mut result = RepetitionResult {
        repetition: rep,
        seed: rep_seed,
        status: RunStatus::Failed,
        error: None,
        best_genome: None,
        best_weight_count: None,
        best_evaluation: None,
        history: Vec::new(),
        training: None,
        optimization_seconds: 0.0,
        training_seconds: 0.0,
        total_seconds: 0.0,
    };

    let outcome = search(cfg, dataset, seed::derive_seed(rep_seed, &[0]));
    result.optimization_seconds = started.elapsed().as_secs_f64();
    match outcome {
        Ok(outcome) => {
            let genome = outcome.best.genome.clone();
            result.best_weight_count = Some(param_count(&genome, dataset.input_dim(), dataset.output_dim()));
            result.best_evaluation = outcome.best.evaluation.clone();
            result.best_genome = Some(genome.clone());
            result.history = outcome.state.history;
            if !outcome.best.fitness.is_finite() {
                result.error = Some("every candidate failed to evaluate".into());
            } else {
                let train_started = Instant::now();
                match train_and_test(cfg, dataset, &genome, seed::derive_seed(rep_seed, &[1])) {
                    Ok((_, training)) => {
                        result.training = Some(training);
                        result.status = RunStatus::Ok;
                    }
                    Err(e) => result.error = Some(e.to_string()),
                }
                result.training_seconds = train_started.elapsed().as_secs_f64();
            }
        }
        Err(e) => result.error = Some(e.to_string()),
    }
    result.total_seconds = result.optimization_seconds + result.training_seconds;
    match (&result.error, result.test_mae()) {
        (Some(e), _) => log::warn!("repetition {rep} failed: {e}"),
        (None, Some(mae)) => log::info!(
            "repetition {rep}: {} test MAE {mae:.4} in {:.1} s",
            result.best_genome.as_ref().map(ToString::to_string).unwrap_or_default(),
            result.total_seconds
        ),
        (None, None) => {}
    }
    result
}

/// Mean, median, max, min and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub min: f64,
    pub sd: f64,
}

impl Stats {
    /// `None` for an empty slice. The sd of a single value is 0.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self {
            mean,
            median,
            max: sorted[n - 1],
            min: sorted[0],
            sd,
        })
    }
}

/// Shape columns of a results table: total cells, look-back, depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenomeShape {
    pub lstm_cells: usize,
    pub look_back: usize,
    pub hidden_layers: usize,
}

impl From<&ArchGenome> for GenomeShape {
    fn from(g: &ArchGenome) -> Self {
        Self {
            lstm_cells: g.total_cells(),
            look_back: g.look_back(),
            hidden_layers: g.hidden_layers(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub successful: usize,
    pub failed: usize,
    pub mae: Option<Stats>,
    pub mse: Option<Stats>,
    pub mape: Option<Stats>,
    pub mae_original_units: Option<Stats>,
    pub lstm_cells: Option<Stats>,
    pub look_back: Option<Stats>,
    pub hidden_layers: Option<Stats>,
    pub optimization_seconds: Option<Stats>,
    pub total_seconds: Option<Stats>,
}

/// Statistics over the successful repetitions. MAPE is summarized only when
/// every run has it.
pub fn summarize(results: &[RepetitionResult]) -> Summary {
    let ok: Vec<(&RepetitionResult, &TrainOutcome, GenomeShape)> = results
        .iter()
        .filter_map(|r| {
            let training = r.training.as_ref()?;
            let genome = r.best_genome.as_ref()?;
            (r.status == RunStatus::Ok).then(|| (r, training, GenomeShape::from(genome)))
        })
        .collect();
    let stat = |f: &dyn Fn(&(&RepetitionResult, &TrainOutcome, GenomeShape)) -> f64| {
        Stats::of(&ok.iter().map(f).collect::<Vec<_>>())
    };
    let mape: Option<Vec<f64>> = ok.iter().map(|(_, t, _)| t.test.normalized.mape).collect();
    Summary {
        successful: ok.len(),
        failed: results.len() - ok.len(),
        mae: stat(&|(_, t, _)| t.test.normalized.mae),
        mse: stat(&|(_, t, _)| t.test.normalized.mse),
        mape: mape.and_then(|v| Stats::of(&v)),
        mae_original_units: stat(&|(_, t, _)| t.test.original_units.mae),
        lstm_cells: stat(&|(_, _, s)| s.lstm_cells as f64),
        look_back: stat(&|(_, _, s)| s.look_back as f64),
        hidden_layers: stat(&|(_, _, s)| s.hidden_layers as f64),
        optimization_seconds: stat(&|(r, _, _)| r.optimization_seconds),
        total_seconds: stat(&|(r, _, _)| r.total_seconds),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub repetitions: Vec<RepetitionResult>,
    pub summary: Summary,
}

impl RunLog {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        let mut log = self.clone();
        for r in &mut log.repetitions {
            r.optimization_seconds = 0.0;
            r.training_seconds = 0.0;
            r.total_seconds = 0.0;
            for g in &mut r.history {
                g.elapsed_seconds = 0.0;
            }
            if let Some(t) = &mut r.training {
                t.report.seconds = 0.0;
            }
        }
        log.summary = summarize(&log.repetitions);
        log
    }

    pub fn all_failed(&self) -> bool {
        self.summary.successful == 0
    }
}

/// Runs every repetition (concurrently up to `cfg.workers`) and assembles
/// the log in repetition order. Writes it to `cfg.output` when set.
pub fn cmd_optimize(cfg: &ExperimentConfig) -> Result<RunLog> {
    cfg.validate()?;
    let dataset = cfg.build_dataset()?;
    let run = || -> Vec<RepetitionResult> {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|rep| run_repetition(cfg, &dataset, rep))
            .collect()
    };
    let repetitions = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ResnError::Config(format!("cannot start {n} workers: {e}")))?
            .install(run),
        None => run(),
    };
    let log = RunLog {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        dataset: dataset.summary(),
        summary: summarize(&repetitions),
        repetitions,
    };
    if let Some(path) = &cfg.output {
        write_json(path, &log)?;
    }
    Ok(log)
}

/// MRS for a single genome on the configured dataset.
pub fn cmd_sample(cfg: &ExperimentConfig, genome: &ArchGenome) -> Result<MrsReport> {
    cfg.validate()?;
    check_look_back(cfg, genome)?;
    let dataset = cfg.build_dataset()?;
    mrs_evaluate(genome, &dataset, cfg.output_activation, &cfg.mrs)
}

/// Trains `genome` with `cfg.train` (its `rng_seed` included) and returns the
/// trained network and the report with test metrics.
pub fn cmd_train(cfg: &ExperimentConfig, genome: &ArchGenome) -> Result<(StackedRnn, TrainOutcome)> {
    cfg.validate()?;
    check_look_back(cfg, genome)?;
    let dataset = cfg.build_dataset()?;
    train_and_test(cfg, &dataset, genome, cfg.train.rng_seed)
}

/// Test-split metrics of a stored network on the configured dataset.
pub fn cmd_evaluate(cfg: &ExperimentConfig, weights: impl AsRef<Path>) -> Result<TestMetrics> {
    let file = WeightsFile::load(weights)?;
    check_look_back(cfg, &file.genome)?;
    let dataset = cfg.build_dataset()?;
    if (file.input_dim, file.output_dim) != (dataset.input_dim(), dataset.output_dim()) {
        return Err(ResnError::Shape(format!(
            "weights are for {} inputs and {} outputs, dataset has {} and {}",
            file.input_dim,
            file.output_dim,
            dataset.input_dim(),
            dataset.output_dim()
        )));
    }
    evaluate_net(&file.into_net()?, &dataset, Partition::Test)
}

fn check_look_back(cfg: &ExperimentConfig, genome: &ArchGenome) -> Result<()> {
    if genome.look_back() > cfg.evolution.bounds.max_lb {
        return Err(ResnError::Config(format!(
            "look-back {} exceeds max_lb {} used to size the partitions",
            genome.look_back(),
            cfg.evolution.bounds.max_lb
        )));
    }
    Ok(())
}

/// Plain-text table in the layout of the published results (times in minutes).
pub fn render_report(log: &RunLog) -> String {
    let s = &log.summary;
    let mut out = format!(
        "{} ({:?}, {} ok / {} failed)\n",
        if log.config.name.is_empty() { "run" } else { &log.config.name },
        log.config.strategy,
        s.successful,
        s.failed
    );
    out.push_str(&format!(
        "{:<8}{:>10}{:>10}{:>10}{:>10}{:>8}{:>8}{:>11}\n",
        "", "MAE", "MSE", "MAPE", "No. LSTM", "LB", "No. HL", "Time [min]"
    ));
    let pick = |st: &Option<Stats>, f: fn(&Stats) -> f64| st.as_ref().map(f);
    let rows: [(&str, fn(&Stats) -> f64); 5] = [
        ("Mean", |x| x.mean),
        ("Median", |x| x.median),
        ("Max", |x| x.max),
        ("Min", |x| x.min),
        ("Sd", |x| x.sd),
    ];
    let cell = |v: Option<f64>, prec: usize| match v {
        None => "NA".to_string(),
        Some(v) if v.abs() >= 1e5 => format!("{v:.2e}"),
        Some(v) => format!("{v:.prec$}"),
    };
    for (label, f) in rows {
        out.push_str(&format!(
            "{:<8}{:>10}{:>10}{:>10}{:>10}{:>8}{:>8}{:>11}\n",
            label,
            cell(pick(&s.mae, f), 4),
            cell(pick(&s.mse, f), 5),
            cell(pick(&s.mape, f), 3),
            cell(pick(&s.lstm_cells, f), 0),
            cell(pick(&s.look_back, f), 0),
            cell(pick(&s.hidden_layers, f), 0),
            cell(pick(&s.total_seconds, f).map(|v| v / 60.0), 2),
        ));
    }
    out
}
