//! (mu + lambda) evolutionary search over [`ArchGenome`]s with binary
//! tournament selection, two-stage mutation, elitist replacement and a global
//! 1.5x / divide-by-4 self-adaptation of the mutation parameters.

mod fitness;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fitness::{Evaluation, Evaluator, MrsEvaluator, ShortTrainEvaluator};

use crate::error::{ResnError, Result};
use crate::genome::{ArchGenome, GenomeBounds};
use crate::net::param_count;
use crate::seed;

pub const IMPROVE_FACTOR: f64 = 1.5;
pub const STALL_DIVISOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvoConfig {
    pub population_size: usize,
    pub offspring_size: usize,
    pub max_evaluations: usize,
    pub cell_mut_p: f64,
    pub layer_mut_p: f64,
    pub max_step: f64,
    pub bounds: GenomeBounds,
    pub rng_seed: u64,
}

impl Default for EvoConfig {
    fn default() -> Self {
        Self {
            population_size: 10,
            offspring_size: 10,
            max_evaluations: 100,
            cell_mut_p: 0.2,
            layer_mut_p: 0.2,
            max_step: 5.0,
            bounds: GenomeBounds {
                min_lb: 2,
                max_lb: 30,
                min_npl: 1,
                max_npl: 100,
                min_hl: 1,
                max_hl: 3,
            },
            rng_seed: 0,
        }
    }
}

impl EvoConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(ResnError::Config(m));
        if self.population_size == 0 || self.offspring_size == 0 {
            return err("population_size and offspring_size must be at least 1".into());
        }
        for (name, p) in [("cell_mut_p", self.cell_mut_p), ("layer_mut_p", self.layer_mut_p)] {
            if !(p > 0.0 && p <= 1.0) {
                return err(format!("{name} must lie in (0, 1], got {p}"));
            }
        }
        if !(self.max_step >= 1.0) || !self.max_step.is_finite() {
            return err(format!("max_step must be at least 1, got {}", self.max_step));
        }
        self.bounds.validate()
    }

    pub fn initial_params(&self) -> AdaptiveParams {
        AdaptiveParams {
            cell_mut_p: self.cell_mut_p,
            max_step: self.max_step,
            layer_mut_p: self.layer_mut_p,
        }
    }
}

/// The self-adapted mutation parameters. `max_step` stays real-valued and is
/// rounded when a mutation uses it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    pub cell_mut_p: f64,
    pub max_step: f64,
    pub layer_mut_p: f64,
}

impl AdaptiveParams {
    /// Multiply by 1.5 after an improving generation, divide by 4 otherwise;
    /// probabilities are clamped to `(0, 1]` and `max_step` to `[1, max_npl]`.
    pub fn adapted(self, improved: bool, max_npl: usize) -> Self {
        let factor = if improved { IMPROVE_FACTOR } else { 1.0 / STALL_DIVISOR };
        let prob = |p: f64| (p * factor).clamp(f64::MIN_POSITIVE, 1.0);
        Self {
            cell_mut_p: prob(self.cell_mut_p),
            max_step: (self.max_step * factor).clamp(1.0, max_npl.max(1) as f64),
            layer_mut_p: prob(self.layer_mut_p),
        }
    }

    pub fn step_size(&self) -> usize {
        (self.max_step.round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Tournament, mutation, elitist replacement, self-adaptation.
    Evolve,
    /// Fresh uniform genomes every generation; replacement keeps the best seen.
    RandomSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: ArchGenome,
    #[serde(with = "fitness_serde")]
    pub fitness: f64,
    /// Network weight count, used to break fitness ties.
    pub weights: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<Evaluation>,
}

/// Genome with its score, as stored in the history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub genome: ArchGenome,
    #[serde(with = "fitness_serde")]
    pub fitness: f64,
}

impl From<&Individual> for Scored {
    fn from(i: &Individual) -> Self {
        Self {
            genome: i.genome.clone(),
            fitness: i.fitness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub evaluations: usize,
    /// Parameters in force after this generation's adaptation.
    pub params: AdaptiveParams,
    /// `None` for generation 0 and for random search.
    pub improved: Option<bool>,
    #[serde(with = "fitness_serde")]
    pub best_fitness: f64,
    #[serde(with = "fitness_serde")]
    pub mean_fitness: f64,
    #[serde(with = "fitness_serde")]
    pub worst_fitness: f64,
    pub best_genome: ArchGenome,
    /// Genomes evaluated in this generation (the initial population at 0).
    pub evaluated: Vec<Scored>,
    /// Wall time since the search started, at the end of this generation.
    pub elapsed_seconds: f64,
}

/// The record a run with budget `max_evaluations` would have finished on.
/// Runs that share a seed differ only in when they stop, so a long run's
/// history contains every shorter run.
pub fn record_at_budget(history: &[GenerationRecord], max_evaluations: usize) -> Option<&GenerationRecord> {
    history
        .iter()
        .find(|r| r.evaluations >= max_evaluations)
        .or_else(|| history.last())
}

/// Run state. `population` is sorted best-first after every generation.
#[derive(Debug, Clone)]
pub struct EvoState {
    pub population: Vec<Individual>,
    pub params: AdaptiveParams,
    pub evaluations: usize,
    pub generation: usize,
    pub prev_avg_fitness: f64,
    pub history: Vec<GenerationRecord>,
    rng: ChaCha8Rng,
}

impl EvoState {
    /// Applies the adaptation rule given the new population's mean fitness;
    /// returns whether it counted as an improvement (strictly greater).
    pub fn self_adapt(&mut self, new_avg: f64, max_npl: usize) -> bool {
        let improved = new_avg > self.prev_avg_fitness;
        self.params = self.params.adapted(improved, max_npl);
        self.prev_avg_fitness = new_avg;
        improved
    }
}

#[derive(Debug, Clone)]
pub struct EvoOutcome {
    pub best: Individual,
    pub state: EvoState,
}

/// `count` genomes with look-back, depth and widths uniform within bounds.
pub fn initialize<R: Rng + ?Sized>(count: usize, bounds: &GenomeBounds, rng: &mut R) -> Vec<ArchGenome> {
    (0..count)
        .map(|_| {
            let lb = rng.random_range(bounds.min_lb..=bounds.max_lb);
            let layers = rng.random_range(bounds.min_hl..=bounds.max_hl);
            let mut entries = Vec::with_capacity(layers + 1);
            entries.push(lb);
            entries.extend((0..layers).map(|_| rng.random_range(bounds.min_npl..=bounds.max_npl)));
            ArchGenome::new(entries).expect("bounds are positive")
        })
        .collect()
}

/// `lambda` picks, each the fitter of two uniform draws (with replacement).
pub fn binary_tournament<R: Rng + ?Sized>(
    population: &[Individual],
    lambda: usize,
    rng: &mut R,
) -> Vec<Individual> {
    assert!(!population.is_empty(), "tournament over an empty population");
    (0..lambda)
        .map(|_| {
            let a = &population[rng.random_range(0..population.len())];
            let b = &population[rng.random_range(0..population.len())];
            let winner = match a.fitness.total_cmp(&b.fitness) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    if rng.random_bool(0.5) {
                        a
                    } else {
                        b
                    }
                }
            };
            winner.clone()
        })
        .collect()
}

/// Adds a nonzero step from `[-max_step, max_step]` to each position with
/// probability `cell_mut_p`, clamping to that position's bounds.
pub fn cell_mutation<R: Rng + ?Sized>(
    genome: &ArchGenome,
    cell_mut_p: f64,
    max_step: usize,
    bounds: &GenomeBounds,
    rng: &mut R,
) -> ArchGenome {
    let max_step = max_step.max(1) as i64;
    let mut out = genome.clone();
    for (j, entry) in out.entries_mut().iter_mut().enumerate() {
        if rng.random::<f64>() < cell_mut_p {
            let k = rng.random_range(0..2 * max_step);
            let step = if k < max_step { k - max_step } else { k - max_step + 1 };
            let (lo, hi) = bounds.position_range(j);
            *entry = (*entry as i64 + step).clamp(lo as i64, hi as i64) as usize;
        }
    }
    out
}

/// For each hidden layer of the input genome, with probability `layer_mut_p`,
/// clones it (duplicate inserted next to it) or removes it with equal odds.
/// An operation that would leave `[min_hl, max_hl]` is skipped.
pub fn layer_mutation<R: Rng + ?Sized>(
    genome: &ArchGenome,
    layer_mut_p: f64,
    bounds: &GenomeBounds,
    rng: &mut R,
) -> ArchGenome {
    let mut depth = genome.hidden_layers();
    let mut entries = vec![genome.look_back()];
    for &width in genome.hidden() {
        if rng.random::<f64>() < layer_mut_p {
            if rng.random_bool(0.5) {
                if depth < bounds.max_hl {
                    entries.push(width);
                    depth += 1;
                }
                entries.push(width);
            } else if depth > bounds.min_hl {
                depth -= 1;
            } else {
                entries.push(width);
            }
        } else {
            entries.push(width);
        }
    }
    ArchGenome::new(entries).expect("depth stays >= min_hl >= 1")
}

/// Best `mu` of the union: higher fitness first, then fewer weights, then
/// uniformly at random.
pub fn replace_best<R: Rng + ?Sized>(
    population: Vec<Individual>,
    offspring: Vec<Individual>,
    mu: usize,
    rng: &mut R,
) -> Vec<Individual> {
    let mut all: Vec<Individual> = population.into_iter().chain(offspring).collect();
    all.shuffle(rng);
    all.sort_by(|a, b| b.fitness.total_cmp(&a.fitness).then(a.weights.cmp(&b.weights)));
    all.truncate(mu);
    all
}

fn mean_fitness(pop: &[Individual]) -> f64 {
    pop.iter().map(|i| i.fitness).sum::<f64>() / pop.len() as f64
}

fn evaluate_all(
    genomes: Vec<ArchGenome>,
    evaluator: &dyn Evaluator,
    base_seed: u64,
    generation: usize,
) -> Vec<Individual> {
    let (input_dim, output_dim) = evaluator.io_dims();
    genomes
        .into_par_iter()
        .enumerate()
        .map(|(idx, genome)| {
            let stream = seed::derive_seed(base_seed, &[2, generation as u64, idx as u64]);
            let weights = param_count(&genome, input_dim, output_dim);
            match evaluator.evaluate(&genome, stream) {
                Ok(evaluation) => Individual {
                    genome,
                    fitness: evaluation.fitness,
                    weights,
                    evaluation: Some(evaluation),
                },
                Err(e) => {
                    log::warn!("evaluation of {genome} failed: {e}");
                    Individual {
                        genome,
                        fitness: f64::NEG_INFINITY,
                        weights,
                        evaluation: None,
                    }
                }
            }
        })
        .collect()
}

fn record(state: &EvoState, improved: Option<bool>, evaluated: &[Individual], started: Instant) -> GenerationRecord {
    let pop = &state.population;
    GenerationRecord {
        generation: state.generation,
        evaluations: state.evaluations,
        params: state.params,
        improved,
        best_fitness: pop[0].fitness,
        mean_fitness: mean_fitness(pop),
        worst_fitness: pop[pop.len() - 1].fitness,
        best_genome: pop[0].genome.clone(),
        evaluated: evaluated.iter().map(Scored::from).collect(),
        elapsed_seconds: started.elapsed().as_secs_f64(),
    }
}

/// Runs the search until the evaluation budget is spent and returns the best
/// individual with the full per-generation history.
pub fn run_evolution(cfg: &EvoConfig, evaluator: &dyn Evaluator, mode: SearchMode) -> Result<EvoOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = seed::rng_for(cfg.rng_seed, &[1]);
    let bounds = cfg.bounds;

    let initial = initialize(cfg.population_size, &bounds, &mut rng);
    let evaluated = evaluate_all(initial, evaluator, cfg.rng_seed, 0);
    let population = replace_best(Vec::new(), evaluated.clone(), cfg.population_size, &mut rng);
    let mut state = EvoState {
        prev_avg_fitness: mean_fitness(&population),
        population,
        params: cfg.initial_params(),
        evaluations: cfg.population_size,
        generation: 0,
        history: Vec::new(),
        rng,
    };
    let first = record(&state, None, &evaluated, started);
    state.history.push(first);

    while state.evaluations < cfg.max_evaluations {
        state.generation += 1;
        let children: Vec<ArchGenome> = match mode {
            SearchMode::Evolve => {
                let step = state.params.step_size();
                let parents = binary_tournament(&state.population, cfg.offspring_size, &mut state.rng);
                parents
                    .iter()
                    .map(|p| {
                        let g = cell_mutation(&p.genome, state.params.cell_mut_p, step, &bounds, &mut state.rng);
                        layer_mutation(&g, state.params.layer_mut_p, &bounds, &mut state.rng)
                    })
                    .collect()
            }
            SearchMode::RandomSearch => initialize(cfg.offspring_size, &bounds, &mut state.rng),
        };
        let offspring = evaluate_all(children, evaluator, cfg.rng_seed, state.generation);
        let population = std::mem::take(&mut state.population);
        state.population = replace_best(population, offspring.clone(), cfg.population_size, &mut state.rng);
        state.evaluations += cfg.offspring_size;
        let improved = match mode {
            SearchMode::Evolve => Some(state.self_adapt(mean_fitness(&state.population), bounds.max_npl)),
            SearchMode::RandomSearch => None,
        };
        let rec = record(&state, improved, &offspring, started);
        log::debug!(
            "generation {} evals {} best {:.4e} {}",
            rec.generation,
            rec.evaluations,
            rec.best_fitness,
            rec.best_genome
        );
        state.history.push(rec);
    }

    Ok(EvoOutcome {
        best: state.population[0].clone(),
        state,
    })
}

/// Non-finite fitness values travel through JSON as `null`.
mod fitness_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}
