//! Genetic-programming search over expression trees under a hard
//! complexity budget.
//!
//! Randomness: every genetic operation for population slot `s` in
//! generation `g` draws from its own ChaCha stream keyed by
//! `(seed, g, s)`, so results do not depend on the rayon thread count.

mod config;
mod operators;
mod select;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{GpConfig, SelectionMode, CONFIG_KEYS};
pub use operators::{
    constant_jitter, crossover, point_mutate, random_terminal, random_tree, subtree_mutate, within_budget, Method,
};
pub use select::{
    beats, brute_force_front, crowding_distances, dominates, nondomination_ranks, select, select_pareto, ParetoFront,
};

use crate::complexity::complexity;
use crate::data::{Column, Dataset};
use crate::expr::{eval_unchecked, EvalError, Expr, OperatorSet, Schema};
use crate::metrics::variance;
use crate::parser::print;
use crate::symbolic::{affine_peel, affine_rebuild, simplify};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("an internal node was requested but the operator set is empty")]
    EmptyOperatorSet,
    #[error("training set has no rows")]
    EmptyDataset,
    #[error("target column `{0}` is missing or not numeric")]
    TargetMissing(String),
    #[error("target column `{0}` has missing or non-finite values")]
    TargetNotFinite(String),
    #[error("every candidate is non-finite on the training rows")]
    AllIndividualsInvalid,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub expr: Expr,
    /// `raw_mse + parsimony * complexity`; infinite when invalid.
    pub fitness: f64,
    pub raw_mse: f64,
    pub complexity: usize,
    pub birth_generation: usize,
}

impl Individual {
    pub fn is_valid(&self) -> bool {
        self.raw_mse.is_finite()
    }
}

/// Per-generation summary handed to the progress sink.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Lowest raw training MSE in the population.
    pub best_mse: f64,
    pub best_complexity: usize,
    pub best_fitness: f64,
    pub mean_complexity: f64,
    pub invalid: usize,
    pub front_size: usize,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    /// Lowest training MSE seen, ties to lower complexity.
    pub best: Individual,
    pub front: ParetoFront,
    pub history: Vec<GenerationStats>,
    pub parsimony: f64,
    pub final_population: Vec<Individual>,
}

/// ChaCha stream for one population slot in one generation.
pub fn slot_rng(seed: u64, generation: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | slot as u64);
    rng
}

const INIT_ATTEMPTS: usize = 16;

/// Ramped half-and-half: even slots grow, odd slots full, depths cycling
/// through `2..=init_max_depth`. Over-budget trees are redrawn a bounded
/// number of times and then replaced by a terminal.
pub fn initialize(config: &GpConfig, schema: &Schema, ops: &OperatorSet) -> Result<Vec<Expr>, GpError> {
    config.validate()?;
    (0..config.population_size)
        .into_par_iter()
        .map(|slot| {
            let mut rng = slot_rng(config.seed, 0, slot);
            let method = if slot % 2 == 0 { Method::Grow } else { Method::Full };
            let depth = if config.init_max_depth < 2 {
                1
            } else {
                2 + (slot / 2) % (config.init_max_depth - 1)
            };
            for _ in 0..INIT_ATTEMPTS {
                let t = random_tree(&mut rng, schema, ops, depth, method, config.constant_range)?;
                if within_budget(&t, config) {
                    return Ok(t);
                }
            }
            Ok(random_terminal(&mut rng, schema, config.constant_range))
        })
        .collect()
}

/// Fitness evaluation on a fixed training set.
pub struct Evaluator<'a> {
    data: &'a Dataset,
    target: &'a [f64],
    parsimony: f64,
    linear_scaling: bool,
}

impl<'a> Evaluator<'a> {
    pub fn new(data: &'a Dataset, target: &str, parsimony: f64, linear_scaling: bool) -> Result<Self, GpError> {
        if data.n_rows() == 0 {
            return Err(GpError::EmptyDataset);
        }
        let y = match data.column(target) {
            Some(Column::Numeric(v)) => v.as_slice(),
            _ => return Err(GpError::TargetMissing(target.to_string())),
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GpError::TargetNotFinite(target.to_string()));
        }
        Ok(Self {
            data,
            target: y,
            parsimony,
            linear_scaling,
        })
    }

    fn mse(&self, pred: &[f64]) -> f64 {
        let mut s = 0.0;
        for (p, t) in pred.iter().zip(self.target) {
            let d = p - t;
            s += d * d;
        }
        let m = s / pred.len() as f64;
        if m.is_finite() {
            m
        } else {
            f64::INFINITY
        }
    }

    /// Scores `expr`; with linear scaling the root affine wrapper is first
    /// replaced by its least-squares optimum.
    pub fn evaluate(&self, expr: Expr, birth_generation: usize) -> Individual {
        let expr = if self.linear_scaling {
            rescale(&expr, self.data, self.target).unwrap_or(expr)
        } else {
            expr
        };
        let pred = eval_unchecked(&expr, self.data);
        let raw_mse = if pred.iter().all(|v| v.is_finite()) {
            self.mse(&pred)
        } else {
            f64::INFINITY
        };
        let complexity = complexity(&expr);
        let fitness = if raw_mse.is_finite() {
            raw_mse + self.parsimony * complexity as f64
        } else {
            f64::INFINITY
        };
        Individual {
            expr,
            fitness,
            raw_mse,
            complexity,
            birth_generation,
        }
    }
}

/// Least-squares scale and offset for the core of `expr`; `None` when the
/// core is non-finite somewhere.
fn rescale(expr: &Expr, data: &Dataset, y: &[f64]) -> Option<Expr> {
    let (_, _, core) = affine_peel(expr);
    let p = eval_unchecked(core, data);
    if p.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let n = p.len() as f64;
    let (mp, my) = (p.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in p.iter().zip(y) {
        sxy += (a - mp) * (b - my);
        sxx += (a - mp) * (a - mp);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mp;
    if !(slope.is_finite() && intercept.is_finite()) {
        return None;
    }
    if slope == 0.0 {
        return Some(Expr::Constant(my));
    }
    Some(affine_rebuild(slope, intercept, core.clone()))
}

/// Refits the outer scale and offset of `expr` on `data` by least squares;
/// complexity is unchanged.
pub fn affine_refit(expr: &Expr, data: &Dataset, target: &str) -> Result<Expr, GpError> {
    let y = data
        .try_numeric(target)
        .map_err(|_| GpError::TargetMissing(target.to_string()))?;
    Ok(rescale(expr, data, y).unwrap_or_else(|| expr.clone()))
}

/// Indices sorted best first under scalar fitness.
fn ranked(pop: &[Individual]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (&pop[a], &pop[b]);
        y.is_valid()
            .cmp(&x.is_valid())
            .then(x.fitness.total_cmp(&y.fitness))
            .then(x.complexity.cmp(&y.complexity))
            .then(x.birth_generation.cmp(&y.birth_generation))
            .then(a.cmp(&b))
    });
    idx
}

fn lowest_mse(pop: &[Individual]) -> usize {
    (0..pop.len())
        .min_by(|&a, &b| {
            pop[a]
                .raw_mse
                .total_cmp(&pop[b].raw_mse)
                .then(pop[a].complexity.cmp(&pop[b].complexity))
                .then(a.cmp(&b))
        })
        .expect("nonempty population")
}

fn stats(generation: usize, pop: &[Individual], front: &ParetoFront) -> GenerationStats {
    let b = &pop[lowest_mse(pop)];
    let best_fitness = pop.iter().map(|i| i.fitness).fold(f64::INFINITY, f64::min);
    GenerationStats {
        generation,
        best_mse: b.raw_mse,
        best_complexity: b.complexity,
        best_fitness,
        mean_complexity: pop.iter().map(|i| i.complexity as f64).sum::<f64>() / pop.len() as f64,
        invalid: pop.iter().filter(|i| !i.is_valid()).count(),
        front_size: front.len(),
    }
}

/// Breeding context shared by all slots of one generation.
struct Generation<'a> {
    config: &'a GpConfig,
    schema: &'a Schema,
    ops: &'a OperatorSet,
    pop: &'a [Individual],
    pareto: Option<(Vec<usize>, Vec<f64>)>,
    eval: &'a Evaluator<'a>,
    index: usize,
}

impl Generation<'_> {
    fn pick(&self, rng: &mut ChaCha8Rng) -> usize {
        match &self.pareto {
            None => select(rng, self.pop, self.config.tournament_size),
            Some((ranks, crowd)) => select_pareto(rng, ranks, crowd, self.config.tournament_size),
        }
    }

    fn breed(&self, slot: usize) -> Individual {
        let c = self.config;
        let mut rng = slot_rng(c.seed, self.index, slot);
        let u: f64 = rng.random();
        let a = self.pick(&mut rng);
        let parent = &self.pop[a].expr;
        let mut edge = c.p_crossover;
        let child = if u < edge {
            let b = self.pick(&mut rng);
            crossover(&mut rng, parent, &self.pop[b].expr, c)
        } else if u < {
            edge += c.p_subtree_mutation;
            edge
        } {
            subtree_mutate(&mut rng, parent, self.schema, self.ops, c)
        } else if u < {
            edge += c.p_point_mutation;
            edge
        } {
            point_mutate(&mut rng, parent, self.schema, self.ops, c.constant_range)
        } else if u < {
            edge += c.p_constant_jitter;
            edge
        } {
            let k = rng.random_range(0..=3);
            constant_jitter(&mut rng, parent, c.jitter_sigma * 10f64.powi(-k))
        } else {
            return self.pop[a].clone();
        };
        if !within_budget(&child, c) {
            return self.pop[a].clone();
        }
        let ind = self.eval.evaluate(child, self.index);
        if within_budget(&ind.expr, c) {
            ind
        } else {
            self.pop[a].clone()
        }
    }
}

/// Runs the search. `sink` receives one record per generation, starting
/// with the initial population as generation 0.
pub fn evolve(
    config: &GpConfig,
    train: &Dataset,
    target: &str,
    schema: &Schema,
    ops: &OperatorSet,
    sink: &mut dyn FnMut(&GenerationStats),
) -> Result<RunResult, GpError> {
    evolve_with(config, train, target, schema, ops, &mut |s, _, _| sink(s))
}

/// [`evolve`] with an observer that also sees each generation's population
/// and the running front.
pub fn evolve_with(
    config: &GpConfig,
    train: &Dataset,
    target: &str,
    schema: &Schema,
    ops: &OperatorSet,
    observer: &mut dyn FnMut(&GenerationStats, &[Individual], &ParetoFront),
) -> Result<RunResult, GpError> {
    config.validate()?;
    if train.n_rows() == 0 {
        return Err(GpError::EmptyDataset);
    }
    if !matches!(train.column(target), Some(Column::Numeric(_))) {
        return Err(GpError::TargetMissing(target.to_string()));
    }
    if ops.is_empty() && config.init_max_depth > 1 {
        return Err(GpError::EmptyOperatorSet);
    }
    for spec in schema.columns() {
        let expected = if spec.is_numeric() {
            Expr::Feature(spec.name.clone())
        } else {
            Expr::CategoryMap {
                name: spec.name.clone(),
                table: spec
                    .categories()
                    .unwrap_or_default()
                    .iter()
                    .map(|c| (c.clone(), 0.0))
                    .collect(),
            }
        };
        expected.check_bound(train.schema())?;
    }
    let y = train
        .try_numeric(target)
        .map_err(|_| GpError::TargetMissing(target.to_string()))?;
    let parsimony = config.parsimony_coefficient.unwrap_or_else(|| 1e-4 * variance(y));
    let eval = Evaluator::new(train, target, parsimony, config.linear_scaling)?;

    let mut pop: Vec<Individual> = initialize(config, schema, ops)?
        .into_par_iter()
        .map(|e| eval.evaluate(e, 0))
        .collect();
    if pop.iter().all(|i| !i.is_valid()) {
        return Err(GpError::AllIndividualsInvalid);
    }
    let mut front = ParetoFront::new();
    front.extend(&pop);
    let mut best = pop[lowest_mse(&pop)].clone();
    let mut history = vec![stats(0, &pop, &front)];
    observer(&history[0], &pop, &front);

    for g in 1..=config.generations {
        if config.target_fitness.is_some_and(|t| best.raw_mse <= t) {
            break;
        }
        let mut next = Vec::with_capacity(config.population_size);
        if config.elitism_count > 0 {
            let first = lowest_mse(&pop);
            next.push(pop[first].clone());
            next.extend(
                ranked(&pop)
                    .into_iter()
                    .filter(|&i| i != first)
                    .take(config.elitism_count - 1)
                    .map(|i| pop[i].clone()),
            );
        }
        let pareto = (config.mode == SelectionMode::Pareto).then(|| {
            let ranks = nondomination_ranks(&pop);
            let crowd = crowding_distances(&pop, &ranks);
            (ranks, crowd)
        });
        let gen = Generation {
            config,
            schema,
            ops,
            pop: &pop,
            pareto,
            eval: &eval,
            index: g,
        };
        let children: Vec<Individual> = (next.len()..config.population_size)
            .into_par_iter()
            .map(|slot| gen.breed(slot))
            .collect();
        next.extend(children);
        pop = next;
        front.extend(&pop);
        let cand = &pop[lowest_mse(&pop)];
        if (cand.raw_mse, cand.complexity) < (best.raw_mse, best.complexity) {
            best = cand.clone();
        }
        history.push(stats(g, &pop, &front));
        observer(history.last().expect("just pushed"), &pop, &front);
    }

    if config.refit {
        let refit = eval.evaluate(affine_refit(&best.expr, train, target)?, best.birth_generation);
        if refit.raw_mse <= best.raw_mse && within_budget(&refit.expr, config) {
            best = refit;
        }
    }
    let tidy = eval.evaluate(simplify(&best.expr), best.birth_generation);
    if tidy.complexity <= best.complexity && tidy.raw_mse <= best.raw_mse && within_budget(&tidy.expr, config) {
        best = tidy;
    }
    Ok(RunResult {
        best,
        front,
        history,
        parsimony,
        final_population: pop,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut s = String::from("generation,best_mse,best_complexity,best_fitness,mean_complexity,invalid,front_size\n");
    for h in history {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            h.generation, h.best_mse, h.best_complexity, h.best_fitness, h.mean_complexity, h.invalid, h.front_size
        );
    }
    s
}

pub fn front_csv(front: &ParetoFront) -> String {
    let mut s = String::from("complexity,mse,expression\n");
    for m in front.members() {
        let _ = writeln!(s, "{},{},{}", m.complexity, m.raw_mse, csv_field(&print(&m.expr)));
    }
    s
}
