use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symreg_core::gp::{evolve, GpConfig};
use symreg_core::metrics::{r2, variance};
use symreg_core::parser::print;
use symreg_core::{evaluate, ColumnSpec, Dataset, OperatorSet, Schema};

pub fn affine_problem(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: Vec<f64> = (0..200).map(|_| rng.random_range(-5.0..5.0)).collect();
    let x1: Vec<f64> = (0..200).map(|_| rng.random_range(-5.0..5.0)).collect();
    let y = x0.iter().map(|x| 2.5 * x + 1.0).collect();
    Dataset::from_numeric(&[("x0", x0), ("x1", x1), ("y", y)]).unwrap()
}

pub fn bmi_problem(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..200).map(|_| rng.random_range(40.0..150.0)).collect();
    let h: Vec<f64> = (0..200).map(|_| rng.random_range(1.4..2.0)).collect();
    let y = w.iter().zip(&h).map(|(w, h)| w / (h * h)).collect();
    Dataset::from_numeric(&[("w", w), ("h", h), ("y", y)]).unwrap()
}

pub fn run(data: &Dataset, features: &[&str], budget: usize, seed: u64, threshold: f64) -> (f64, String) {
    let schema = Schema::new(features.iter().map(|f| ColumnSpec::numeric(*f)).collect()).unwrap();
    let y = data.numeric("y").unwrap();
    let config = GpConfig {
        population_size: 500,
        generations: 100,
        max_complexity: budget,
        seed,
        target_fitness: Some((1.0 - threshold) * 0.1 * variance(y)),
        ..GpConfig::default()
    };
    let res = evolve(&config, data, "y", &schema, &OperatorSet::default(), &mut |_| {}).unwrap();
    let pred = evaluate(&res.best.expr, data).unwrap().values;
    (r2(&pred, y).unwrap(), print(&res.best.expr))
}

/// Best train R2 per seed for y = 2.5*x0 + 1 under budget 3.
pub fn affine_scores(seeds: u64) -> Vec<(f64, String)> {
    (0..seeds)
        .map(|s| run(&affine_problem(s), &["x0", "x1"], 3, s, 0.9999))
        .collect()
}

/// Best train R2 per seed for y = w/h^2 under budget 4.
pub fn bmi_scores(seeds: u64) -> Vec<(f64, String)> {
    (0..seeds)
        .map(|s| run(&bmi_problem(s), &["w", "h"], 4, s, 0.999))
        .collect()
}
