use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symreg_core::gp::*;
use symreg_core::{complexity, ColumnSpec, Dataset, Expr, OperatorSet, Schema};

pub fn schema() -> Schema {
    Schema::new(vec![
        ColumnSpec::numeric("a"),
        ColumnSpec::numeric("b"),
        ColumnSpec::categorical("g", ["F", "M"]),
    ])
    .unwrap()
}

pub fn data(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 120;
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
    let g: Vec<Option<u32>> = (0..n).map(|i| Some((i % 2) as u32)).collect();
    let y: Vec<f64> = (0..n).map(|i| a[i] * b[i] + (i % 2) as f64 + (a[i]).sqrt()).collect();
    Dataset::builder()
        .numeric("a", a)
        .numeric("b", b)
        .categorical("g", ["F", "M"], g)
        .numeric("y", y)
        .build()
        .unwrap()
}

pub fn config(seed: u64, budget: usize) -> GpConfig {
    GpConfig {
        population_size: 60,
        generations: 12,
        tournament_size: 3,
        max_complexity: budget,
        seed,
        ..GpConfig::default()
    }
}

pub fn individual(fitness: f64, complexity: usize, birth: usize) -> Individual {
    Individual {
        expr: Expr::Constant(fitness),
        fitness,
        raw_mse: fitness,
        complexity,
        birth_generation: birth,
    }
}

/// Returns the number of populations compared.
pub fn front_matches_brute_force(populations: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..populations {
        let pop: Vec<Individual> = (0..80)
            .map(|_| {
                let mut i = individual(rng.random_range(0..20) as f64, rng.random_range(1..15), 0);
                if rng.random_bool(0.05) {
                    i.raw_mse = f64::INFINITY;
                }
                i
            })
            .collect();
        let mut front = ParetoFront::new();
        front.extend(&pop);
        assert!(front.is_consistent());
        let got: Vec<(usize, f64)> = front.members().map(|m| (m.complexity, m.raw_mse)).collect();
        assert_eq!(got, brute_force_front(&pop));
        let ranks = nondomination_ranks(&pop);
        for (i, p) in pop.iter().enumerate() {
            if ranks[i] == 0 {
                assert!(got.contains(&(p.complexity, p.raw_mse)));
            }
        }
    }
    populations
}

/// Budget, complexity bookkeeping, elitism and the front, checked on
/// every generation of a scalar and a Pareto run. Returns generations seen.
pub fn run_invariants_hold_every_generation() -> usize {
    let mut total = 0;
    for mode in [SelectionMode::Scalar, SelectionMode::Pareto] {
        let d = data(2);
        let mut c = config(8, 7);
        c.mode = mode;
        c.generations = 25;
        let mut last_best = f64::INFINITY;
        let mut gens = 0;
        evolve_with(&c, &d, "y", &schema(), &OperatorSet::default(), &mut |s, pop, front| {
            gens += 1;
            assert_eq!(pop.len(), c.population_size);
            for i in pop {
                assert!(within_budget(&i.expr, &c), "over budget: {:?}", i.expr);
                assert_eq!(i.complexity, complexity(&i.expr));
            }
            assert!(
                s.best_mse <= last_best,
                "elitism violated in generation {}",
                s.generation
            );
            last_best = s.best_mse;
            assert!(front.is_consistent());
            let mut fresh = ParetoFront::new();
            fresh.extend(pop);
            let snapshot: Vec<(usize, f64)> = fresh.members().map(|m| (m.complexity, m.raw_mse)).collect();
            assert_eq!(snapshot, brute_force_front(pop));
        })
        .unwrap();
        assert_eq!(gens, c.generations + 1);
        total += gens;
    }
    total
}

/// Returns the number of configurations compared.
pub fn seeded_runs_are_bit_identical() -> usize {
    let d = data(3);
    let configs = [
        config(1, 5),
        GpConfig {
            mode: SelectionMode::Pareto,
            ..config(2, 9)
        },
        GpConfig {
            linear_scaling: true,
            refit: true,
            ..config(3, 13)
        },
    ];
    for c in &configs {
        let run = || evolve(c, &d, "y", &schema(), &OperatorSet::default(), &mut |_| {}).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.history, b.history);
        assert_eq!(symreg_core::print(&a.best.expr), symreg_core::print(&b.best.expr));
        assert_eq!(history_csv(&a.history), history_csv(&b.history));
        assert_eq!(front_csv(&a.front), front_csv(&b.front));
    }
    configs.len()
}
