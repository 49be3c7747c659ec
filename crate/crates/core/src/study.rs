//! The body-fat study pipeline: baselines, budgeted searches, multi-seed
//! summaries and the checks that compare them with the reference table.

use std::fmt::Write as _;

use crate::casestudy::{cohort_stats, reference, COHORT_FEMALE, COHORT_MALE, COHORT_ROWS};
use crate::complexity::complexity;
use crate::data::nhanes::{baseline_features, budget, gender_counts, search_features, TARGET};
use crate::data::{describe, Dataset};
use crate::expr::{evaluate, Expr, OperatorSet};
use crate::gp::{evolve, GenerationStats, GpConfig, GpError, RunResult};
use crate::linfit::{fit_bmi_baseline, fit_ols, FitError, OlsFit};
use crate::metrics::r2;
use crate::parser::print;

/// Allowed gap between a measured and a tabulated descriptive statistic.
pub const STATS_TOLERANCE: f64 = 0.05;
/// Allowed gap between mean baseline test R2 and the reference value.
pub const BASELINE_TOLERANCE: f64 = 0.03;
/// A search may trail its baseline by at most this much mean test R2.
pub const SEARCH_SLACK: f64 = 0.01;
/// Mean test R2 the widest search must reach (parity with baseline 4).
pub const SR4_FLOOR: f64 = 0.843;
pub const SR4_STRETCH: f64 = 0.86;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelScore {
    pub name: String,
    pub complexity: usize,
    pub train_r2: f64,
    pub test_r2: f64,
    pub expression: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    pub baselines: Vec<ModelScore>,
    /// Empty when only the baselines were fitted.
    pub searches: Vec<ModelScore>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Fits baseline `n` (1..=4) with its fixed feature set.
pub fn fit_baseline(n: usize, train: &Dataset, test: &Dataset) -> Result<OlsFit, FitError> {
    match n {
        2 => fit_bmi_baseline(train, Some(test), TARGET),
        _ => {
            let feats = baseline_features(n).ok_or_else(|| FitError::ColumnMissing(format!("baseline {n}")))?;
            fit_ols(train, Some(test), &feats, TARGET)
        }
    }
}

pub fn baseline_score(n: usize, fit: &OlsFit) -> ModelScore {
    ModelScore {
        name: format!("Baseline {n}"),
        complexity: complexity(&fit.expression),
        train_r2: fit.train_r2,
        test_r2: fit.test_r2.unwrap_or(f64::NAN),
        expression: fit.expression.clone(),
    }
}

/// R2 of `expr` on `data`; NaN when the model is undefined on some row.
pub fn score(expr: &Expr, data: &Dataset, target: &str) -> f64 {
    let Ok(eval) = evaluate(expr, data) else {
        return f64::NAN;
    };
    let Some(y) = data.numeric(target) else { return f64::NAN };
    r2(&eval.values, y).unwrap_or(f64::NAN)
}

/// Runs search problem `n` with `config`; the caller decides the budget
/// (see [`budget`]).
pub fn run_search(
    n: usize,
    config: &GpConfig,
    ops: &OperatorSet,
    train: &Dataset,
    test: &Dataset,
    sink: &mut dyn FnMut(&GenerationStats),
) -> Result<(RunResult, ModelScore), GpError> {
    let feats = search_features(n).ok_or_else(|| GpError::InvalidConfig(format!("no search problem {n}")))?;
    let schema = train
        .schema()
        .project(&feats)
        .ok_or_else(|| GpError::TargetMissing(format!("one of {}", feats.join(", "))))?;
    let res = evolve(config, train, TARGET, &schema, ops, sink)?;
    let best = &res.best.expr;
    let s = ModelScore {
        name: format!("SR Model {n}"),
        complexity: complexity(best),
        train_r2: score(best, train, TARGET),
        test_r2: score(best, test, TARGET),
        expression: best.clone(),
    };
    Ok((res, s))
}

/// Default search configuration for problem `n`. Scale and offset are free
/// under the complexity measure, so they are fitted by least squares rather
/// than evolved.
pub fn search_config(n: usize, base: &GpConfig) -> GpConfig {
    GpConfig {
        max_complexity: budget(n).unwrap_or(base.max_complexity),
        linear_scaling: true,
        refit: true,
        ..base.clone()
    }
}

/// Cohort size, gender split and descriptive statistics against the
/// tabulated cohort.
pub fn cohort_checks(cohort: &Dataset) -> Vec<Check> {
    let (male, female) = gender_counts(cohort);
    let mut out = vec![Check::new(
        "cohort size",
        cohort.n_rows() == COHORT_ROWS && male == COHORT_MALE && female == COHORT_FEMALE,
        format!(
            "{} rows ({male} male, {female} female); expected {COHORT_ROWS} ({COHORT_MALE}, {COHORT_FEMALE})",
            cohort.n_rows()
        ),
    )];
    let stats = describe(cohort);
    for (name, want) in cohort_stats() {
        let Some(s) = stats.iter().find(|s| s.name == name) else {
            out.push(Check::new(format!("stats {name}"), false, "column missing"));
            continue;
        };
        let got = [s.mean, s.std, s.min, s.p25, s.p50, s.p75, s.max];
        let worst = got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
        out.push(Check::new(
            format!("stats {name}"),
            worst <= STATS_TOLERANCE,
            format!("max deviation {worst:.3} (tolerance {STATS_TOLERANCE})"),
        ));
    }
    out
}

pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, sd)
}

fn column(runs: &[SeedRun], name: &str, pick: fn(&ModelScore) -> f64) -> Vec<f64> {
    runs.iter()
        .flat_map(|r| r.baselines.iter().chain(&r.searches))
        .filter(|m| m.name == name)
        .map(pick)
        .collect()
}

fn model_names(runs: &[SeedRun]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for m in runs.iter().flat_map(|r| r.baselines.iter().chain(&r.searches)) {
        if !names.contains(&m.name) {
            names.push(m.name.clone());
        }
    }
    names
}

/// Checks of baseline and search scores across seeds against the
/// reference table.
pub fn summary_checks(runs: &[SeedRun]) -> Vec<Check> {
    let mut out = Vec::new();
    let test = |name: &str| column(runs, name, |m| m.test_r2);
    for n in 1..=4 {
        let name = format!("Baseline {n}");
        let t = test(&name);
        if t.is_empty() {
            continue;
        }
        let want = reference(&name).map_or(f64::NAN, |r| r.test_r2);
        let (m, _) = mean_sd(&t);
        out.push(Check::new(
            format!("{name} test R2"),
            (m - want).abs() <= BASELINE_TOLERANCE,
            format!("mean {m:.4} vs {want:.3} (tolerance {BASELINE_TOLERANCE})"),
        ));
    }

    if runs.iter().all(|r| r.baselines.iter().any(|m| m.name == "Baseline 2")) && !runs.is_empty() {
        let worst = runs.iter().all(|r| {
            let b2 = r.baselines.iter().find(|m| m.name == "Baseline 2").unwrap().test_r2;
            r.baselines
                .iter()
                .chain(&r.searches)
                .filter(|m| m.name != "Baseline 2")
                .all(|m| b2 < m.test_r2)
        });
        out.push(Check::new(
            "Baseline 2 strictly worst",
            worst,
            "on every seed's test split",
        ));
    }

    for n in 1..=4 {
        let sr = test(&format!("SR Model {n}"));
        let base = test(&format!("Baseline {n}"));
        if sr.is_empty() || sr.len() != base.len() {
            continue;
        }
        let (ms, _) = mean_sd(&sr);
        let (mb, _) = mean_sd(&base);
        out.push(Check::new(
            format!("SR Model {n} vs Baseline {n}"),
            ms >= mb - SEARCH_SLACK,
            format!("mean test R2 {ms:.4} vs {mb:.4} - {SEARCH_SLACK}"),
        ));
        if n >= 2 {
            let wins = sr.iter().zip(&base).filter(|(s, b)| s > b).count();
            let needed = (3 * sr.len()).div_ceil(5);
            out.push(Check::new(
                format!("SR Model {n} beats Baseline {n}"),
                wins >= needed,
                format!("strictly better on {wins}/{} seeds, need {needed}", sr.len()),
            ));
        }
        if n == 4 {
            out.push(Check::new(
                "SR Model 4 parity",
                ms >= SR4_FLOOR,
                format!(
                    "mean test R2 {ms:.4}, floor {SR4_FLOOR}, stretch {SR4_STRETCH} {}",
                    if ms >= SR4_STRETCH { "reached" } else { "not reached" }
                ),
            ));
        }
    }
    out
}

/// Table of `model, complexity, train mean±sd, test mean±sd, reference test`
/// in fixed-width text and CSV.
pub fn summary_table(runs: &[SeedRun]) -> (String, String) {
    let mut text = format!(
        "{:<12} {:>10} {:>17} {:>17} {:>9}\n",
        "model", "complexity", "train R2", "test R2", "reference"
    );
    let mut csv = String::from("model,complexity,train_mean,train_sd,test_mean,test_sd,reference_test\n");
    for name in model_names(runs) {
        let c = column(runs, &name, |m| m.complexity as f64);
        let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
        let cmax = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cx = if cmin == cmax {
            format!("{cmin}")
        } else {
            format!("{cmin}-{cmax}")
        };
        let (trm, trs) = mean_sd(&column(runs, &name, |m| m.train_r2));
        let (tem, tes) = mean_sd(&column(runs, &name, |m| m.test_r2));
        let refr = reference(&name).map_or(f64::NAN, |r| r.test_r2);
        let _ = writeln!(
            text,
            "{name:<12} {cx:>10} {:>17} {:>17} {refr:>9.3}",
            format!("{trm:.4} ± {trs:.4}"),
            format!("{tem:.4} ± {tes:.4}"),
        );
        let _ = writeln!(csv, "{name},{cx},{trm},{trs},{tem},{tes},{refr}");
    }
    (text, csv)
}

/// Per-seed models as `seed,model,complexity,train_r2,test_r2,expression`.
pub fn runs_csv(runs: &[SeedRun]) -> String {
    let mut s = String::from("seed,model,complexity,train_r2,test_r2,expression\n");
    for r in runs {
        for m in r.baselines.iter().chain(&r.searches) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},\"{}\"",
                r.seed,
                m.name,
                m.complexity,
                m.train_r2,
                m.test_r2,
                print(&m.expression).replace('"', "\"\"")
            );
        }
    }
    s
}
