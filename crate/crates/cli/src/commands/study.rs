use std::fmt::Write as _;
use std::path::PathBuf;

use symreg_core::casestudy::reference;
use symreg_core::data::nhanes::gender_counts;
use symreg_core::data::{describe, split, stats_csv, stats_table, write_csv, Dataset, SplitSpec};
use symreg_core::gp::{evolve as run_gp, front_csv, history_csv, GpConfig, RunResult};
use symreg_core::study::{
    baseline_score, cohort_checks, run_search, runs_csv, score, summary_checks, summary_table, Check, SeedRun,
};
use symreg_core::{complexity, print, ModelDocument};

use super::{cohort, load_for, progress, split_list, Settings};
use crate::args::{Global, SearchArgs};
use crate::error::CliError;
use crate::manifest::Session;

fn write_stats(cohort: &Dataset, session: &mut Session) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(cohort, &mut buf)?;
    session.write("cohort.csv", &String::from_utf8(buf).expect("csv is utf-8"))?;
    let stats = describe(cohort);
    session.write("stats.csv", &stats_csv(&stats))?;
    let (male, female) = gender_counts(cohort);
    let mut text = stats_table(&stats);
    let n = cohort.n_rows() as f64;
    let _ = writeln!(
        text,
        "\n{} rows: {male} male ({:.1}%), {female} female ({:.1}%)",
        cohort.n_rows(),
        100.0 * male as f64 / n,
        100.0 * female as f64 / n
    );
    session.write("stats.txt", &text)?;
    Ok(text)
}

fn check_lines(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    s
}

pub fn stats(global: &Global, session: &mut Session) -> Result<(), CliError> {
    let data = cohort(global, session)?;
    print!("{}", write_stats(&data, session)?);
    print!("{}", check_lines(&cohort_checks(&data)));
    Ok(())
}

fn split_cohort(data: &Dataset, fraction: f64, seed: u64) -> (Dataset, Dataset) {
    split(
        data,
        &SplitSpec {
            train_fraction: fraction,
            seed,
        },
    )
}

pub fn fit_baseline(global: &Global, session: &mut Session, n: usize) -> Result<(), CliError> {
    let settings = Settings::load(global, &SearchArgs::default(), None, session)?;
    session.set_config(settings.snapshot());
    let data = cohort(global, session)?;
    let (train, test) = split_cohort(&data, settings.train_fraction, global.seed);
    let fit = symreg_core::study::fit_baseline(n, &train, &test)?;
    let s = baseline_score(n, &fit);

    let mut report = format!("Baseline {n}\n");
    for (name, c) in &fit.coefficients {
        let _ = writeln!(report, "  {name:<10} {c:>14.6}");
    }
    let _ = writeln!(report, "  {:<10} {:>14.6}", "intercept", fit.intercept);
    let _ = writeln!(report, "formula     {}", print(&fit.expression));
    let _ = writeln!(report, "complexity  {}", s.complexity);
    let _ = writeln!(report, "train R2    {:.4}", s.train_r2);
    let _ = writeln!(report, "test R2     {:.4}", s.test_r2);
    if let Some(r) = reference(&s.name) {
        let _ = writeln!(report, "reference   train {:.3}, test {:.3}", r.train_r2, r.test_r2);
    }
    let doc = ModelDocument::from_expr(
        &fit.expression,
        s.train_r2,
        s.test_r2,
        global.seed,
        format!("Baseline {n}, OLS"),
    );
    session.write(&format!("baseline-{n}.json"), &doc.to_json())?;
    session.write(&format!("baseline-{n}.txt"), &report)?;
    print!("{report}");
    Ok(())
}

pub struct Custom {
    pub csv: Option<PathBuf>,
    pub features: Option<String>,
    pub categorical: Option<String>,
    pub target: String,
}

fn write_run(
    session: &mut Session,
    stem: &str,
    res: &RunResult,
    train_r2: f64,
    test_r2: f64,
    seed: u64,
) -> Result<(), CliError> {
    let best = &res.best.expr;
    let doc = ModelDocument::from_expr(
        best,
        train_r2,
        test_r2,
        seed,
        format!("{stem}, parsimony {}", res.parsimony),
    );
    session.write(&format!("{stem}.json"), &doc.to_json())?;
    session.write(&format!("{stem}-front.csv"), &front_csv(&res.front))?;
    session.write(&format!("{stem}-history.csv"), &history_csv(&res.history))?;
    println!("best        {}", print(best));
    println!("complexity  {}", complexity(best));
    println!("train R2    {train_r2:.4}");
    println!("test R2     {test_r2:.4}");
    println!("front       {} models", res.front.len());
    Ok(())
}

pub fn evolve(
    global: &Global,
    session: &mut Session,
    problem: &str,
    custom: &Custom,
    search: &SearchArgs,
) -> Result<(), CliError> {
    if problem == "custom" {
        return evolve_custom(global, session, custom, search);
    }
    let n: usize = problem
        .parse()
        .ok()
        .filter(|n| (1..=4).contains(n))
        .ok_or_else(|| CliError::Input(format!("problem must be 1, 2, 3, 4 or custom, got `{problem}`")))?;
    let settings = Settings::load(global, search, Some(n), session)?;
    session.set_config(settings.snapshot());
    let data = cohort(global, session)?;
    let (train, test) = split_cohort(&data, settings.train_fraction, global.seed);
    let (res, s) = run_search(
        n,
        &settings.gp,
        &settings.ops,
        &train,
        &test,
        &mut progress(search.quiet),
    )?;
    write_run(session, &format!("sr-{n}"), &res, s.train_r2, s.test_r2, global.seed)
}

fn evolve_custom(global: &Global, session: &mut Session, custom: &Custom, search: &SearchArgs) -> Result<(), CliError> {
    let path = custom
        .csv
        .as_ref()
        .ok_or_else(|| CliError::Input("custom problem needs --csv".into()))?;
    let features = split_list(
        custom
            .features
            .as_deref()
            .ok_or_else(|| CliError::Input("custom problem needs --features".into()))?,
    );
    let settings = Settings::load(global, search, None, session)?;
    session.set_config(settings.snapshot());
    let categorical = custom.categorical.as_deref().map(split_list).unwrap_or_default();
    let data = load_for(path, None, &categorical, session)?;
    let names: Vec<&str> = features.iter().map(String::as_str).collect();
    let schema = data
        .schema()
        .project(&names)
        .ok_or_else(|| CliError::Input(format!("{} lacks one of {}", path.display(), features.join(", "))))?;
    let (train, test) = split_cohort(&data, settings.train_fraction, global.seed);
    let res = run_gp(
        &settings.gp,
        &train,
        &custom.target,
        &schema,
        &settings.ops,
        &mut progress(search.quiet),
    )?;
    let tr = score(&res.best.expr, &train, &custom.target);
    let te = score(&res.best.expr, &test, &custom.target);
    write_run(session, "sr-custom", &res, tr, te, global.seed)
}

pub fn reproduce(
    global: &Global,
    mut session: Session,
    seeds: &str,
    baselines_only: bool,
    search: &SearchArgs,
) -> Result<(), CliError> {
    let seeds: Vec<u64> = split_list(seeds)
        .iter()
        .map(|s| s.parse().map_err(|_| CliError::Input(format!("bad seed `{s}`"))))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(CliError::Input("no seeds given".into()));
    }
    // One settings stack per problem so each gets its own defaults.
    let per_problem: Vec<Settings> = (1..=4)
        .map(|n| Settings::load(global, search, Some(n), &mut session))
        .collect::<Result<_, _>>()?;
    session.set_config(serde_json::json!({
        "settings": per_problem.iter().map(Settings::snapshot).collect::<Vec<_>>(),
        "seeds": seeds,
        "baselines_only": baselines_only,
    }));
    let train_fraction = per_problem[0].train_fraction;
    let data = cohort(global, &mut session)?;
    let stats_text = write_stats(&data, &mut session)?;
    let mut checks = cohort_checks(&data);

    let mut runs = Vec::new();
    for &seed in &seeds {
        let (train, test) = split_cohort(&data, train_fraction, seed);
        let mut run = SeedRun {
            seed,
            baselines: Vec::new(),
            searches: Vec::new(),
        };
        for n in 1..=4 {
            let fit = symreg_core::study::fit_baseline(n, &train, &test)?;
            run.baselines.push(baseline_score(n, &fit));
        }
        if !baselines_only {
            for (n, settings) in (1..=4).zip(&per_problem) {
                let gp = GpConfig {
                    seed,
                    ..settings.gp.clone()
                };
                let (_, s) = run_search(n, &gp, &settings.ops, &train, &test, &mut |_| {})?;
                eprintln!(
                    "seed {seed}: {} test R2 {:.4}  {}",
                    s.name,
                    s.test_r2,
                    print(&s.expression)
                );
                run.searches.push(s);
            }
        }
        runs.push(run);
    }
    checks.extend(summary_checks(&runs));

    let (table, csv) = summary_table(&runs);
    session.write("summary.txt", &table)?;
    session.write("summary.csv", &csv)?;
    session.write("runs.csv", &runs_csv(&runs))?;
    let lines = check_lines(&checks);
    session.write("checks.txt", &lines)?;
    print!("{stats_text}\n{table}\n{lines}");
    session.finish()?;

    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} acceptance check(s) failed; see checks.txt"
        )));
    }
    Ok(())
}
