mod analysis;
mod study;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use symreg_core::casestudy::reference;
use symreg_core::data::nhanes::{build_cohort, default_filter, NhanesFiles};
use symreg_core::data::{load_csv, Dataset, LoadOptions};
use symreg_core::gp::{GenerationStats, GpConfig};
use symreg_core::model::load_model;
use symreg_core::study::search_config;
use symreg_core::symbolic::Binding;
use symreg_core::{parse, Expr, OperatorSet};

use crate::args::{Cli, Command, Global, SearchArgs};
use crate::error::CliError;
use crate::manifest::Session;

pub fn run(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    let Cli { global, command } = cli;
    let mut session = Session::new(command.name(), argv, global.seed, global.out_dir.clone());
    match command {
        Command::Stats => study::stats(&global, &mut session)?,
        Command::FitBaseline { n } => study::fit_baseline(&global, &mut session, n as usize)?,
        Command::Evolve {
            problem,
            csv,
            features,
            categorical,
            target,
            search,
        } => {
            let custom = study::Custom {
                csv,
                features,
                categorical,
                target,
            };
            study::evolve(&global, &mut session, &problem, &custom, &search)?
        }
        Command::Reproduce {
            seeds,
            baselines_only,
            search,
        } => return study::reproduce(&global, session, &seeds, baselines_only, &search),
        other => analysis::run(other, &mut session)?,
    }
    session.finish()
}

/// Model file, reference name, or inline formula.
pub(crate) fn resolve_model(arg: &str, session: &mut Session) -> Result<Expr, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        session.input(path)?;
        let doc = load_model(path)?;
        return Ok(doc.validate()?);
    }
    let lower = arg.to_ascii_lowercase();
    let alias = match lower.as_str() {
        "b1" | "b2" | "b3" | "b4" => Some(format!("Baseline {}", &lower[1..])),
        "sr1" | "sr2" | "sr3" | "sr4" => Some(format!("SR Model {}", &lower[2..])),
        _ => None,
    };
    if let Some(m) = reference(alias.as_deref().unwrap_or(arg)) {
        return parse(m.formula).map_err(|e| CliError::Input(format!("reference {}: {e}", m.name)));
    }
    parse(arg).map_err(|e| {
        let caret = " ".repeat(arg[..e.offset.min(arg.len())].chars().count());
        CliError::Input(format!("cannot parse formula: {e}\n  {arg}\n  {caret}^"))
    })
}

pub(crate) fn binding(text: Option<&str>) -> Result<Binding, CliError> {
    match text {
        Some(t) => Binding::parse(t).map_err(CliError::Input),
        None => Ok(Binding::new()),
    }
}

/// `1.1.0` -> [1, 1, 0]; `.` or empty is the root.
pub(crate) fn parse_path(text: &str) -> Result<Vec<usize>, CliError> {
    let t = text.trim();
    if t.is_empty() || t == "." {
        return Ok(Vec::new());
    }
    t.split('.')
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad path `{text}`")))
        })
        .collect()
}

pub(crate) fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        ".".to_string()
    } else {
        path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}

pub(crate) fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Loads a CSV, typing as categorical every column the model reads as one.
pub(crate) fn load_for(
    path: &Path,
    expr: Option<&Expr>,
    extra: &[String],
    session: &mut Session,
) -> Result<Dataset, CliError> {
    session.input(path)?;
    let mut opts = LoadOptions::default();
    if let Some(e) = expr {
        e.visit(&mut |n| {
            if let Expr::CategoryMap { name, .. } = n {
                opts.categorical.insert(name.clone());
            }
        });
    }
    opts.categorical.extend(extra.iter().cloned());
    Ok(load_csv(path, &opts)?)
}

pub(crate) fn cohort(global: &Global, session: &mut Session) -> Result<Dataset, CliError> {
    let dir = global
        .data_dir
        .as_ref()
        .ok_or_else(|| CliError::Input("no data directory: pass --data-dir or set NHANES_DATA_DIR".into()))?;
    let files = NhanesFiles::in_dir(dir);
    for p in files.paths() {
        if !p.is_file() {
            return Err(CliError::Input(format!("missing input file {}", p.display())));
        }
        session.input(p)?;
    }
    let (data, report) = build_cohort(&files, &default_filter())?;
    eprintln!(
        "cohort: {} rows read, {} under age, {} pregnant, {} incomplete, {} kept",
        report.input_rows, report.removed_age, report.removed_pregnant, report.removed_missing, report.kept
    );
    if data.n_rows() == 0 {
        return Err(CliError::EmptyCohort("no rows survive the inclusion criteria".into()));
    }
    Ok(data)
}

/// Effective settings, layered: defaults, problem defaults, config file,
/// `--set`, then the dedicated flags.
pub(crate) struct Settings {
    pub gp: GpConfig,
    pub ops: OperatorSet,
    pub train_fraction: f64,
}

impl Settings {
    pub fn load(
        global: &Global,
        search: &SearchArgs,
        problem: Option<usize>,
        session: &mut Session,
    ) -> Result<Self, CliError> {
        let bad = |e: symreg_core::gp::GpError| CliError::Input(e.to_string());
        let mut gp = match problem {
            Some(n) => search_config(n, &GpConfig::default()),
            None => GpConfig::default(),
        };
        let mut train_fraction = 0.8;
        let mut ops = OperatorSet::default();
        let mut apply = |gp: &mut GpConfig, k: &str, v: &str| -> Result<(), CliError> {
            match k.trim() {
                "train_fraction" => {
                    train_fraction = v
                        .trim()
                        .parse()
                        .map_err(|_| CliError::Input(format!("bad train_fraction `{v}`")))?
                }
                "operators" => ops = OperatorSet::parse_list(v.trim()).map_err(|e| CliError::Input(e.to_string()))?,
                _ => gp.set(k, v.trim()).map_err(bad)?,
            }
            Ok(())
        };
        if let Some(path) = &global.config {
            session.input(path)?;
            let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Input(format!("{} line {}: expected key = value", path.display(), i + 1))
                })?;
                apply(&mut gp, k, v)?;
            }
        }
        for kv in &search.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            apply(&mut gp, k, v)?;
        }
        if let Some(v) = &search.operators {
            apply(&mut gp, "operators", v)?;
        }
        if let Some(v) = search.population_size {
            gp.population_size = v;
        }
        if let Some(v) = search.generations {
            gp.generations = v;
        }
        if let Some(v) = search.max_complexity {
            gp.max_complexity = v;
        }
        if let Some(v) = &search.mode {
            gp.mode = v.parse().map_err(|e: String| CliError::Input(e))?;
        }
        if let Some(v) = search.parsimony {
            gp.parsimony_coefficient = Some(v);
        }
        if let Some(v) = global.train_fraction {
            train_fraction = v;
        }
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(CliError::Input(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        gp.seed = global.seed;
        gp.validate().map_err(bad)?;
        Ok(Self {
            gp,
            ops,
            train_fraction,
        })
    }

    pub fn snapshot(&self) -> serde_json::Value {
        let search: BTreeMap<String, String> = self
            .gp
            .to_kv()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        serde_json::json!({
            "search": search,
            "operators": self.ops.to_list(),
            "train_fraction": self.train_fraction,
        })
    }
}

pub(crate) fn progress(quiet: bool) -> impl FnMut(&GenerationStats) {
    move |s: &GenerationStats| {
        if !quiet && s.generation.is_multiple_of(10) {
            eprintln!(
                "gen {:>4}  best mse {:<12.6} complexity {:>2}  mean complexity {:>5.2}  front {}",
                s.generation, s.best_mse, s.best_complexity, s.mean_complexity, s.front_size
            );
        }
    }
}
