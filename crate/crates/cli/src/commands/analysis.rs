//! Thin wrappers over the symbolic and evaluation routines.

use std::fmt::Write as _;

use symreg_core::expr::eval_constant;
use symreg_core::metrics::{mse, r2};
use symreg_core::symbolic::{
    affine_coefficients, differentiate, expand, expand_terms, format_terms, scatter_csv, simplify, split_module,
    substitute, sweep, sweep_csv,
};
use symreg_core::{complexity, evaluate, print, to_dot, Column};

use super::{binding, format_path, load_for, parse_path, resolve_model};
use crate::args::Command;
use crate::error::CliError;
use crate::manifest::Session;

fn line(s: String) -> String {
    s + "\n"
}

pub fn run(command: Command, session: &mut Session) -> Result<(), CliError> {
    match command {
        Command::Eval {
            model,
            at,
            csv,
            target,
            output,
        } => {
            let e = resolve_model(&model, session)?;
            match (at, csv) {
                (Some(at), None) => {
                    let reduced = simplify(&substitute(&e, &binding(Some(&at))?)?);
                    let v = eval_constant(&reduced).ok_or_else(|| {
                        let free: Vec<String> = reduced.variables().into_iter().collect();
                        CliError::Input(format!("unbound variables: {}", free.join(", ")))
                    })?;
                    session.emit(output.as_deref(), &line(v.to_string()))
                }
                (None, Some(path)) => {
                    let data = load_for(&path, Some(&e), &[], session)?;
                    let values = evaluate(&e, &data)?.values;
                    let mut out = String::from("prediction\n");
                    for v in &values {
                        let _ = writeln!(out, "{v}");
                    }
                    if let Some(t) = target {
                        let y = data.try_numeric(&t)?;
                        eprintln!("R2 {}  MSE {}", r2(&values, y)?, mse(&values, y)?);
                    }
                    session.emit(output.as_deref(), &out)
                }
                _ => Err(CliError::Input("eval needs exactly one of --at or --csv".into())),
            }
        }
        Command::Diff {
            model,
            wrt,
            at,
            affine,
            output,
        } => {
            let e = resolve_model(&model, session)?;
            let mut d = differentiate(&e, &wrt)?;
            if at.is_some() {
                let mut b = binding(at.as_deref())?;
                b.remove(&wrt);
                d = simplify(&substitute(&d, &b)?);
            }
            let text = if affine {
                let (slope, intercept) = affine_coefficients(&d, &wrt)
                    .ok_or_else(|| CliError::Input(format!("derivative is not affine in {wrt}: {}", print(&d))))?;
                format!("{slope} {intercept}")
            } else {
                print(&d)
            };
            session.emit(output.as_deref(), &line(text))
        }
        Command::Expand { model, terms, output } => {
            let e = resolve_model(&model, session)?;
            let text = if terms {
                format_terms(&expand_terms(&e))
            } else {
                line(print(&expand(&e)))
            };
            session.emit(output.as_deref(), &text)
        }
        Command::Simplify { model, output } => {
            let e = resolve_model(&model, session)?;
            session.emit(output.as_deref(), &line(print(&simplify(&e))))
        }
        Command::Complexity { model } => {
            let e = resolve_model(&model, session)?;
            session.emit(None, &line(complexity(&e).to_string()))
        }
        Command::Sweep {
            model,
            wrt,
            range,
            steps,
            at,
            derivative,
            output,
        } => {
            let e = resolve_model(&model, session)?;
            let (lo, hi) = range
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| CliError::Input(format!("--range expects LO:HI, got `{range}`")))?;
            let target = if derivative { differentiate(&e, &wrt)? } else { e };
            let rows = sweep(&target, &binding(at.as_deref())?, &wrt, (lo, hi), steps)?;
            session.emit(output.as_deref(), &sweep_csv(&rows))
        }
        Command::Modules {
            model,
            depth,
            split,
            f_path,
            csv,
            label,
            output,
        } => {
            let e = resolve_model(&model, session)?;
            let (Some(sum), Some(fp)) = (split, f_path) else {
                let mut out = String::from("path\tcomplexity\texpression\n");
                for p in e.paths().into_iter().filter(|p| p.len() <= depth) {
                    let sub = e.at_path(&p).expect("listed path exists");
                    let _ = writeln!(out, "{}\t{}\t{}", format_path(&p), complexity(sub), print(sub));
                }
                return session.emit(output.as_deref(), &out);
            };
            let dec = split_module(&e, &parse_path(&sum)?, &parse_path(&fp)?)?;
            match csv {
                None => {
                    let text = format!(
                        "f = {}\ng = {}\ncoefficient = {}\n",
                        print(&dec.f),
                        print(&dec.g),
                        dec.coefficient
                    );
                    session.emit(output.as_deref(), &text)
                }
                Some(path) => {
                    let data = load_for(&path, Some(&e), std::slice::from_ref(&label), session)?;
                    let f = evaluate(&dec.f, &data)?.values;
                    let g = evaluate(&dec.g, &data)?.values;
                    let labels: Vec<String> = match data.column(&label) {
                        Some(Column::Categorical(_)) => (0..data.n_rows())
                            .map(|r| data.category(&label, r).unwrap_or("").to_string())
                            .collect(),
                        Some(Column::Numeric(v)) => v.iter().map(f64::to_string).collect(),
                        None => return Err(CliError::Input(format!("{} has no column `{label}`", path.display()))),
                    };
                    session.emit(output.as_deref(), &scatter_csv(&f, &g, &labels))
                }
            }
        }
        Command::Dot { model, output } => {
            let e = resolve_model(&model, session)?;
            session.emit(output.as_deref(), &to_dot(&e))
        }
        Command::Stats | Command::FitBaseline { .. } | Command::Evolve { .. } | Command::Reproduce { .. } => {
            unreachable!("dispatched in commands::run")
        }
    }
}
