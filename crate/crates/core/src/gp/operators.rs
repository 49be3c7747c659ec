//! Random tree generation and the genetic operators.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{GpConfig, GpError};
use crate::complexity::complexity;
use crate::expr::{BinaryOp, ColumnKind, Expr, OperatorSet, Schema, UnaryOp};
use crate::symbolic::affine_peel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Terminals may appear at any depth.
    Grow,
    /// Terminals only at the depth limit.
    Full,
}

const ATTEMPTS: usize = 8;

/// Whether `expr` respects both the complexity budget and the size cap. The
/// size cap counts nodes below the root affine wrapper, which is free.
pub fn within_budget(expr: &Expr, config: &GpConfig) -> bool {
    affine_peel(expr).2.node_count() <= config.max_nodes && complexity(expr) <= config.max_complexity
}

fn random_constant<R: Rng + ?Sized>(rng: &mut R, range: (f64, f64)) -> f64 {
    rng.random_range(range.0..range.1)
}

/// A feature, a categorical lookup with random table values, or a constant.
pub fn random_terminal<R: Rng + ?Sized>(rng: &mut R, schema: &Schema, range: (f64, f64)) -> Expr {
    let n = schema.len();
    let pick = rng.random_range(0..=n);
    if pick == n {
        return Expr::Constant(random_constant(rng, range));
    }
    let spec = &schema.columns()[pick];
    match &spec.kind {
        ColumnKind::Numeric => Expr::Feature(spec.name.clone()),
        ColumnKind::Categorical(cats) => Expr::CategoryMap {
            name: spec.name.clone(),
            table: cats.iter().map(|c| (c.clone(), random_constant(rng, range))).collect(),
        },
    }
}

fn random_operator<R: Rng + ?Sized>(rng: &mut R, ops: &OperatorSet) -> Result<Result<UnaryOp, BinaryOp>, GpError> {
    let (nu, nb) = (ops.unary.len(), ops.binary.len());
    if nu + nb == 0 {
        return Err(GpError::EmptyOperatorSet);
    }
    let i = rng.random_range(0..nu + nb);
    Ok(if i < nu {
        Ok(ops.unary[i])
    } else {
        Err(ops.binary[i - nu])
    })
}

/// Random tree of depth at most `max_depth` (a lone terminal has depth 1).
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    schema: &Schema,
    ops: &OperatorSet,
    max_depth: usize,
    method: Method,
    constant_range: (f64, f64),
) -> Result<Expr, GpError> {
    if max_depth <= 1 {
        return Ok(random_terminal(rng, schema, constant_range));
    }
    if method == Method::Grow {
        let terminals = schema.len() + 1;
        let p_leaf = terminals as f64 / (terminals + ops.len()) as f64;
        if rng.random_bool(p_leaf) {
            return Ok(random_terminal(rng, schema, constant_range));
        }
    }
    Ok(match random_operator(rng, ops)? {
        Ok(u) => Expr::unary(u, random_tree(rng, schema, ops, max_depth - 1, method, constant_range)?),
        Err(b) => {
            let l = random_tree(rng, schema, ops, max_depth - 1, method, constant_range)?;
            let r = random_tree(rng, schema, ops, max_depth - 1, method, constant_range)?;
            Expr::binary(b, l, r)
        }
    })
}

fn random_path<R: Rng + ?Sized>(rng: &mut R, expr: &Expr) -> Vec<usize> {
    let mut paths = expr.paths();
    let i = rng.random_range(0..paths.len());
    paths.swap_remove(i)
}

/// Replaces one uniformly chosen node by an arity-compatible one.
pub fn point_mutate<R: Rng + ?Sized>(
    rng: &mut R,
    expr: &Expr,
    schema: &Schema,
    ops: &OperatorSet,
    constant_range: (f64, f64),
) -> Expr {
    let path = random_path(rng, expr);
    let node = expr.at_path(&path).expect("path from paths()");
    let replacement = match node {
        Expr::Unary(_, c) if !ops.unary.is_empty() => {
            Expr::Unary(ops.unary[rng.random_range(0..ops.unary.len())], c.clone())
        }
        Expr::Binary(_, l, r) if !ops.binary.is_empty() => {
            Expr::Binary(ops.binary[rng.random_range(0..ops.binary.len())], l.clone(), r.clone())
        }
        n if n.is_terminal() => random_terminal(rng, schema, constant_range),
        n => n.clone(),
    };
    expr.replace_at(&path, replacement).expect("path from paths()")
}

fn terminals(expr: &Expr) -> Vec<&Expr> {
    let mut out = Vec::new();
    expr.visit(&mut |e| {
        if e.is_terminal() {
            out.push(e);
        }
    });
    out
}

/// Replaces a uniformly chosen subtree by a freshly grown tree or by one of
/// its own terminals (50/50). Over-budget results are retried, then the
/// chosen subtree is hoisted to one of its terminals, and failing that the
/// whole tree is replaced by one of its terminals.
pub fn subtree_mutate<R: Rng + ?Sized>(
    rng: &mut R,
    expr: &Expr,
    schema: &Schema,
    ops: &OperatorSet,
    config: &GpConfig,
) -> Expr {
    let hoist = |rng: &mut R, path: &[usize]| -> Expr {
        let sub = expr.at_path(path).expect("valid path");
        let leaves = terminals(sub);
        let leaf = leaves[rng.random_range(0..leaves.len())].clone();
        expr.replace_at(path, leaf).expect("valid path")
    };
    for _ in 0..ATTEMPTS {
        let path = random_path(rng, expr);
        let child = if rng.random_bool(0.5) {
            let depth = rng.random_range(1..=config.init_max_depth);
            match random_tree(rng, schema, ops, depth, Method::Grow, config.constant_range) {
                Ok(t) => expr.replace_at(&path, t).expect("valid path"),
                Err(_) => hoist(rng, &path),
            }
        } else {
            hoist(rng, &path)
        };
        if within_budget(&child, config) {
            return child;
        }
    }
    let path = random_path(rng, expr);
    let child = hoist(rng, &path);
    if within_budget(&child, config) {
        return child;
    }
    let leaves = terminals(expr);
    leaves[rng.random_range(0..leaves.len())].clone()
}

/// Replaces a uniformly chosen recipient subtree by a uniformly chosen
/// donor subtree; falls back to a copy of the recipient.
pub fn crossover<R: Rng + ?Sized>(rng: &mut R, recipient: &Expr, donor: &Expr, config: &GpConfig) -> Expr {
    for _ in 0..ATTEMPTS {
        let at = random_path(rng, recipient);
        let from = random_path(rng, donor);
        let graft = donor.at_path(&from).expect("valid path").clone();
        let child = recipient.replace_at(&at, graft).expect("valid path");
        if within_budget(&child, config) {
            return child;
        }
    }
    recipient.clone()
}

/// Adds Gaussian noise with standard deviation `sigma * max(|c|, 1)` to
/// every constant and every categorical table value.
pub fn constant_jitter<R: Rng + ?Sized>(rng: &mut R, expr: &Expr, sigma: f64) -> Expr {
    fn perturb<R: Rng + ?Sized>(rng: &mut R, c: f64, sigma: f64) -> f64 {
        let sd = sigma * c.abs().max(1.0);
        if sd <= 0.0 || !sd.is_finite() {
            return c;
        }
        let v = c + Normal::new(0.0, sd).expect("positive sd").sample(rng);
        if v.is_finite() {
            v
        } else {
            c
        }
    }
    match expr {
        Expr::Constant(c) => Expr::Constant(perturb(rng, *c, sigma)),
        Expr::Feature(_) => expr.clone(),
        Expr::CategoryMap { name, table } => Expr::CategoryMap {
            name: name.clone(),
            table: table
                .iter()
                .map(|(k, v)| (k.clone(), perturb(rng, *v, sigma)))
                .collect(),
        },
        Expr::Unary(op, c) => Expr::unary(*op, constant_jitter(rng, c, sigma)),
        Expr::Binary(op, l, r) => {
            let l = constant_jitter(rng, l, sigma);
            let r = constant_jitter(rng, r, sigma);
            Expr::binary(*op, l, r)
        }
    }
}
