//! Symbolic calculus on expression trees: derivatives, simplification,
//! polynomial expansion, substitution of reference values, subtree
//! extraction and one-dimensional sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::{eval_constant, eval_point, BinaryOp, Expr, ExprError, Schema, UnaryOp};
use crate::parser::{format_number, print};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("cannot differentiate with respect to categorical column `{0}`")]
    NonNumericVariable(String),
    #[error("category `{category}` is not in the table for `{column}`")]
    UnknownCategory { column: String, category: String },
    #[error("no subexpression at path {0:?}")]
    InvalidPath(Vec<usize>),
    #[error("binding for `{0}` is not finite")]
    NonFiniteBinding(String),
    #[error("subexpression at {0:?} does not enter its sum linearly")]
    NotAdditive(Vec<usize>),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("variable `{0}` is unbound")]
    Unbound(String),
}

impl From<ExprError> for SymbolicError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::InvalidPath(p) => SymbolicError::InvalidPath(p),
            other => SymbolicError::InvalidSweep(other.to_string()),
        }
    }
}

/// Reference values for numeric columns and selected categories for
/// categorical columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Binding {
    values: BTreeMap<String, f64>,
    categories: BTreeMap<String, String>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(mut self, name: impl Into<String>, v: f64) -> Self {
        self.values.insert(name.into(), v);
        self
    }

    pub fn category(mut self, name: impl Into<String>, category: impl Into<String>) -> Self {
        self.categories.insert(name.into(), category.into());
        self
    }

    pub fn set_value(&mut self, name: impl Into<String>, v: f64) {
        self.values.insert(name.into(), v);
    }

    pub fn remove(&mut self, name: &str) {
        self.values.remove(name);
        self.categories.remove(name);
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    pub fn categories(&self) -> &BTreeMap<String, String> {
        &self.categories
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.categories.is_empty()
    }

    /// Parses `NAME=value,NAME=category,...`; values that do not parse as
    /// numbers are category selections.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut b = Binding::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected NAME=VALUE, got `{item}`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(format!("empty name in `{item}`"));
            }
            match v.parse::<f64>() {
                Ok(x) => b.set_value(k, x),
                Err(_) => {
                    b.categories.insert(k.to_string(), v.to_string());
                }
            }
        }
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<(), String> {
        match self.values.iter().find(|(_, v)| !v.is_finite()) {
            Some((k, _)) => Err(format!("binding for `{k}` is not finite")),
            None => Ok(()),
        }
    }

    /// Checks categorical selections against the declared categories.
    pub fn check(&self, schema: &Schema) -> Result<(), SymbolicError> {
        if let Some((k, _)) = self.values.iter().find(|(_, v)| !v.is_finite()) {
            return Err(SymbolicError::NonFiniteBinding(k.clone()));
        }
        for (col, cat) in &self.categories {
            if let Some(cats) = schema.get(col).and_then(|s| s.categories()) {
                if !cats.contains(cat) {
                    return Err(SymbolicError::UnknownCategory {
                        column: col.clone(),
                        category: cat.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Differentiation

/// Exact symbolic derivative of `expr` with respect to the numeric
/// variable `wrt`, simplified.
pub fn differentiate(expr: &Expr, wrt: &str) -> Result<Expr, SymbolicError> {
    let mut categorical = false;
    expr.visit(&mut |e| {
        if matches!(e, Expr::CategoryMap { name, .. } if name == wrt) {
            categorical = true;
        }
    });
    if categorical {
        return Err(SymbolicError::NonNumericVariable(wrt.to_string()));
    }
    Ok(simplify(&derive(expr, wrt)))
}

/// Like [`differentiate`] but also rejects a `wrt` the schema declares
/// categorical.
pub fn differentiate_in(expr: &Expr, wrt: &str, schema: &Schema) -> Result<Expr, SymbolicError> {
    if schema.get(wrt).is_some_and(|s| !s.is_numeric()) {
        return Err(SymbolicError::NonNumericVariable(wrt.to_string()));
    }
    differentiate(expr, wrt)
}

fn zero() -> Expr {
    Expr::Constant(0.0)
}

fn derive(e: &Expr, x: &str) -> Expr {
    if !e.contains_variable(x) {
        return zero();
    }
    match e {
        Expr::Constant(_) | Expr::CategoryMap { .. } => zero(),
        Expr::Feature(n) => Expr::Constant(if n == x { 1.0 } else { 0.0 }),
        Expr::Unary(op, c) => {
            let dc = derive(c, x);
            let c = (**c).clone();
            match op {
                UnaryOp::Neg => Expr::neg(dc),
                UnaryOp::Sqrt => Expr::div(dc, Expr::mul(Expr::constant(2.0), Expr::unary(UnaryOp::Sqrt, c))),
                UnaryOp::Exp => Expr::mul(dc, Expr::unary(UnaryOp::Exp, c)),
                UnaryOp::Log => Expr::div(dc, c),
                UnaryOp::Square => Expr::mul(Expr::mul(Expr::constant(2.0), c), dc),
                UnaryOp::Inv => Expr::neg(Expr::div(dc, Expr::unary(UnaryOp::Square, c))),
            }
        }
        Expr::Binary(op, l, r) => {
            let (dl, dr) = (derive(l, x), derive(r, x));
            let (l, r) = ((**l).clone(), (**r).clone());
            match op {
                BinaryOp::Add => Expr::add(dl, dr),
                BinaryOp::Sub => Expr::sub(dl, dr),
                BinaryOp::Mul => Expr::add(Expr::mul(dl, r), Expr::mul(l, dr)),
                BinaryOp::Div => Expr::div(
                    Expr::sub(Expr::mul(dl, r.clone()), Expr::mul(l, dr)),
                    Expr::unary(UnaryOp::Square, r),
                ),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Simplification

/// Value-preserving cleanup: constant folding, neutral and absorbing
/// elements, double negation and collection of nested affine wrappers.
/// Never increases the node count.
pub fn simplify(expr: &Expr) -> Expr {
    let e = match expr {
        Expr::Unary(op, c) => simplify_unary(*op, simplify(c)),
        Expr::Binary(op, l, r) => simplify_binary(*op, simplify(l), simplify(r)),
        t => return t.clone(),
    };
    collect_affine(e)
}

fn fold(e: Expr) -> Expr {
    if e.is_terminal() || !e.is_constant_expr() {
        return e;
    }
    match eval_constant(&e) {
        Some(v) if v.is_finite() => Expr::Constant(v),
        _ => e,
    }
}

fn simplify_unary(op: UnaryOp, c: Expr) -> Expr {
    if op == UnaryOp::Neg {
        if let Expr::Unary(UnaryOp::Neg, inner) = c {
            return *inner;
        }
    }
    fold(Expr::unary(op, c))
}

fn is_value(e: &Expr, v: f64) -> bool {
    e.as_constant() == Some(v)
}

fn simplify_binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
    use BinaryOp::*;
    match op {
        Add if is_value(&r, 0.0) => l,
        Add if is_value(&l, 0.0) => r,
        Add => match (l, r) {
            (l, Expr::Unary(UnaryOp::Neg, r)) => Expr::sub(l, *r),
            (Expr::Unary(UnaryOp::Neg, l), r) => Expr::sub(r, *l),
            // Constant offsets go last.
            (Expr::Constant(c), r) if !r.is_constant_expr() => Expr::add(r, Expr::Constant(c)),
            (l, r) => fold(Expr::add(l, r)),
        },
        Sub if is_value(&r, 0.0) => l,
        Sub if is_value(&l, 0.0) => simplify_unary(UnaryOp::Neg, r),
        Sub => match r {
            Expr::Unary(UnaryOp::Neg, r) => Expr::add(l, *r),
            r => fold(Expr::sub(l, r)),
        },
        Mul if is_value(&l, 0.0) || is_value(&r, 0.0) => zero(),
        Mul if is_value(&l, 1.0) => r,
        Mul if is_value(&r, 1.0) => l,
        Mul if is_value(&l, -1.0) => simplify_unary(UnaryOp::Neg, r),
        Mul if is_value(&r, -1.0) => simplify_unary(UnaryOp::Neg, l),
        Div if is_value(&r, 1.0) => l,
        Div if is_value(&l, 0.0) => zero(),
        _ => fold(Expr::binary(op, l, r)),
    }
}

/// Writes `e` as `a * core + b`, peeling constant scales and offsets.
pub fn affine_peel(mut e: &Expr) -> (f64, f64, &Expr) {
    let (mut a, mut b) = (1.0, 0.0);
    loop {
        match e {
            Expr::Binary(BinaryOp::Add, l, r) => match (l.as_constant(), r.as_constant()) {
                (_, Some(c)) => {
                    b += a * c;
                    e = l;
                }
                (Some(c), _) => {
                    b += a * c;
                    e = r;
                }
                _ => break,
            },
            Expr::Binary(BinaryOp::Sub, l, r) => match (l.as_constant(), r.as_constant()) {
                (_, Some(c)) => {
                    b -= a * c;
                    e = l;
                }
                (Some(c), _) => {
                    b += a * c;
                    a = -a;
                    e = r;
                }
                _ => break,
            },
            Expr::Binary(BinaryOp::Mul, l, r) => match (l.as_constant(), r.as_constant()) {
                (_, Some(c)) => {
                    a *= c;
                    e = l;
                }
                (Some(c), _) => {
                    a *= c;
                    e = r;
                }
                _ => break,
            },
            Expr::Binary(BinaryOp::Div, l, r) if r.as_constant().is_some() && l.as_constant().is_none() => {
                a /= r.as_constant().unwrap();
                e = l;
            }
            Expr::Unary(UnaryOp::Neg, c) if c.as_constant().is_none() => {
                a = -a;
                e = c;
            }
            _ => break,
        }
    }
    (a, b, e)
}

/// `a * core + b` with the fewest nodes.
pub fn affine_rebuild(a: f64, b: f64, core: Expr) -> Expr {
    if a == 0.0 {
        return Expr::Constant(b);
    }
    if a == -1.0 && b != 0.0 {
        return Expr::sub(Expr::Constant(b), core);
    }
    let term = if a == 1.0 {
        core
    } else if a == -1.0 {
        Expr::neg(core)
    } else {
        Expr::mul(Expr::Constant(a), core)
    };
    if b == 0.0 {
        term
    } else if b > 0.0 {
        Expr::add(term, Expr::Constant(b))
    } else {
        Expr::sub(term, Expr::Constant(-b))
    }
}

fn collect_affine(e: Expr) -> Expr {
    if e.is_terminal() {
        return e;
    }
    let (a, b, core) = affine_peel(&e);
    if core.is_constant_expr() || !a.is_finite() || !b.is_finite() || std::ptr::eq(core, &e) {
        return e;
    }
    let rebuilt = affine_rebuild(a, b, core.clone());
    if rebuilt.node_count() < e.node_count() {
        rebuilt
    } else {
        e
    }
}

// ---------------------------------------------------------------------------
// Expansion

/// One term of an expanded expression: `coefficient * Π atom^power`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    /// Atoms with their powers, in canonical order.
    pub factors: Vec<(Expr, u32)>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, p)| p).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    /// Power of the feature `name` in this term.
    pub fn power_of(&self, name: &str) -> u32 {
        self.factors
            .iter()
            .filter(|(a, _)| matches!(a, Expr::Feature(n) if n == name))
            .map(|(_, p)| *p)
            .sum()
    }

    /// Whether the factors are exactly the named features with the given powers.
    pub fn has_factors(&self, wanted: &[(&str, u32)]) -> bool {
        self.factors.len() == wanted.len()
            && wanted.iter().all(|(n, p)| {
                self.factors
                    .iter()
                    .any(|(a, q)| matches!(a, Expr::Feature(m) if m == n) && q == p)
            })
    }
}

/// Monomial key: atom print keys with powers, sorted by key.
type Mono = Vec<(String, u32)>;

#[derive(Clone, Debug, Default)]
struct Poly {
    terms: BTreeMap<Mono, f64>,
    atoms: BTreeMap<String, Expr>,
}

impl Poly {
    fn constant(c: f64) -> Self {
        let mut p = Poly::default();
        if c != 0.0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    fn atom(e: Expr) -> Self {
        let key = print(&e);
        let mut p = Poly::default();
        p.terms.insert(vec![(key.clone(), 1)], 1.0);
        p.atoms.insert(key, e);
        p
    }

    fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Mono, c: f64) {
        let v = self.terms.get(&m).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    fn add(mut self, other: Poly, sign: f64) -> Poly {
        self.atoms.extend(other.atoms);
        for (m, c) in other.terms {
            self.add_term(m, sign * c);
        }
        self
    }

    fn scale(mut self, k: f64) -> Poly {
        if k == 0.0 {
            return Poly::constant(0.0);
        }
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self
    }

    fn mul(self, other: Poly) -> Poly {
        let mut out = Poly::default();
        out.atoms = self.atoms;
        out.atoms.extend(other.atoms);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    fn into_terms(self) -> Vec<Term> {
        let mut terms: Vec<(Mono, f64)> = self.terms.into_iter().collect();
        terms.sort_by(|(a, _), (b, _)| term_order(a, b));
        terms
            .into_iter()
            .map(|(m, c)| Term {
                coefficient: c,
                factors: m.into_iter().map(|(k, p)| (self.atoms[&k].clone(), p)).collect(),
            })
            .collect()
    }
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (k, p) in b {
        *out.entry(k.clone()).or_insert(0) += p;
    }
    out.into_iter().collect()
}

fn multiset(m: &Mono) -> Vec<&str> {
    m.iter()
        .flat_map(|(k, p)| std::iter::repeat_n(k.as_str(), *p as usize))
        .collect()
}

/// Lexicographic on the sorted variable multiset; a multiset that extends
/// another (higher degree) sorts first; the constant term is last.
fn term_order(a: &Mono, b: &Mono) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let (a, b) = (multiset(a), multiset(b));
    for (x, y) in a.iter().zip(&b) {
        match x.cmp(y) {
            Equal => continue,
            o => return o,
        }
    }
    b.len().cmp(&a.len()).then(Equal)
}

fn poly(e: &Expr) -> Poly {
    match e {
        Expr::Constant(c) => Poly::constant(*c),
        Expr::Feature(_) | Expr::CategoryMap { .. } => Poly::atom(e.clone()),
        Expr::Unary(UnaryOp::Neg, c) => poly(c).scale(-1.0),
        Expr::Unary(UnaryOp::Square, c) => {
            let p = poly(c);
            p.clone().mul(p)
        }
        Expr::Unary(op, c) => {
            let p = poly(c);
            match p.as_constant().map(|v| op.apply(v)) {
                Some(v) if v.is_finite() => Poly::constant(v),
                _ => Poly::atom(Expr::unary(*op, to_expr(p))),
            }
        }
        Expr::Binary(BinaryOp::Add, l, r) => poly(l).add(poly(r), 1.0),
        Expr::Binary(BinaryOp::Sub, l, r) => poly(l).add(poly(r), -1.0),
        Expr::Binary(BinaryOp::Mul, l, r) => poly(l).mul(poly(r)),
        Expr::Binary(BinaryOp::Div, l, r) => {
            let (pl, pr) = (poly(l), poly(r));
            match pr.as_constant() {
                Some(c) if c != 0.0 && (1.0 / c).is_finite() => pl.scale(1.0 / c),
                _ => match (pl.as_constant(), pr.as_constant()) {
                    (Some(a), Some(b)) if (a / b).is_finite() => Poly::constant(a / b),
                    _ => Poly::atom(Expr::div(to_expr(pl), to_expr(pr))),
                },
            }
        }
    }
}

fn atom_power(atom: &Expr, p: u32) -> Expr {
    let mut out: Option<Expr> = None;
    let mut push = |f: Expr| {
        out = Some(match out.take() {
            None => f,
            Some(acc) => Expr::mul(acc, f),
        })
    };
    for _ in 0..p / 2 {
        push(Expr::unary(UnaryOp::Square, atom.clone()));
    }
    if p % 2 == 1 {
        push(atom.clone());
    }
    out.expect("positive power")
}

fn terms_to_expr(terms: &[Term]) -> Expr {
    let mut acc: Option<Expr> = None;
    for t in terms {
        let product = t.factors.iter().map(|(a, p)| atom_power(a, *p)).reduce(Expr::mul);
        let (neg, mag) = (t.coefficient < 0.0, t.coefficient.abs());
        let body = match product {
            None => Expr::Constant(mag),
            Some(p) if mag == 1.0 => p,
            Some(p) => Expr::mul(Expr::Constant(mag), p),
        };
        acc = Some(match acc {
            None if neg => match body {
                Expr::Constant(c) => Expr::Constant(-c),
                Expr::Binary(BinaryOp::Mul, c, p) if c.as_constant().is_some() => {
                    Expr::mul(Expr::Constant(-c.as_constant().unwrap()), *p)
                }
                b => Expr::neg(b),
            },
            None => body,
            Some(a) if neg => Expr::sub(a, body),
            Some(a) => Expr::add(a, body),
        });
    }
    acc.unwrap_or(Expr::Constant(0.0))
}

fn to_expr(p: Poly) -> Expr {
    terms_to_expr(&p.into_terms())
}

/// Expanded terms of `expr` in canonical order. Sums, differences,
/// products, squares and divisions by constants distribute; other
/// divisions and transcendental functions are atoms with expanded
/// arguments.
pub fn expand_terms(expr: &Expr) -> Vec<Term> {
    poly(expr).into_terms()
}

/// Sum-of-products form of `expr` with like terms combined.
pub fn expand(expr: &Expr) -> Expr {
    terms_to_expr(&expand_terms(expr))
}

/// Coefficients `(slope, intercept)` when `expr` is affine in `wrt` and has
/// no other variables.
pub fn affine_coefficients(expr: &Expr, wrt: &str) -> Option<(f64, f64)> {
    let (mut slope, mut intercept) = (0.0, 0.0);
    for t in expand_terms(expr) {
        if t.is_constant() {
            intercept += t.coefficient;
        } else if t.has_factors(&[(wrt, 1)]) {
            slope += t.coefficient;
        } else {
            return None;
        }
    }
    Some((slope, intercept))
}

// ---------------------------------------------------------------------------
// Substitution, extraction, sweeps

/// Replaces bound features by constants and bound category lookups by
/// their table value, then simplifies.
pub fn substitute(expr: &Expr, binding: &Binding) -> Result<Expr, SymbolicError> {
    fn go(e: &Expr, b: &Binding) -> Result<Expr, SymbolicError> {
        Ok(match e {
            Expr::Feature(n) => match b.values.get(n) {
                Some(v) if !v.is_finite() => return Err(SymbolicError::NonFiniteBinding(n.clone())),
                Some(v) => Expr::Constant(*v),
                None => e.clone(),
            },
            Expr::CategoryMap { name, table } => match b.categories.get(name) {
                Some(cat) => match table.get(cat) {
                    Some(v) => Expr::Constant(*v),
                    None => {
                        return Err(SymbolicError::UnknownCategory {
                            column: name.clone(),
                            category: cat.clone(),
                        })
                    }
                },
                None => e.clone(),
            },
            Expr::Constant(_) => e.clone(),
            Expr::Unary(op, c) => Expr::unary(*op, go(c, b)?),
            Expr::Binary(op, l, r) => Expr::binary(*op, go(l, b)?, go(r, b)?),
        })
    }
    Ok(simplify(&go(expr, binding)?))
}

/// The subtree at `path` as an independent expression.
pub fn extract_module(expr: &Expr, path: &[usize]) -> Result<Expr, SymbolicError> {
    expr.at_path(path)
        .cloned()
        .ok_or_else(|| SymbolicError::InvalidPath(path.to_vec()))
}

/// A sum split into a chosen summand `f` and the remainder `g`, so that
/// `sum = g + coefficient * f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub sum_path: Vec<usize>,
    pub f: Expr,
    pub g: Expr,
    pub coefficient: f64,
}

/// Splits the sum at `sum_path` into `f` (the subtree at `f_path`, which
/// must lie inside the sum) and the remaining summands `g`.
pub fn split_module(expr: &Expr, sum_path: &[usize], f_path: &[usize]) -> Result<Decomposition, SymbolicError> {
    let sum = extract_module(expr, sum_path)?;
    let rel = f_path
        .strip_prefix(sum_path)
        .ok_or_else(|| SymbolicError::InvalidPath(f_path.to_vec()))?;
    let f = extract_module(&sum, rel)?;
    let mut coefficient = 1.0;
    let mut node = &sum;
    for (depth, &i) in rel.iter().enumerate() {
        let linear = match node {
            Expr::Binary(BinaryOp::Add, ..) => true,
            Expr::Binary(BinaryOp::Sub, ..) => {
                if i == 1 {
                    coefficient = -coefficient;
                }
                true
            }
            Expr::Unary(UnaryOp::Neg, _) => {
                coefficient = -coefficient;
                true
            }
            Expr::Binary(BinaryOp::Mul, l, r) => match (i, l.as_constant(), r.as_constant()) {
                (1, Some(c), _) | (0, _, Some(c)) => {
                    coefficient *= c;
                    true
                }
                _ => false,
            },
            Expr::Binary(BinaryOp::Div, _, r) if i == 0 => match r.as_constant() {
                Some(c) => {
                    coefficient /= c;
                    true
                }
                None => false,
            },
            _ => false,
        };
        if !linear {
            let mut p = f_path[..sum_path.len() + depth].to_vec();
            p.push(i);
            return Err(SymbolicError::NotAdditive(p));
        }
        node = node.children()[i];
    }
    let g = simplify(&sum.replace_at(rel, Expr::Constant(0.0))?);
    Ok(Decomposition {
        sum_path: sum_path.to_vec(),
        f,
        g,
        coefficient,
    })
}

impl Decomposition {
    /// `g + coefficient * f` as an expression.
    pub fn recombined_sum(&self) -> Expr {
        let f = if self.coefficient == 1.0 {
            self.f.clone()
        } else {
            Expr::mul(Expr::Constant(self.coefficient), self.f.clone())
        };
        Expr::add(f, self.g.clone())
    }

    /// `expr` with its sum rewritten as `f + g`.
    pub fn recombine(&self, expr: &Expr) -> Result<Expr, SymbolicError> {
        Ok(expr.replace_at(&self.sum_path, self.recombined_sum())?)
    }
}

/// Substitutes `binding` (minus `wrt`) and evaluates over an even grid of
/// `steps` points on `[lo, hi]`.
pub fn sweep(
    expr: &Expr,
    binding: &Binding,
    wrt: &str,
    range: (f64, f64),
    steps: usize,
) -> Result<Vec<(f64, f64)>, SymbolicError> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SymbolicError::InvalidSweep(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if steps < 2 {
        return Err(SymbolicError::InvalidSweep(format!(
            "need at least 2 steps, got {steps}"
        )));
    }
    let mut b = binding.clone();
    b.remove(wrt);
    let reduced = substitute(expr, &b)?;
    if let Some(v) = reduced.variables().into_iter().find(|v| v != wrt) {
        return Err(SymbolicError::Unbound(v));
    }
    let cats = BTreeMap::new();
    let mut point = BTreeMap::new();
    Ok((0..steps)
        .map(|i| {
            let x = if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            };
            point.insert(wrt.to_string(), x);
            (x, eval_point(&reduced, &point, &cats).unwrap_or(f64::NAN))
        })
        .collect())
}

/// CSV with header `x,value`.
pub fn sweep_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("x,value\n");
    for (x, v) in rows {
        let _ = writeln!(s, "{x},{v}");
    }
    s
}

/// CSV with header `f,g,gender`; `labels` holds one label per row.
pub fn scatter_csv(f: &[f64], g: &[f64], labels: &[String]) -> String {
    let mut s = String::from("f,g,gender\n");
    for ((a, b), l) in f.iter().zip(g).zip(labels) {
        let _ = writeln!(s, "{a},{b},{l}");
    }
    s
}

/// Human-readable listing of expanded terms, one per line.
pub fn format_terms(terms: &[Term]) -> String {
    let mut s = String::new();
    for t in terms {
        let factors: Vec<String> = t
            .factors
            .iter()
            .map(|(a, p)| {
                let a = print(a);
                if *p == 1 {
                    a
                } else {
                    format!("{a}^{p}")
                }
            })
            .collect();
        let _ = writeln!(s, "{}\t{}", format_number(t.coefficient), factors.join("*"));
    }
    s
}
