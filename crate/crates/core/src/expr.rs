//! Expression trees, schemas and row-wise evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Column, Dataset};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnaryOp {
    Neg,
    Sqrt,
    Exp,
    Log,
    Square,
    Inv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 6] = [
        UnaryOp::Neg,
        UnaryOp::Sqrt,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Square,
        UnaryOp::Inv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Square => "square",
            UnaryOp::Inv => "inv",
        }
    }

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnaryOp::Neg => -x,
            UnaryOp::Sqrt => x.sqrt(),
            UnaryOp::Exp => x.exp(),
            UnaryOp::Log => x.ln(),
            UnaryOp::Square => x * x,
            UnaryOp::Inv => 1.0 / x,
        }
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
            BinaryOp::Div => "div",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
        }
    }
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown operator `{0}`")]
pub struct UnknownOperator(pub String);

impl FromStr for UnaryOp {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        UnaryOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

impl FromStr for BinaryOp {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BinaryOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

/// The operators a search is allowed to emit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSet {
    pub unary: Vec<UnaryOp>,
    pub binary: Vec<BinaryOp>,
}

impl Default for OperatorSet {
    fn default() -> Self {
        Self {
            unary: UnaryOp::ALL.to_vec(),
            binary: BinaryOp::ALL.to_vec(),
        }
    }
}

impl OperatorSet {
    pub fn empty() -> Self {
        Self {
            unary: Vec::new(),
            binary: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty() && self.binary.is_empty()
    }

    pub fn len(&self) -> usize {
        self.unary.len() + self.binary.len()
    }

    pub fn contains_unary(&self, op: UnaryOp) -> bool {
        self.unary.contains(&op)
    }

    pub fn contains_binary(&self, op: BinaryOp) -> bool {
        self.binary.contains(&op)
    }

    /// Parses a comma separated list such as `add,mul,sqrt`.
    pub fn parse_list(list: &str) -> Result<Self, UnknownOperator> {
        let mut set = Self::empty();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Ok(op) = name.parse::<BinaryOp>() {
                if !set.binary.contains(&op) {
                    set.binary.push(op);
                }
            } else {
                let op = name.parse::<UnaryOp>()?;
                if !set.unary.contains(&op) {
                    set.unary.push(op);
                }
            }
        }
        Ok(set)
    }

    pub fn to_list(&self) -> String {
        self.binary
            .iter()
            .map(|op| op.name())
            .chain(self.unary.iter().map(|op| op.name()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
        }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical(categories.into_iter().map(Into::into).collect()),
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, ColumnKind::Numeric)
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            ColumnKind::Categorical(c) => Some(c),
            ColumnKind::Numeric => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("categorical column `{0}` declares no categories")]
    NoCategories(String),
    #[error("empty column name")]
    EmptyName,
}

/// Ordered, uniquely named column declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self, SchemaError> {
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(SchemaError::EmptyName);
            }
            if !seen.insert(c.name.as_str()) {
                return Err(SchemaError::DuplicateColumn(c.name.clone()));
            }
            if let ColumnKind::Categorical(cats) = &c.kind {
                if cats.is_empty() {
                    return Err(SchemaError::NoCategories(c.name.clone()));
                }
            }
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// Keeps only the named columns, in the given order.
    pub fn project(&self, names: &[&str]) -> Option<Schema> {
        let cols = names.iter().map(|n| self.get(n).cloned()).collect::<Option<Vec<_>>>()?;
        Schema::new(cols).ok()
    }
}

/// An immutable expression tree. Constants are always finite.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Constant(f64),
    Feature(String),
    /// Lookup of a categorical column through a category -> value table.
    CategoryMap {
        name: String,
        table: BTreeMap<String, f64>,
    },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("constant {0} is not finite")]
    NonFiniteConstant(f64),
    #[error("empty feature name")]
    EmptyName,
    #[error("category table for `{0}` has a non-finite value")]
    NonFiniteTable(String),
    #[error("invalid path {0:?}")]
    InvalidPath(Vec<usize>),
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        debug_assert!(value.is_finite(), "non-finite constant {value}");
        Expr::Constant(value)
    }

    pub fn feature(name: impl Into<String>) -> Self {
        Expr::Feature(name.into())
    }

    pub fn category_map<S: Into<String>>(name: impl Into<String>, table: impl IntoIterator<Item = (S, f64)>) -> Self {
        Expr::CategoryMap {
            name: name.into(),
            table: table.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn add(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Add, l, r)
    }

    pub fn sub(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Sub, l, r)
    }

    pub fn mul(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Mul, l, r)
    }

    pub fn div(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Div, l, r)
    }

    pub fn neg(e: Expr) -> Self {
        Self::unary(UnaryOp::Neg, e)
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Expr::Constant(_) | Expr::Feature(_) | Expr::CategoryMap { .. })
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// Checks the structural invariants: finite constants and nonempty names.
    pub fn validate(&self) -> Result<(), ExprError> {
        match self {
            Expr::Constant(c) if !c.is_finite() => Err(ExprError::NonFiniteConstant(*c)),
            Expr::Constant(_) => Ok(()),
            Expr::Feature(n) if n.is_empty() => Err(ExprError::EmptyName),
            Expr::Feature(_) => Ok(()),
            Expr::CategoryMap { name, table } => {
                if name.is_empty() {
                    Err(ExprError::EmptyName)
                } else if table.values().any(|v| !v.is_finite()) {
                    Err(ExprError::NonFiniteTable(name.clone()))
                } else {
                    Ok(())
                }
            }
            Expr::Unary(_, c) => c.validate(),
            Expr::Binary(_, l, r) => {
                l.validate()?;
                r.validate()
            }
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Unary(_, c) => vec![c],
            Expr::Binary(_, l, r) => vec![l, r],
            _ => Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Unary(_, c) => 1 + c.node_count(),
            Expr::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
            _ => 1,
        }
    }

    /// Depth in nodes; a lone terminal has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Unary(_, c) => 1 + c.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            _ => 1,
        }
    }

    /// True when no feature or categorical column is referenced.
    pub fn is_constant_expr(&self) -> bool {
        match self {
            Expr::Constant(_) => true,
            Expr::Feature(_) | Expr::CategoryMap { .. } => false,
            Expr::Unary(_, c) => c.is_constant_expr(),
            Expr::Binary(_, l, r) => l.is_constant_expr() && r.is_constant_expr(),
        }
    }

    /// Column names referenced anywhere in the tree.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Feature(n) | Expr::CategoryMap { name: n, .. } => {
                out.insert(n.clone());
            }
            _ => {}
        });
        out
    }

    pub fn contains_variable(&self, name: &str) -> bool {
        match self {
            Expr::Feature(n) | Expr::CategoryMap { name: n, .. } => n == name,
            Expr::Constant(_) => false,
            Expr::Unary(_, c) => c.contains_variable(name),
            Expr::Binary(_, l, r) => l.contains_variable(name) || r.contains_variable(name),
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Unary(_, c) => c.visit(f),
            Expr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            _ => {}
        }
    }

    /// Pre-order list of node paths; index `i` matches the `i`-th visited node.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        fn walk(e: &Expr, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(prefix.clone());
            for (i, c) in e.children().into_iter().enumerate() {
                prefix.push(i);
                walk(c, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::with_capacity(self.node_count());
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Expr> {
        let mut cur = self;
        for &i in path {
            cur = match (cur, i) {
                (Expr::Unary(_, c), 0) => c,
                (Expr::Binary(_, l, _), 0) => l,
                (Expr::Binary(_, _, r), 1) => r,
                _ => return None,
            };
        }
        Some(cur)
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> Option<&mut Expr> {
        let mut cur = self;
        for &i in path {
            cur = match (cur, i) {
                (Expr::Unary(_, c), 0) => c,
                (Expr::Binary(_, l, _), 0) => l,
                (Expr::Binary(_, _, r), 1) => r,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Returns a copy with the node at `path` replaced by `replacement`.
    pub fn replace_at(&self, path: &[usize], replacement: Expr) -> Result<Expr, ExprError> {
        let mut out = self.clone();
        let slot = out
            .at_path_mut(path)
            .ok_or_else(|| ExprError::InvalidPath(path.to_vec()))?;
        *slot = replacement;
        Ok(out)
    }

    /// Applies `f` to every constant (including category table values).
    pub fn map_constants(&self, f: &mut impl FnMut(f64) -> f64) -> Expr {
        match self {
            Expr::Constant(c) => Expr::Constant(f(*c)),
            Expr::Feature(n) => Expr::Feature(n.clone()),
            Expr::CategoryMap { name, table } => Expr::CategoryMap {
                name: name.clone(),
                table: table.iter().map(|(k, v)| (k.clone(), f(*v))).collect(),
            },
            Expr::Unary(op, c) => Expr::unary(*op, c.map_constants(f)),
            Expr::Binary(op, l, r) => {
                let l = l.map_constants(f);
                let r = r.map_constants(f);
                Expr::binary(*op, l, r)
            }
        }
    }

    /// Checks that every referenced column exists with a compatible kind and
    /// that category tables cover every declared category.
    pub fn check_bound(&self, schema: &Schema) -> Result<(), EvalError> {
        let mut result = Ok(());
        self.visit(&mut |e| {
            if result.is_err() {
                return;
            }
            result = match e {
                Expr::Feature(n) => match schema.get(n) {
                    None => Err(EvalError::UnboundFeature(n.clone())),
                    Some(c) if !c.is_numeric() => Err(EvalError::CategoricalAsNumeric(n.clone())),
                    Some(_) => Ok(()),
                },
                Expr::CategoryMap { name, table } => match schema.get(name).map(|c| c.categories()) {
                    None => Err(EvalError::UnboundFeature(name.clone())),
                    Some(None) => Err(EvalError::NumericAsCategorical(name.clone())),
                    Some(Some(cats)) => match cats.iter().find(|c| !table.contains_key(*c)) {
                        Some(missing) => Err(EvalError::MissingCategory {
                            column: name.clone(),
                            category: missing.clone(),
                        }),
                        None => Ok(()),
                    },
                },
                _ => Ok(()),
            };
        });
        result
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("feature `{0}` is not a column of the dataset")]
    UnboundFeature(String),
    #[error("column `{0}` is categorical and cannot be used as a numeric feature")]
    CategoricalAsNumeric(String),
    #[error("column `{0}` is numeric and cannot be used in a category lookup")]
    NumericAsCategorical(String),
    #[error("category table for `{column}` has no entry for `{category}`")]
    MissingCategory { column: String, category: String },
}

/// Row-wise evaluation output. `invalid_rows` lists rows whose value is not finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub values: Vec<f64>,
    pub invalid_rows: Vec<usize>,
}

impl Evaluation {
    pub fn is_valid(&self) -> bool {
        self.invalid_rows.is_empty()
    }
}

/// Evaluates `expr` on every row of `data`.
pub fn evaluate(expr: &Expr, data: &Dataset) -> Result<Evaluation, EvalError> {
    expr.check_bound(data.schema())?;
    let values = eval_unchecked(expr, data);
    let invalid_rows = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(|(i, _)| i)
        .collect();
    Ok(Evaluation { values, invalid_rows })
}

/// Evaluation without the binding check or the invalid-row scan.
///
/// Panics if the expression references a column missing from `data`; call
/// [`Expr::check_bound`] first.
pub fn eval_unchecked(expr: &Expr, data: &Dataset) -> Vec<f64> {
    let n = data.n_rows();
    match expr {
        Expr::Constant(c) => vec![*c; n],
        Expr::Feature(name) => match data.column(name) {
            Some(Column::Numeric(v)) => v.clone(),
            _ => panic!("feature `{name}` not bound"),
        },
        Expr::CategoryMap { name, table } => {
            let spec = data.schema().get(name).expect("category column not bound");
            let cats = spec.categories().expect("category column not categorical");
            let lookup: Vec<f64> = cats.iter().map(|c| table.get(c).copied().unwrap_or(f64::NAN)).collect();
            match data.column(name) {
                Some(Column::Categorical(codes)) => codes
                    .iter()
                    .map(|c| c.map_or(f64::NAN, |c| lookup[c as usize]))
                    .collect(),
                _ => panic!("category column `{name}` not bound"),
            }
        }
        Expr::Unary(op, c) => {
            let mut v = eval_unchecked(c, data);
            for x in v.iter_mut() {
                *x = op.apply(*x);
            }
            v
        }
        Expr::Binary(op, l, r) => {
            // Constant operands are common; skip materialising them.
            match (l.as_constant(), r.as_constant()) {
                (Some(a), _) => {
                    let mut v = eval_unchecked(r, data);
                    for x in v.iter_mut() {
                        *x = op.apply(a, *x);
                    }
                    v
                }
                (None, Some(b)) => {
                    let mut v = eval_unchecked(l, data);
                    for x in v.iter_mut() {
                        *x = op.apply(*x, b);
                    }
                    v
                }
                (None, None) => {
                    let mut a = eval_unchecked(l, data);
                    let b = eval_unchecked(r, data);
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x = op.apply(*x, *y);
                    }
                    a
                }
            }
        }
    }
}

/// Evaluates at a single point given by name -> value and name -> category maps.
///
/// Returns `None` when a referenced variable is missing from the point.
pub fn eval_point(expr: &Expr, values: &BTreeMap<String, f64>, categories: &BTreeMap<String, String>) -> Option<f64> {
    Some(match expr {
        Expr::Constant(c) => *c,
        Expr::Feature(n) => *values.get(n)?,
        Expr::CategoryMap { name, table } => *table.get(categories.get(name)?)?,
        Expr::Unary(op, c) => op.apply(eval_point(c, values, categories)?),
        Expr::Binary(op, l, r) => op.apply(eval_point(l, values, categories)?, eval_point(r, values, categories)?),
    })
}

/// Evaluates a variable-free expression.
pub fn eval_constant(expr: &Expr) -> Option<f64> {
    eval_point(expr, &BTreeMap::new(), &BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;

    fn wh(w: f64, h: f64) -> Dataset {
        Dataset::from_numeric(&[("w", vec![w]), ("h", vec![h])]).unwrap()
    }

    #[test]
    fn bmi_tree_by_hand() {
        let bmi = Expr::div(Expr::feature("w"), Expr::unary(UnaryOp::Square, Expr::feature("h")));
        let out = evaluate(&bmi, &wh(70.0, 1.75)).unwrap();
        assert!((out.values[0] - 70.0 / (1.75 * 1.75)).abs() < 1e-12);
        assert!((out.values[0] - 22.857142857142858).abs() < 1e-12);
    }

    #[test]
    fn constant_broadcasts() {
        let d = Dataset::from_numeric(&[("x", vec![1.0, 2.0, 3.0])]).unwrap();
        let out = evaluate(&Expr::constant(5.0), &d).unwrap();
        assert_eq!(out.values, vec![5.0, 5.0, 5.0]);
    }

    #[test]
    fn unbound_feature_is_reported() {
        let d = Dataset::from_numeric(&[("x", vec![1.0])]).unwrap();
        let err = evaluate(&Expr::feature("y"), &d).unwrap_err();
        assert_eq!(err, EvalError::UnboundFeature("y".into()));
    }

    #[test]
    fn domain_errors_flag_rows() {
        let d = Dataset::from_numeric(&[("x", vec![4.0, -1.0, 0.0, 1.0])]).unwrap();
        let e = Expr::unary(UnaryOp::Sqrt, Expr::feature("x"));
        assert_eq!(evaluate(&e, &d).unwrap().invalid_rows, vec![1]);
        let e = Expr::unary(UnaryOp::Log, Expr::feature("x"));
        assert_eq!(evaluate(&e, &d).unwrap().invalid_rows, vec![1, 2]);
        let e = Expr::div(Expr::constant(1.0), Expr::feature("x"));
        assert_eq!(evaluate(&e, &d).unwrap().invalid_rows, vec![2]);
        let big = Dataset::from_numeric(&[("x", vec![1000.0, 1.0])]).unwrap();
        let e = Expr::unary(UnaryOp::Exp, Expr::feature("x"));
        assert_eq!(evaluate(&e, &big).unwrap().invalid_rows, vec![0]);
    }

    #[test]
    fn category_map_lookup() {
        let d = Dataset::builder()
            .categorical("GENDER", ["Female", "Male"], vec![Some(1), Some(0)])
            .build()
            .unwrap();
        let e = Expr::category_map(
            "GENDER",
            [("Male", -0.2514210227924248), ("Female", 0.24145479395502106)],
        );
        let out = evaluate(&e, &d).unwrap();
        assert_eq!(out.values, vec![-0.2514210227924248, 0.24145479395502106]);
        let partial = Expr::category_map("GENDER", [("Male", 1.0)]);
        assert!(matches!(evaluate(&partial, &d), Err(EvalError::MissingCategory { .. })));
        assert!(matches!(
            evaluate(&Expr::feature("GENDER"), &d),
            Err(EvalError::CategoricalAsNumeric(_))
        ));
    }

    #[test]
    fn paths_and_replacement() {
        let e = Expr::add(Expr::feature("x"), Expr::neg(Expr::feature("y")));
        let paths = e.paths();
        assert_eq!(paths, vec![vec![], vec![0], vec![1], vec![1, 0]]);
        assert_eq!(e.at_path(&[1, 0]), Some(&Expr::feature("y")));
        assert!(e.at_path(&[0, 0]).is_none());
        let r = e.replace_at(&[1], Expr::constant(2.0)).unwrap();
        assert_eq!(r, Expr::add(Expr::feature("x"), Expr::constant(2.0)));
        assert!(e.replace_at(&[2], Expr::constant(0.0)).is_err());
    }

    #[test]
    fn operator_list_round_trip() {
        let set = OperatorSet::parse_list("add, mul,sqrt").unwrap();
        assert_eq!(set.binary, vec![BinaryOp::Add, BinaryOp::Mul]);
        assert_eq!(set.unary, vec![UnaryOp::Sqrt]);
        assert_eq!(OperatorSet::parse_list(&set.to_list()).unwrap(), set);
        assert!(OperatorSet::parse_list("pow").is_err());
    }

    #[test]
    fn schema_rejects_duplicates() {
        assert!(Schema::new(vec![ColumnSpec::numeric("a"), ColumnSpec::numeric("a")]).is_err());
        assert!(Schema::new(vec![ColumnSpec::categorical("g", Vec::<String>::new())]).is_err());
    }
}
