//! Symbolic regression by genetic programming under a graph-edge
//! complexity budget, with ordinary-least-squares baselines and symbolic
//! calculus for inspecting the resulting formulas.

pub mod casestudy;
pub mod complexity;
pub mod data;
pub mod expr;
pub mod gp;
pub mod linfit;
pub mod metrics;
pub mod model;
pub mod parser;
pub mod study;
pub mod symbolic;

pub use complexity::{complexity, to_dot};
pub use data::{Column, DataError, Dataset};
pub use expr::{evaluate, BinaryOp, ColumnKind, ColumnSpec, EvalError, Expr, OperatorSet, Schema, UnaryOp};
pub use metrics::{mse, r2};
pub use model::ModelDocument;
pub use parser::{parse, print, ParseError};
