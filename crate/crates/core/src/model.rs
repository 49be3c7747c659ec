//! JSON model container.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::complexity;
use crate::expr::Expr;
use crate::parser::{parse, print, ParseError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub complexity: usize,
    pub train_r2: f64,
    pub test_r2: f64,
}

/// A saved model. Field order is the on-disk order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub expression: String,
    pub features: Vec<String>,
    #[serde(default)]
    pub categorical: BTreeMap<String, BTreeMap<String, f64>>,
    pub metrics: Metrics,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub notes: String,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    MalformedDocument(String),
    #[error("stored complexity {stored} but expression has complexity {computed}")]
    ComplexityMismatch { stored: usize, computed: usize },
    #[error("expression does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ModelDocument {
    /// Builds a document for `expr`, filling complexity, features and tables.
    pub fn from_expr(expr: &Expr, train_r2: f64, test_r2: f64, seed: u64, notes: impl Into<String>) -> Self {
        let mut categorical = BTreeMap::new();
        expr.visit(&mut |e| {
            if let Expr::CategoryMap { name, table } = e {
                categorical.insert(name.clone(), table.clone());
            }
        });
        Self {
            expression: print(expr),
            features: expr.variables().into_iter().collect(),
            categorical,
            metrics: Metrics {
                complexity: complexity(expr),
                train_r2,
                test_r2,
            },
            seed,
            notes: notes.into(),
        }
    }

    pub fn expr(&self) -> Result<Expr, ModelError> {
        Ok(parse(&self.expression)?)
    }

    /// Checks the document invariants and returns the parsed expression.
    pub fn validate(&self) -> Result<Expr, ModelError> {
        let e = self.expr()?;
        let computed = complexity(&e);
        if computed != self.metrics.complexity {
            return Err(ModelError::ComplexityMismatch {
                stored: self.metrics.complexity,
                computed,
            });
        }
        let mut problem = None;
        e.visit(&mut |node| {
            if let Expr::CategoryMap { name, table } = node {
                match self.categorical.get(name) {
                    None => problem = Some(format!("no categorical table for `{name}`")),
                    Some(t) if t != table => {
                        problem = Some(format!("categorical table for `{name}` disagrees with expression"))
                    }
                    _ => {}
                }
            }
        });
        if let Some(p) = problem {
            return Err(ModelError::MalformedDocument(p));
        }
        for v in e.variables() {
            if !self.features.contains(&v) {
                return Err(ModelError::MalformedDocument(format!("feature `{v}` not listed")));
            }
        }
        Ok(e)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: Self = serde_json::from_str(text).map_err(|e| ModelError::MalformedDocument(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}

pub fn save_model(doc: &ModelDocument, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    doc.validate()?;
    fs::write(path, doc.to_json()).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelDocument, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ModelDocument::from_json(&text)
}
