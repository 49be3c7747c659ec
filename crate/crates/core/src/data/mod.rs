//! Column-oriented tables: ingestion, joins, cohort filtering, splits and
//! descriptive statistics.
//!
//! Numeric cells hold `f64`; a missing numeric cell is stored as `NaN`.
//! Categorical cells hold an index into the column's declared categories,
//! or `None` when missing.

mod csvio;
pub mod nhanes;
mod stats;

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{ColumnKind, ColumnSpec, Schema, SchemaError};

pub use csvio::{load_csv, read_csv, write_csv, LoadOptions};
pub use stats::{describe, stats_csv, stats_table, ColumnStats};

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<Option<u32>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Column::Numeric(v) => !v[row].is_finite(),
            Column::Categorical(v) => v[row].is_none(),
        }
    }

    fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i]).collect()),
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing or empty header row")]
    MissingHeader,
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("cannot parse `{value}` at row {row}, column `{column}`")]
    UnparseableCell { row: usize, column: String, value: String },
    #[error("column `{0}` not found")]
    ColumnMissing(String),
    #[error("key column `{0}` missing from an input")]
    KeyMissing(String),
    #[error("duplicate key `{key}` in input {input}")]
    DuplicateKey { input: usize, key: String },
    #[error("column `{0}` is not numeric")]
    NotNumeric(String),
    #[error("column `{column}` has {found} rows, expected {expected}")]
    LengthMismatch {
        column: String,
        found: usize,
        expected: usize,
    },
    #[error("category code out of range in column `{0}`")]
    BadCategoryCode(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// An immutable table whose columns follow `schema`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: Schema,
    columns: Vec<Column>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(schema: Schema, columns: Vec<Column>) -> Result<Self, DataError> {
        if schema.len() != columns.len() {
            return Err(DataError::LengthMismatch {
                column: "<schema>".into(),
                found: columns.len(),
                expected: schema.len(),
            });
        }
        let n_rows = columns.first().map_or(0, Column::len);
        for (spec, col) in schema.columns().iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(DataError::LengthMismatch {
                    column: spec.name.clone(),
                    found: col.len(),
                    expected: n_rows,
                });
            }
            match (&spec.kind, col) {
                (ColumnKind::Numeric, Column::Numeric(_)) => {}
                (ColumnKind::Categorical(cats), Column::Categorical(codes)) => {
                    if codes.iter().flatten().any(|&c| c as usize >= cats.len()) {
                        return Err(DataError::BadCategoryCode(spec.name.clone()));
                    }
                }
                _ => return Err(DataError::NotNumeric(spec.name.clone())),
            }
        }
        Ok(Self {
            schema,
            columns,
            n_rows,
        })
    }

    pub fn builder() -> DatasetBuilder {
        DatasetBuilder::default()
    }

    /// Convenience constructor for all-numeric tables.
    pub fn from_numeric(cols: &[(&str, Vec<f64>)]) -> Result<Self, DataError> {
        let mut b = Self::builder();
        for (name, v) in cols {
            b = b.numeric(*name, v.clone());
        }
        b.build()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn columns(&self) -> impl Iterator<Item = (&ColumnSpec, &Column)> {
        self.schema.columns().iter().zip(&self.columns)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.schema.index_of(name).map(|i| &self.columns[i])
    }

    pub fn numeric(&self, name: &str) -> Option<&[f64]> {
        match self.column(name)? {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    pub fn try_numeric(&self, name: &str) -> Result<&[f64], DataError> {
        match self.column(name) {
            None => Err(DataError::ColumnMissing(name.to_string())),
            Some(Column::Categorical(_)) => Err(DataError::NotNumeric(name.to_string())),
            Some(Column::Numeric(v)) => Ok(v),
        }
    }

    /// Category label of a categorical cell.
    pub fn category(&self, name: &str, row: usize) -> Option<&str> {
        let spec = self.schema.get(name)?;
        match self.column(name)? {
            Column::Categorical(codes) => codes[row].map(|c| spec.categories().unwrap()[c as usize].as_str()),
            Column::Numeric(_) => None,
        }
    }

    pub fn take_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            n_rows: rows.len(),
        }
    }

    pub fn select(&self, names: &[&str]) -> Result<Dataset, DataError> {
        let mut specs = Vec::with_capacity(names.len());
        let mut cols = Vec::with_capacity(names.len());
        for name in names {
            let i = self
                .schema
                .index_of(name)
                .ok_or_else(|| DataError::ColumnMissing(name.to_string()))?;
            specs.push(self.schema.columns()[i].clone());
            cols.push(self.columns[i].clone());
        }
        Dataset::new(Schema::new(specs)?, cols)
    }

    pub fn with_column(&self, spec: ColumnSpec, column: Column) -> Result<Dataset, DataError> {
        let mut specs = self.schema.columns().to_vec();
        specs.push(spec);
        let mut cols = self.columns.clone();
        cols.push(column);
        if self.schema.is_empty() {
            return Dataset::new(Schema::new(specs)?, cols);
        }
        if cols.last().unwrap().len() != self.n_rows {
            return Err(DataError::LengthMismatch {
                column: specs.last().unwrap().name.clone(),
                found: cols.last().unwrap().len(),
                expected: self.n_rows,
            });
        }
        Dataset::new(Schema::new(specs)?, cols)
    }

    /// Drops rows with a missing cell in any of `names` (all columns when empty).
    pub fn drop_missing(&self, names: &[&str]) -> Result<Dataset, DataError> {
        let idx: Vec<usize> = if names.is_empty() {
            (0..self.columns.len()).collect()
        } else {
            names
                .iter()
                .map(|n| {
                    self.schema
                        .index_of(n)
                        .ok_or_else(|| DataError::ColumnMissing(n.to_string()))
                })
                .collect::<Result<_, _>>()?
        };
        let keep: Vec<usize> = (0..self.n_rows)
            .filter(|&r| idx.iter().all(|&c| !self.columns[c].is_missing(r)))
            .collect();
        Ok(self.take_rows(&keep))
    }

    pub fn row_is_complete(&self, row: usize, names: &[&str]) -> bool {
        names.iter().all(|n| self.column(n).is_some_and(|c| !c.is_missing(row)))
    }

    /// Single-row dataset; useful for point evaluation through the vector path.
    pub fn single_row(
        values: &BTreeMap<String, f64>,
        categories: &BTreeMap<String, (Vec<String>, String)>,
    ) -> Result<Dataset, DataError> {
        let mut b = Dataset::builder();
        for (k, v) in values {
            b = b.numeric(k.clone(), vec![*v]);
        }
        for (k, (cats, chosen)) in categories {
            let code = cats
                .iter()
                .position(|c| c == chosen)
                .ok_or_else(|| DataError::UnparseableCell {
                    row: 0,
                    column: k.clone(),
                    value: chosen.clone(),
                })?;
            b = b.categorical(k.clone(), cats.clone(), vec![Some(code as u32)]);
        }
        b.build()
    }
}

#[derive(Default)]
pub struct DatasetBuilder {
    specs: Vec<ColumnSpec>,
    columns: Vec<Column>,
}

impl DatasetBuilder {
    pub fn numeric(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.specs.push(ColumnSpec::numeric(name));
        self.columns.push(Column::Numeric(values));
        self
    }

    pub fn categorical<S: Into<String>>(
        mut self,
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
        codes: Vec<Option<u32>>,
    ) -> Self {
        self.specs.push(ColumnSpec::categorical(name, categories));
        self.columns.push(Column::Categorical(codes));
        self
    }

    pub fn build(self) -> Result<Dataset, DataError> {
        Dataset::new(Schema::new(self.specs)?, self.columns)
    }
}

fn key_repr(data: &Dataset, col: &Column, name: &str, row: usize) -> Option<String> {
    match col {
        Column::Numeric(v) => v[row].is_finite().then(|| format!("{}", v[row])),
        Column::Categorical(_) => data.category(name, row).map(str::to_string),
    }
}

/// Inner join on `key`. Rows follow the order of the first input; the key
/// column is kept once and clashing non-key names get an `_{input index}` suffix.
pub fn join_on(inputs: &[&Dataset], key: &str) -> Result<Dataset, DataError> {
    let Some(first) = inputs.first() else {
        return Dataset::builder().build();
    };
    let mut indexes: Vec<HashMap<String, usize>> = Vec::with_capacity(inputs.len());
    for (i, d) in inputs.iter().enumerate() {
        let col = d.column(key).ok_or_else(|| DataError::KeyMissing(key.to_string()))?;
        let mut map = HashMap::with_capacity(d.n_rows());
        for r in 0..d.n_rows() {
            if let Some(k) = key_repr(d, col, key, r) {
                if map.insert(k.clone(), r).is_some() {
                    return Err(DataError::DuplicateKey { input: i, key: k });
                }
            }
        }
        indexes.push(map);
    }

    let first_key = first.column(key).unwrap();
    let mut row_sets: Vec<Vec<usize>> = vec![Vec::new(); inputs.len()];
    for r in 0..first.n_rows() {
        let Some(k) = key_repr(first, first_key, key, r) else {
            continue;
        };
        let hits: Option<Vec<usize>> = indexes.iter().map(|m| m.get(&k).copied()).collect();
        if let Some(hits) = hits {
            for (set, h) in row_sets.iter_mut().zip(hits) {
                set.push(h);
            }
        }
    }

    let mut specs: Vec<ColumnSpec> = Vec::new();
    let mut cols: Vec<Column> = Vec::new();
    for (i, (d, rows)) in inputs.iter().zip(&row_sets).enumerate() {
        for (spec, col) in d.columns() {
            if spec.name == key && i > 0 {
                continue;
            }
            let mut spec = spec.clone();
            if specs.iter().any(|s| s.name == spec.name) {
                spec.name = format!("{}_{}", spec.name, i);
            }
            specs.push(spec);
            cols.push(col.take(rows));
        }
    }
    Dataset::new(Schema::new(specs)?, cols)
}

/// Inclusion criteria for a study cohort.
#[derive(Clone, Debug, PartialEq)]
pub struct CohortFilter {
    pub min_age_years: f64,
    pub age_column: String,
    pub exclude_pregnant: bool,
    pub pregnancy_column: String,
    /// Value of `pregnancy_column` meaning "pregnant at examination".
    pub pregnant_code: f64,
    pub required_nonmissing: Vec<String>,
}

impl Default for CohortFilter {
    fn default() -> Self {
        Self {
            min_age_years: 18.0,
            age_column: "RIDAGEYR".into(),
            exclude_pregnant: true,
            pregnancy_column: "RIDEXPRG".into(),
            pregnant_code: 1.0,
            required_nonmissing: Vec::new(),
        }
    }
}

/// Rows removed by each criterion, applied in order age, pregnancy, missing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterReport {
    pub input_rows: usize,
    pub removed_age: usize,
    pub removed_pregnant: usize,
    pub removed_missing: usize,
    pub kept: usize,
}

pub fn apply_filter(data: &Dataset, filter: &CohortFilter) -> Result<(Dataset, FilterReport), DataError> {
    let age = data.try_numeric(&filter.age_column)?;
    let preg = if filter.exclude_pregnant {
        Some(data.try_numeric(&filter.pregnancy_column)?)
    } else {
        None
    };
    let required: Vec<&str> = filter.required_nonmissing.iter().map(String::as_str).collect();
    for r in &required {
        if data.column(r).is_none() {
            return Err(DataError::ColumnMissing(r.to_string()));
        }
    }

    let mut report = FilterReport {
        input_rows: data.n_rows(),
        ..Default::default()
    };
    let mut keep = Vec::new();
    for row in 0..data.n_rows() {
        if !(age[row] >= filter.min_age_years) {
            report.removed_age += 1;
        } else if preg.is_some_and(|p| p[row] == filter.pregnant_code) {
            report.removed_pregnant += 1;
        } else if !data.row_is_complete(row, &required) {
            report.removed_missing += 1;
        } else {
            keep.push(row);
        }
    }
    report.kept = keep.len();
    Ok((data.take_rows(&keep), report))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

impl SplitSpec {
    /// Row indices of the (train, test) partition for `n` rows.
    pub fn partition(&self, n: usize) -> (Vec<usize>, Vec<usize>) {
        assert!(
            self.train_fraction > 0.0 && self.train_fraction < 1.0,
            "train fraction must lie in (0, 1)"
        );
        let mut idx: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        idx.shuffle(&mut rng);
        let n_train = (self.train_fraction * n as f64).round() as usize;
        let test = idx.split_off(n_train.min(n));
        (idx, test)
    }
}

/// Seeded shuffle followed by a train/test cut.
pub fn split(data: &Dataset, spec: &SplitSpec) -> (Dataset, Dataset) {
    let (train, test) = spec.partition(data.n_rows());
    (data.take_rows(&train), data.take_rows(&test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keyed(keys: &[f64], name: &str, vals: &[f64]) -> Dataset {
        Dataset::from_numeric(&[("SEQN", keys.to_vec()), (name, vals.to_vec())]).unwrap()
    }

    #[test]
    fn join_keeps_common_keys() {
        let a = keyed(&[1.0, 2.0, 3.0], "a", &[10.0, 20.0, 30.0]);
        let b = keyed(&[2.0, 3.0, 4.0], "b", &[200.0, 300.0, 400.0]);
        let j = join_on(&[&a, &b], "SEQN").unwrap();
        assert_eq!(j.numeric("SEQN").unwrap(), &[2.0, 3.0]);
        assert_eq!(j.numeric("a").unwrap(), &[20.0, 30.0]);
        assert_eq!(j.numeric("b").unwrap(), &[200.0, 300.0]);
    }

    #[test]
    fn self_join_suffixes_duplicates() {
        let a = keyed(&[1.0, 2.0, 3.0], "a", &[10.0, 20.0, 30.0]);
        let j = join_on(&[&a, &a], "SEQN").unwrap();
        assert_eq!(j.n_rows(), 3);
        let names: Vec<&str> = j.schema().names().collect();
        assert_eq!(names, vec!["SEQN", "a", "a_1"]);
    }

    #[test]
    fn join_errors() {
        let a = keyed(&[1.0, 1.0], "a", &[1.0, 2.0]);
        let b = keyed(&[1.0], "b", &[1.0]);
        assert!(matches!(
            join_on(&[&a, &b], "SEQN"),
            Err(DataError::DuplicateKey { input: 0, .. })
        ));
        assert!(matches!(join_on(&[&b, &b], "ID"), Err(DataError::KeyMissing(_))));
    }

    #[test]
    fn filter_identity_on_clean_adults() {
        let d = Dataset::from_numeric(&[("RIDAGEYR", vec![20.0, 30.0]), ("x", vec![1.0, 2.0])]).unwrap();
        let f = CohortFilter {
            exclude_pregnant: false,
            required_nonmissing: vec!["x".into()],
            ..Default::default()
        };
        let (out, report) = apply_filter(&d, &f).unwrap();
        assert_eq!(out, d);
        assert_eq!(report.kept, 2);
    }

    #[test]
    fn filter_drops_enumerated_violations() {
        let d = Dataset::from_numeric(&[
            ("RIDAGEYR", vec![17.0, 18.0, 25.0, 40.0, 33.0, f64::NAN]),
            ("RIDEXPRG", vec![f64::NAN, 2.0, 1.0, f64::NAN, 3.0, 2.0]),
            ("x", vec![1.0, 2.0, 3.0, f64::NAN, 5.0, 6.0]),
        ])
        .unwrap();
        let f = CohortFilter {
            required_nonmissing: vec!["x".into()],
            ..Default::default()
        };
        let (out, report) = apply_filter(&d, &f).unwrap();
        assert_eq!(out.numeric("x").unwrap(), &[2.0, 5.0]);
        assert_eq!(report.removed_age, 2);
        assert_eq!(report.removed_pregnant, 1);
        assert_eq!(report.removed_missing, 1);
        let (again, _) = apply_filter(&out, &f).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let d = Dataset::from_numeric(&[("x", (0..10).map(f64::from).collect())]).unwrap();
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 7,
        };
        let (tr, te) = split(&d, &spec);
        assert_eq!((tr.n_rows(), te.n_rows()), (8, 2));
        let (tr2, te2) = split(&d, &spec);
        assert_eq!(tr, tr2);
        assert_eq!(te, te2);
        let mut all: Vec<f64> = tr
            .numeric("x")
            .unwrap()
            .iter()
            .chain(te.numeric("x").unwrap())
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, d.numeric("x").unwrap());
    }
}
