use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Column, DataError, Dataset};
use crate::expr::{ColumnSpec, Schema};

/// Typing hints for [`load_csv`]. Columns are numeric unless listed in
/// `categorical`.
#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    pub categorical: BTreeSet<String>,
    /// Declared category order per column; otherwise sorted distinct labels.
    pub categories: BTreeMap<String, Vec<String>>,
    /// Numeric codes that mean "missing" (refused / don't know) per column.
    pub missing_codes: BTreeMap<String, Vec<f64>>,
    /// Only load these columns (all when empty).
    pub columns: Vec<String>,
}

impl LoadOptions {
    pub fn categorical(mut self, name: impl Into<String>) -> Self {
        self.categorical.insert(name.into());
        self
    }

    pub fn only<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.columns = names.into_iter().map(Into::into).collect();
        self
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, opts)
}

pub fn read_csv(reader: impl Read, opts: &LoadOptions) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(DataError::MissingHeader);
    }
    let wanted: Vec<usize> = if opts.columns.is_empty() {
        (0..headers.len()).collect()
    } else {
        opts.columns
            .iter()
            .map(|c| {
                headers
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| DataError::ColumnMissing(c.clone()))
            })
            .collect::<Result<_, _>>()?
    };

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); wanted.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != headers.len() {
            return Err(DataError::RaggedRow {
                row,
                found: rec.len(),
                expected: headers.len(),
            });
        }
        for (slot, &c) in raw.iter_mut().zip(&wanted) {
            slot.push(rec[c].trim().to_string());
        }
    }

    let mut specs = Vec::with_capacity(wanted.len());
    let mut cols = Vec::with_capacity(wanted.len());
    for (cells, &c) in raw.into_iter().zip(&wanted) {
        let name = &headers[c];
        if opts.categorical.contains(name) {
            let cats: Vec<String> = match opts.categories.get(name) {
                Some(c) => c.clone(),
                None => cells
                    .iter()
                    .filter(|s| !s.is_empty())
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            };
            let codes = cells
                .iter()
                .enumerate()
                .map(|(r, s)| {
                    if s.is_empty() {
                        return Ok(None);
                    }
                    cats.iter()
                        .position(|c| c == s)
                        .map(|p| Some(p as u32))
                        .ok_or_else(|| DataError::UnparseableCell {
                            row: r + 1,
                            column: name.clone(),
                            value: s.clone(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let cats = if cats.is_empty() { vec![String::new()] } else { cats };
            specs.push(ColumnSpec::categorical(name.clone(), cats));
            cols.push(Column::Categorical(codes));
        } else {
            let sentinels = opts.missing_codes.get(name).map(Vec::as_slice).unwrap_or(&[]);
            let values = cells
                .iter()
                .enumerate()
                .map(|(r, s)| {
                    if s.is_empty() {
                        return Ok(f64::NAN);
                    }
                    let v: f64 = s.parse().map_err(|_| DataError::UnparseableCell {
                        row: r + 1,
                        column: name.clone(),
                        value: s.clone(),
                    })?;
                    Ok(if sentinels.contains(&v) || !v.is_finite() {
                        f64::NAN
                    } else {
                        v
                    })
                })
                .collect::<Result<Vec<f64>, DataError>>()?;
            specs.push(ColumnSpec::numeric(name.clone()));
            cols.push(Column::Numeric(values));
        }
    }
    Dataset::new(Schema::new(specs)?, cols)
}

/// Writes a headered CSV. Missing cells are written empty and reals use the
/// shortest representation that parses back to the same value.
pub fn write_csv(data: &Dataset, writer: impl Write) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.schema().names())?;
    let cols: Vec<_> = data.columns().collect();
    let mut record = Vec::with_capacity(cols.len());
    for row in 0..data.n_rows() {
        record.clear();
        for (spec, col) in &cols {
            record.push(match col {
                Column::Numeric(v) if v[row].is_finite() => format!("{}", v[row]),
                Column::Numeric(_) => String::new(),
                Column::Categorical(c) => c[row]
                    .map(|c| spec.categories().unwrap()[c as usize].clone())
                    .unwrap_or_default(),
            });
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}
