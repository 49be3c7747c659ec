//! NHANES 2017-2018 body-fat cohort assembly.
//!
//! Inputs are the Demographics (`DEMO_J`), Body Measures (`BMX_J`) and
//! whole-body DXA (`DXX_J`) tables converted to headered CSV, e.g. with
//! `python -c "import pandas as pd; pd.read_sas('DEMO_J.XPT').to_csv('DEMO_J.csv', index=False)"`.
//! Sample weights in the demographics file are not used.

use std::path::{Path, PathBuf};

use super::{apply_filter, join_on, load_csv, CohortFilter, Column, DataError, Dataset, FilterReport, LoadOptions};
use crate::expr::ColumnSpec;

pub const KEY: &str = "SEQN";
pub const GENDER_CODE: &str = "RIAGENDR";
/// Categorical copy of the gender column with categories `Female`, `Male`.
pub const GENDER: &str = "GENDER";
pub const AGE: &str = "RIDAGEYR";
pub const PREGNANCY: &str = "RIDEXPRG";
pub const TARGET: &str = "DXDTOPF";

pub const BODY_MEASURES: [&str; 7] = ["BMXWT", "BMXHT", "BMXLEG", "BMXARML", "BMXARMC", "BMXWAIST", "BMXHIP"];

pub const FEMALE: &str = "Female";
pub const MALE: &str = "Male";

/// Feature sets of the four linear baselines (baseline 2 uses weight and
/// height through the BMI formula).
pub fn baseline_features(n: usize) -> Option<Vec<&'static str>> {
    let mut all = vec![GENDER_CODE, AGE];
    all.extend(BODY_MEASURES);
    match n {
        1 | 2 => Some(vec!["BMXWT", "BMXHT"]),
        3 => Some(BODY_MEASURES.to_vec()),
        4 => Some(all),
        _ => None,
    }
}

/// Inputs offered to the symbolic search for problem `n`; gender enters as
/// the categorical column.
pub fn search_features(n: usize) -> Option<Vec<&'static str>> {
    let mut feats = baseline_features(n)?;
    for f in feats.iter_mut() {
        if *f == GENDER_CODE {
            *f = GENDER;
        }
    }
    Some(feats)
}

/// Complexity budget matching each baseline's graph size.
pub fn budget(n: usize) -> Option<usize> {
    match n {
        1 => Some(3),
        2 => Some(4),
        3 => Some(13),
        4 => Some(17),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NhanesFiles {
    pub demographics: PathBuf,
    pub body_measures: PathBuf,
    pub dxa: PathBuf,
}

impl NhanesFiles {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            demographics: dir.join("DEMO_J.csv"),
            body_measures: dir.join("BMX_J.csv"),
            dxa: dir.join("DXX_J.csv"),
        }
    }

    pub fn exist(&self) -> bool {
        self.demographics.is_file() && self.body_measures.is_file() && self.dxa.is_file()
    }

    pub fn paths(&self) -> [&Path; 3] {
        [&self.demographics, &self.body_measures, &self.dxa]
    }
}

/// Default inclusion criteria: adults, not pregnant, complete on every
/// feature and the target.
pub fn default_filter() -> CohortFilter {
    let mut required = vec![GENDER_CODE.to_string(), AGE.to_string()];
    required.extend(BODY_MEASURES.iter().map(|s| s.to_string()));
    required.push(TARGET.to_string());
    CohortFilter {
        required_nonmissing: required,
        ..CohortFilter::default()
    }
}

/// Joins, filters and recodes the three tables.
///
/// The output holds `SEQN, RIAGENDR (1 = male, 0 = female), GENDER, RIDAGEYR`,
/// the seven body measures and `DXDTOPF`.
pub fn build_cohort(files: &NhanesFiles, filter: &CohortFilter) -> Result<(Dataset, FilterReport), DataError> {
    let mut demo_cols = vec![KEY, GENDER_CODE, AGE];
    if filter.exclude_pregnant {
        demo_cols.push(filter.pregnancy_column.as_str());
    }
    let demo = load_csv(&files.demographics, &LoadOptions::default().only(demo_cols))?;
    let mut bmx_cols = vec![KEY];
    bmx_cols.extend(BODY_MEASURES);
    let bmx = load_csv(&files.body_measures, &LoadOptions::default().only(bmx_cols))?;
    let dxx = load_csv(&files.dxa, &LoadOptions::default().only([KEY, TARGET]))?;
    cohort_from_tables(&demo, &bmx, &dxx, filter)
}

pub fn cohort_from_tables(
    demo: &Dataset,
    bmx: &Dataset,
    dxx: &Dataset,
    filter: &CohortFilter,
) -> Result<(Dataset, FilterReport), DataError> {
    let joined = join_on(&[demo, bmx, dxx], KEY)?;
    let (kept, report) = apply_filter(&joined, filter)?;

    // NHANES codes 1 = male, 2 = female.
    let raw = kept.try_numeric(GENDER_CODE)?;
    let recoded: Vec<f64> = raw
        .iter()
        .map(|&g| match g as i64 {
            1 => 1.0,
            2 => 0.0,
            _ => f64::NAN,
        })
        .collect();
    let labels: Vec<Option<u32>> = recoded
        .iter()
        .map(|&g| {
            if g == 1.0 {
                Some(1)
            } else if g == 0.0 {
                Some(0)
            } else {
                None
            }
        })
        .collect();

    let mut out = Dataset::builder().numeric(KEY, kept.try_numeric(KEY)?.to_vec());
    out = out.numeric(GENDER_CODE, recoded);
    out = out.categorical(GENDER, [FEMALE, MALE], labels);
    out = out.numeric(AGE, kept.try_numeric(AGE)?.to_vec());
    for m in BODY_MEASURES {
        out = out.numeric(m, kept.try_numeric(m)?.to_vec());
    }
    out = out.numeric(TARGET, kept.try_numeric(TARGET)?.to_vec());
    let out = out.build()?;
    let out = out.drop_missing(&[GENDER_CODE])?;
    let mut report = report;
    report.removed_missing += report.kept - out.n_rows();
    report.kept = out.n_rows();
    Ok((out, report))
}

/// Row counts per gender category.
pub fn gender_counts(cohort: &Dataset) -> (usize, usize) {
    match cohort.column(GENDER) {
        Some(Column::Categorical(c)) => {
            let male = c.iter().filter(|v| **v == Some(1)).count();
            let female = c.iter().filter(|v| **v == Some(0)).count();
            (male, female)
        }
        _ => (0, 0),
    }
}

/// Adds the BMI column `BMXWT / (0.01 * BMXHT)^2` used by baseline 2.
pub fn with_bmi(data: &Dataset) -> Result<Dataset, DataError> {
    let wt = data.try_numeric("BMXWT")?;
    let ht = data.try_numeric("BMXHT")?;
    let bmi = wt
        .iter()
        .zip(ht)
        .map(|(w, h)| {
            let m = 0.01 * h;
            w / (m * m)
        })
        .collect();
    data.with_column(ColumnSpec::numeric("BMI"), Column::Numeric(bmi))
}
