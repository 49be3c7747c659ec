use std::fmt::Write as _;

use serde::Serialize;

use super::{Column, Dataset};

/// Descriptive statistics of one numeric column, ignoring missing cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnStats {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

/// Percentile by linear interpolation between closest ranks on sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub(crate) fn column_stats(name: &str, values: &[f64]) -> ColumnStats {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let n = v.len();
    if n == 0 {
        return ColumnStats {
            name: name.to_string(),
            count: 0,
            mean: f64::NAN,
            std: f64::NAN,
            min: f64::NAN,
            p25: f64::NAN,
            p50: f64::NAN,
            p75: f64::NAN,
            max: f64::NAN,
        };
    }
    v.sort_by(f64::total_cmp);
    let mean = v.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    ColumnStats {
        name: name.to_string(),
        count: n,
        mean,
        std,
        min: v[0],
        p25: percentile(&v, 0.25),
        p50: percentile(&v, 0.5),
        p75: percentile(&v, 0.75),
        max: v[n - 1],
    }
}

/// Statistics for every numeric column, in schema order.
pub fn describe(data: &Dataset) -> Vec<ColumnStats> {
    data.columns()
        .filter_map(|(spec, col)| match col {
            Column::Numeric(v) => Some(column_stats(&spec.name, v)),
            Column::Categorical(_) => None,
        })
        .collect()
}

pub fn stats_csv(stats: &[ColumnStats]) -> String {
    let mut out = String::from("column,count,mean,std,min,p25,p50,p75,max\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.name, s.count, s.mean, s.std, s.min, s.p25, s.p50, s.p75, s.max
        );
    }
    out
}

/// Aligned text table rounded to one decimal.
pub fn stats_table(stats: &[ColumnStats]) -> String {
    let width = stats.iter().map(|s| s.name.len()).max().unwrap_or(6).max(6);
    let mut out = format!(
        "{:<width$} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
        "column", "n", "mean", "std", "min", "25%", "50%", "75%", "max"
    );
    for s in stats {
        let _ = writeln!(
            out,
            "{:<width$} {:>6} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1}",
            s.name, s.count, s.mean, s.std, s.min, s.p25, s.p50, s.p75, s.max
        );
    }
    out
}
