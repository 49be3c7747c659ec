//! Ordinary least squares by Householder QR, emitted as expressions.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::data::nhanes::with_bmi;
use crate::data::{Column, Dataset};
use crate::expr::{eval_unchecked, BinaryOp, Expr, UnaryOp};
use crate::metrics::{r2, MetricError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("{rows} rows cannot determine {needed} parameters")]
    InsufficientRows { rows: usize, needed: usize },
    #[error("column `{0}` is missing")]
    ColumnMissing(String),
    #[error("column `{0}` is categorical; encode it numerically first")]
    CategoricalFeature(String),
    #[error("column `{0}` has missing or non-finite values")]
    NonFinite(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OlsFit {
    /// Coefficients in feature order.
    pub coefficients: Vec<(String, f64)>,
    pub intercept: f64,
    pub train_r2: f64,
    pub test_r2: Option<f64>,
    pub expression: Expr,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|(n, _)| n == name).map(|(_, c)| *c)
    }

    /// Predictions from the stored coefficients, without going through the
    /// expression tree.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>, FitError> {
        let cols: Vec<&[f64]> = self
            .coefficients
            .iter()
            .map(|(n, _)| numeric(data, n))
            .collect::<Result<_, _>>()?;
        Ok((0..data.n_rows())
            .map(|i| {
                self.coefficients
                    .iter()
                    .zip(&cols)
                    .fold(self.intercept, |acc, ((_, c), col)| acc + c * col[i])
            })
            .collect())
    }
}

fn numeric<'a>(data: &'a Dataset, name: &str) -> Result<&'a [f64], FitError> {
    match data.column(name) {
        None => Err(FitError::ColumnMissing(name.to_string())),
        Some(Column::Categorical(_)) => Err(FitError::CategoricalFeature(name.to_string())),
        Some(Column::Numeric(v)) => {
            if v.iter().any(|x| !x.is_finite()) {
                Err(FitError::NonFinite(name.to_string()))
            } else {
                Ok(v)
            }
        }
    }
}

/// `c1*x1 + c2*x2 + ... + b`, with subtraction for negative terms.
pub fn affine_expression(terms: &[(Expr, f64)], intercept: f64) -> Expr {
    let mut acc: Option<Expr> = None;
    for (x, c) in terms {
        acc = Some(match acc {
            None => Expr::mul(Expr::Constant(*c), x.clone()),
            Some(a) if *c < 0.0 => Expr::sub(a, Expr::mul(Expr::Constant(-c), x.clone())),
            Some(a) => Expr::add(a, Expr::mul(Expr::Constant(*c), x.clone())),
        });
    }
    match acc {
        None => Expr::Constant(intercept),
        Some(a) if intercept < 0.0 => Expr::sub(a, Expr::Constant(-intercept)),
        Some(a) if intercept > 0.0 => Expr::add(a, Expr::Constant(intercept)),
        Some(a) => a,
    }
}

/// Least-squares solution of `[1 X] beta = y`; returns (intercept, slopes).
fn solve(cols: &[&[f64]], y: &[f64]) -> Result<(f64, Vec<f64>), FitError> {
    let (m, p) = (y.len(), cols.len() + 1);
    if m < p {
        return Err(FitError::InsufficientRows { rows: m, needed: p });
    }
    let a = DMatrix::from_fn(m, p, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });
    let qr = a.qr();
    let r = qr.r();
    let max_diag = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let tol = max_diag * 1e-10;
    if max_diag == 0.0 || (0..p).any(|i| r[(i, i)].abs() <= tol) {
        return Err(FitError::RankDeficient);
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(y);
    let beta = r.solve_upper_triangular(&qty).ok_or(FitError::RankDeficient)?;
    Ok((beta[0], beta.iter().skip(1).copied().collect()))
}

/// Fits `target ~ features` on `train` and scores on `train` and, when
/// given, `test`.
pub fn fit_ols(train: &Dataset, test: Option<&Dataset>, features: &[&str], target: &str) -> Result<OlsFit, FitError> {
    let cols: Vec<&[f64]> = features.iter().map(|f| numeric(train, f)).collect::<Result<_, _>>()?;
    let y = numeric(train, target)?;
    let (intercept, slopes) = solve(&cols, y)?;
    let terms: Vec<(Expr, f64)> = features
        .iter()
        .map(|f| Expr::feature(*f))
        .zip(slopes.iter().copied())
        .collect();
    finish(
        features.iter().map(|s| s.to_string()).zip(slopes).collect(),
        intercept,
        affine_expression(&terms, intercept),
        train,
        test,
        target,
    )
}

fn finish(
    coefficients: Vec<(String, f64)>,
    intercept: f64,
    expression: Expr,
    train: &Dataset,
    test: Option<&Dataset>,
    target: &str,
) -> Result<OlsFit, FitError> {
    let mut fit = OlsFit {
        coefficients,
        intercept,
        train_r2: 0.0,
        test_r2: None,
        expression,
    };
    fit.train_r2 = r2(&fit.predict(train)?, numeric(train, target)?)?;
    if let Some(t) = test {
        fit.test_r2 = Some(r2(&fit.predict(t)?, numeric(t, target)?)?);
    }
    Ok(fit)
}

/// The BMI expression `BMXWT / (0.01*BMXHT)^2`.
pub fn bmi_expression() -> Expr {
    Expr::binary(
        BinaryOp::Div,
        Expr::feature("BMXWT"),
        Expr::unary(UnaryOp::Square, Expr::mul(Expr::Constant(0.01), Expr::feature("BMXHT"))),
    )
}

/// Single-feature fit on BMI computed from weight (kg) and height (cm).
pub fn fit_bmi_baseline(train: &Dataset, test: Option<&Dataset>, target: &str) -> Result<OlsFit, FitError> {
    let prepare = |d: &Dataset| -> Result<Dataset, FitError> {
        numeric(d, "BMXWT")?;
        numeric(d, "BMXHT")?;
        with_bmi(d).map_err(|_| FitError::ColumnMissing("BMXWT".into()))
    };
    let train_b = prepare(train)?;
    let test_b = test.map(prepare).transpose()?;
    let bmi = eval_unchecked(&bmi_expression(), &train_b);
    let (intercept, slopes) = solve(&[&bmi], numeric(&train_b, target)?)?;
    let expression = affine_expression(&[(bmi_expression(), slopes[0])], intercept);
    finish(
        vec![("BMI".to_string(), slopes[0])],
        intercept,
        expression,
        &train_b,
        test_b.as_ref(),
        target,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::complexity;

    #[test]
    fn exact_affine_data() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
        let d = Dataset::from_numeric(&[("x", x), ("y", y)]).unwrap();
        let fit = fit_ols(&d, None, &["x"], "y").unwrap();
        assert!((fit.coefficient("x").unwrap() - 3.0).abs() < 1e-9);
        assert!((fit.intercept + 7.0).abs() < 1e-9);
        assert!((fit.train_r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_is_rank_deficient() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let z: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let d = Dataset::from_numeric(&[("x", x), ("z", z), ("y", y)]).unwrap();
        assert_eq!(fit_ols(&d, None, &["x", "z"], "y"), Err(FitError::RankDeficient));
    }

    #[test]
    fn too_few_rows() {
        let d = Dataset::from_numeric(&[("x", vec![1.0]), ("y", vec![2.0])]).unwrap();
        assert_eq!(
            fit_ols(&d, None, &["x"], "y"),
            Err(FitError::InsufficientRows { rows: 1, needed: 2 })
        );
    }

    #[test]
    fn expression_shapes() {
        let n = 30;
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let cols: Vec<(String, Vec<f64>)> = (0..7)
            .map(|j| (format!("x{j}"), (0..n).map(|_| next() * 10.0).collect()))
            .collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64).cos() * 3.0 + i as f64).collect();
        let mut b = Dataset::builder().numeric("y", y);
        for (name, v) in &cols {
            b = b.numeric(name.clone(), v.clone());
        }
        let d = b.build().unwrap();
        let names: Vec<&str> = cols.iter().map(|(n, _)| n.as_str()).collect();
        let fit = fit_ols(&d, None, &names, "y").unwrap();
        assert_eq!(complexity(&fit.expression), 13);
        let fit2 = fit_ols(&d, None, &names[..2], "y").unwrap();
        assert_eq!(complexity(&fit2.expression), 3);
    }

    #[test]
    fn bmi_identity() {
        let w: Vec<f64> = (0..25).map(|i| 50.0 + 3.0 * i as f64).collect();
        let h: Vec<f64> = (0..25).map(|i| 150.0 + ((i * 7) % 40) as f64).collect();
        let y: Vec<f64> = w.iter().zip(&h).map(|(w, h)| w / ((0.01 * h) * (0.01 * h))).collect();
        let d = Dataset::from_numeric(&[("BMXWT", w), ("BMXHT", h), ("DXDTOPF", y)]).unwrap();
        let fit = fit_bmi_baseline(&d, Some(&d), "DXDTOPF").unwrap();
        assert!((fit.coefficients[0].1 - 1.0).abs() < 1e-9);
        assert!(fit.intercept.abs() < 1e-7);
        assert!((fit.train_r2 - 1.0).abs() < 1e-12);
        assert_eq!(complexity(&fit.expression), 4);
    }
}
