//! Point estimators: coordinate means, James-Stein shrinkage (plain and
//! positive-part), the constant "crystal ball" rule, two deliberately wasteful
//! toy rules, and least squares with its shrunk variant for regression.
//!
//! Every estimator is a pure function of the sample matrix; determinism falls
//! out of the seeded sampling layer.

use serde::{Deserialize, Serialize};

use crate::linalg::qr_least_squares;
use crate::model::Matrix;
use crate::{Error, Result};

/// Default constant for the crystal-ball rule.
pub const CRYSTAL_BALL_DEFAULT: f64 = 7_405_926.0;

/// Diagnostics attached to an estimate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateAux {
    /// Scalar shrink factor applied by a James-Stein-type rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrink_factor: Option<f64>,
    /// Whether the positive-part clamp fired.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamped: Option<bool>,
    /// Residual variance estimate from a regression fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// A named parameter estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Vec<f64>,
    pub estimator_name: String,
    #[serde(default)]
    pub aux: EstimateAux,
}

impl Estimate {
    fn plain(value: Vec<f64>, name: &str) -> Self {
        Estimate {
            value,
            estimator_name: name.to_string(),
            aux: EstimateAux::default(),
        }
    }

    /// Scalar accessor for univariate estimates.
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }
}

/// Which toy rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ToyKind {
    /// Last observation only.
    Last,
    /// Mean of first and last observations.
    FirstLast,
}

/// Per-coordinate arithmetic mean; the identity map for single-row samples.
pub fn ls_mean(sample: &Matrix) -> Result<Estimate> {
    if sample.rows() == 0 || sample.cols() == 0 {
        return Err(Error::data("ls_mean requires a nonempty sample"));
    }
    Ok(Estimate::plain(sample.column_means(), "ls-mean"))
}

/// James-Stein shrinkage of a coordinate-mean vector toward the origin.
///
/// The effective per-coordinate variance is `sigma2 / per_coord_n`;
/// `per_coord_n = 1` is the single-observation case. With `positive_part`
/// the scalar factor is clamped at zero, so the estimate never flips sign.
pub fn js_shrink(
    xbar: &[f64],
    sigma2: f64,
    per_coord_n: usize,
    positive_part: bool,
) -> Result<Estimate> {
    if xbar.is_empty() {
        return Err(Error::data("js_shrink requires a nonempty mean vector"));
    }
    if sigma2 <= 0.0 {
        return Err(Error::config("js_shrink requires sigma2 > 0"));
    }
    if per_coord_n == 0 {
        return Err(Error::config("js_shrink requires per_coord_n >= 1"));
    }
    let m = xbar.len();
    let norm_sq: f64 = xbar.iter().map(|x| x * x).sum();
    let effective_var = sigma2 / per_coord_n as f64;
    let numerator = (m as f64 - 2.0) * effective_var;

    let name = if positive_part { "js-plus" } else { "js" };
    let mut aux = EstimateAux::default();
    if m == 1 {
        // The shrink numerator is negative below dimension two; permitted but
        // flagged so reports can surface it.
        aux.warning = Some("james-stein factor has negative numerator for m = 1".to_string());
    }

    if norm_sq == 0.0 {
        if positive_part {
            // Raw factor -inf clamps to zero: the origin itself.
            aux.shrink_factor = Some(0.0);
            aux.clamped = Some(true);
            return Ok(Estimate {
                value: vec![0.0; m],
                estimator_name: name.to_string(),
                aux,
            });
        }
        return Err(Error::numerical(
            "james-stein factor is singular at ||xbar|| = 0",
        ));
    }

    let raw = 1.0 - numerator / norm_sq;
    let (factor, clamped) = if positive_part && raw < 0.0 {
        (0.0, true)
    } else {
        (raw, false)
    };
    aux.shrink_factor = Some(factor);
    if positive_part {
        aux.clamped = Some(clamped);
    }
    Ok(Estimate {
        value: xbar.iter().map(|x| factor * x).collect(),
        estimator_name: name.to_string(),
        aux,
    })
}

/// The constant rule: ignores the sample entirely.
pub fn crystal_ball(_sample: &Matrix, constant: f64) -> Estimate {
    Estimate::plain(vec![constant], "crystal-ball")
}

/// Toy estimators on a univariate sample: the last observation, or the mean
/// of first and last.
pub fn toy_estimator(sample: &Matrix, kind: ToyKind) -> Result<Estimate> {
    if sample.cols() != 1 {
        return Err(Error::data("toy estimators require a univariate sample"));
    }
    let n = sample.rows();
    match kind {
        ToyKind::Last => {
            if n < 1 {
                return Err(Error::data("toy-last requires n >= 1"));
            }
            Ok(Estimate::plain(vec![sample.get(n - 1, 0)], "toy-last"))
        }
        ToyKind::FirstLast => {
            if n < 2 {
                return Err(Error::data("toy-first-last requires n >= 2"));
            }
            let v = 0.5 * (sample.get(0, 0) + sample.get(n - 1, 0));
            Ok(Estimate::plain(vec![v], "toy-first-last"))
        }
    }
}

/// Ordinary least squares on `(y, X)`; records `s^2 = rss / (n - k)` in aux.
pub fn regression_ols(y: &[f64], design: &Matrix) -> Result<Estimate> {
    let n = design.rows();
    let k = design.cols();
    let (beta, rss) = qr_least_squares(design.as_slice(), n, k, y)?;
    let s2 = if n > k { rss / (n - k) as f64 } else { 0.0 };
    Ok(Estimate {
        value: beta,
        estimator_name: "ols".to_string(),
        aux: EstimateAux {
            s2: Some(s2),
            ..EstimateAux::default()
        },
    })
}

/// James-Stein shrinkage of the OLS coefficients:
/// `(1 - c s^2 / (b' X'X b)) b` for `c > 0`.
pub fn regression_js(y: &[f64], design: &Matrix, c: f64) -> Result<Estimate> {
    if c <= 0.0 {
        return Err(Error::config("regression_js requires c > 0"));
    }
    let ols = regression_ols(y, design)?;
    let s2 = ols.aux.s2.unwrap_or(0.0);
    // b' X'X b = ||X b||^2, the squared norm of the fitted values.
    let n = design.rows();
    let k = design.cols();
    let mut fitted_norm_sq = 0.0;
    for r in 0..n {
        let row = design.row(r);
        let fit: f64 = (0..k).map(|j| row[j] * ols.value[j]).sum();
        fitted_norm_sq += fit * fit;
    }
    if fitted_norm_sq == 0.0 {
        return Err(Error::numerical(
            "regression_js is singular: b' X'X b = 0",
        ));
    }
    let factor = 1.0 - c * s2 / fitted_norm_sq;
    Ok(Estimate {
        value: ols.value.iter().map(|b| factor * b).collect(),
        estimator_name: "regression-js".to_string(),
        aux: EstimateAux {
            shrink_factor: Some(factor),
            s2: Some(s2),
            ..EstimateAux::default()
        },
    })
}

/// Estimator family tag with whatever parameters the rule needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EstimatorSpec {
    /// Per-coordinate mean (identity for a single row).
    LSMean,
    /// James-Stein with known variance; `per_coord_n` is taken from the
    /// sample's row count.
    JS { sigma2: f64 },
    /// Positive-part James-Stein.
    JSPlus { sigma2: f64 },
    /// Panel column means (same map as `LSMean`, named for panel reports).
    PanelLS,
    /// Positive-part James-Stein applied to panel column means.
    PanelJSPlus { sigma2: f64 },
    CrystalBall { constant: f64 },
    ToyLast,
    ToyFirstLast,
    OLS,
    RegressionJS { c: f64 },
}

impl EstimatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorSpec::LSMean => "ls-mean",
            EstimatorSpec::JS { .. } => "js",
            EstimatorSpec::JSPlus { .. } => "js-plus",
            EstimatorSpec::PanelLS => "panel-ls",
            EstimatorSpec::PanelJSPlus { .. } => "panel-js-plus",
            EstimatorSpec::CrystalBall { .. } => "crystal-ball",
            EstimatorSpec::ToyLast => "toy-last",
            EstimatorSpec::ToyFirstLast => "toy-first-last",
            EstimatorSpec::OLS => "ols",
            EstimatorSpec::RegressionJS { .. } => "regression-js",
        }
    }

    /// Applies the estimator to a sample matrix.
    ///
    /// Regression rules expect the `[y | design]` layout produced by the
    /// regression model.
    pub fn eval(&self, sample: &Matrix) -> Result<Estimate> {
        match self {
            EstimatorSpec::LSMean | EstimatorSpec::PanelLS => {
                let mut e = ls_mean(sample)?;
                if matches!(self, EstimatorSpec::PanelLS) {
                    e.estimator_name = "panel-ls".to_string();
                }
                Ok(e)
            }
            EstimatorSpec::JS { sigma2 } => {
                let xbar = ls_mean(sample)?;
                js_shrink(&xbar.value, *sigma2, sample.rows(), false)
            }
            EstimatorSpec::JSPlus { sigma2 } | EstimatorSpec::PanelJSPlus { sigma2 } => {
                let xbar = ls_mean(sample)?;
                let mut e = js_shrink(&xbar.value, *sigma2, sample.rows(), true)?;
                if matches!(self, EstimatorSpec::PanelJSPlus { .. }) {
                    e.estimator_name = "panel-js-plus".to_string();
                }
                Ok(e)
            }
            EstimatorSpec::CrystalBall { constant } => Ok(crystal_ball(sample, *constant)),
            EstimatorSpec::ToyLast => toy_estimator(sample, ToyKind::Last),
            EstimatorSpec::ToyFirstLast => toy_estimator(sample, ToyKind::FirstLast),
            EstimatorSpec::OLS => {
                let (y, x) = split_regression(sample)?;
                regression_ols(&y, &x)
            }
            EstimatorSpec::RegressionJS { c } => {
                let (y, x) = split_regression(sample)?;
                regression_js(&y, &x, *c)
            }
        }
    }
}

/// Splits a `[y | design]` sample matrix into its response and design parts.
pub fn split_regression(sample: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if sample.cols() < 2 {
        return Err(Error::data(
            "regression sample needs a response column and at least one regressor",
        ));
    }
    let n = sample.rows();
    let k = sample.cols() - 1;
    let y = sample.column(0);
    let mut x = Matrix::zeros(n, k);
    for r in 0..n {
        for j in 0..k {
            x.set(r, j, sample.get(r, 1 + j));
        }
    }
    Ok((y, x))
}
