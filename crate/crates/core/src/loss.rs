//! Loss functions and inherent distance functions.
//!
//! Square, absolute, L_p, zero-one (with an epsilon window) and the
//! Kullback-Leibler loss for the known-variance Normal mean, plus the summed
//! square loss used for vector means. The KL closed form is cross-checked in
//! tests by quadrature of the defining integral.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A loss function over (estimate, parameter) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossFunction {
    /// (estimate - theta)^2, univariate.
    Square,
    /// |estimate - theta|, univariate.
    Absolute,
    /// |estimate - theta|^p for p > 0, univariate.
    Lp { p: f64 },
    /// 0 iff |estimate - theta| < eps, else 1. With `eps: None` the window
    /// defaults to 1e-6 * (1 + |theta|) at evaluation time.
    ZeroOneEps { eps: Option<f64> },
    /// KL divergence between the n-observation known-variance Normal mean
    /// models: n (estimate - theta)^2 / (2 sigma2).
    KLNormal { n: usize, sigma2: f64 },
    /// Summed squared error over coordinates (the Euclidean square loss).
    SteinSum,
}

impl LossFunction {
    pub fn name(&self) -> &'static str {
        match self {
            LossFunction::Square => "square",
            LossFunction::Absolute => "absolute",
            LossFunction::Lp { .. } => "lp",
            LossFunction::ZeroOneEps { .. } => "zero-one-eps",
            LossFunction::KLNormal { .. } => "kl-normal",
            LossFunction::SteinSum => "stein-sum",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossFunction::Lp { p } if *p <= 0.0 => {
                Err(Error::config("Lp loss requires p > 0"))
            }
            LossFunction::ZeroOneEps { eps: Some(e) } if *e <= 0.0 => {
                Err(Error::config("zero-one loss requires eps > 0"))
            }
            LossFunction::KLNormal { n, sigma2 } => {
                if *n == 0 {
                    Err(Error::config("KL loss requires n >= 1"))
                } else if *sigma2 <= 0.0 {
                    Err(Error::config("KL loss requires sigma2 > 0"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Default epsilon window for the zero-one loss at a given parameter value.
pub fn default_zero_one_eps(theta: f64) -> f64 {
    1e-6 * (1.0 + theta.abs())
}

/// Evaluates a loss at (estimate, theta). Univariate losses require both
/// vectors to have length 1; the summed square loss accepts any matching
/// dimension.
pub fn loss_eval(loss: &LossFunction, estimate: &[f64], theta: &[f64]) -> Result<f64> {
    loss.validate()?;
    if estimate.len() != theta.len() {
        return Err(Error::data(format!(
            "loss dimension mismatch: estimate {} vs theta {}",
            estimate.len(),
            theta.len()
        )));
    }
    if estimate.is_empty() {
        return Err(Error::data("loss requires nonempty vectors"));
    }
    match loss {
        LossFunction::SteinSum => Ok(estimate
            .iter()
            .zip(theta)
            .map(|(e, t)| (e - t) * (e - t))
            .sum()),
        _ => {
            if estimate.len() != 1 {
                return Err(Error::data(format!(
                    "{} loss is univariate; got dimension {}",
                    loss.name(),
                    estimate.len()
                )));
            }
            let d = estimate[0] - theta[0];
            Ok(match loss {
                LossFunction::Square => d * d,
                LossFunction::Absolute => d.abs(),
                LossFunction::Lp { p } => d.abs().powf(*p),
                LossFunction::ZeroOneEps { eps } => {
                    let e = eps.unwrap_or_else(|| default_zero_one_eps(theta[0]));
                    if d.abs() < e {
                        0.0
                    } else {
                        1.0
                    }
                }
                LossFunction::KLNormal { n, sigma2 } => {
                    *n as f64 * d * d / (2.0 * sigma2)
                }
                LossFunction::SteinSum => unreachable!(),
            })
        }
    }
}

/// Inherent distance family tied to the sampling distribution: square for
/// Normal, absolute for Laplace, and the supremum of absolute deviations for
/// Uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InherentDistance {
    /// Normal: squared deviation from the true value.
    ND,
    /// Laplace: absolute deviation.
    AD,
    /// Uniform: supremum of absolute deviations over a replication set.
    SUP,
}

/// Evaluates an inherent distance. `ND`/`AD` expect exactly one estimate;
/// `SUP` takes the whole collection and returns the largest absolute
/// deviation from the true value.
pub fn inherent_distance(
    kind: InherentDistance,
    estimates: &[f64],
    theta_star: f64,
) -> Result<f64> {
    match kind {
        InherentDistance::ND | InherentDistance::AD => {
            if estimates.len() != 1 {
                return Err(Error::data(
                    "ND/AD distances take a single estimate; use SUP for collections",
                ));
            }
            let d = estimates[0] - theta_star;
            Ok(match kind {
                InherentDistance::ND => d * d,
                _ => d.abs(),
            })
        }
        InherentDistance::SUP => {
            if estimates.is_empty() {
                return Err(Error::data("SUP distance requires a nonempty collection"));
            }
            Ok(estimates
                .iter()
                .map(|e| (e - theta_star).abs())
                .fold(0.0, f64::max))
        }
    }
}
