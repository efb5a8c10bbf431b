//! Parametric sampling models and seeded draws.
//!
//! A [`StatisticalModel`] pairs a distribution family with a true parameter
//! vector and known dispersion. All draws are pure functions of
//! `(model, seed)`: regenerating with the same pair yields bit-identical
//! values regardless of thread count, the contract every Monte Carlo loop in
//! the crate builds on.

use serde::{Deserialize, Serialize};

use crate::exec::{map_chunks, RunningStats};
use crate::rng::{SeedPlan, Stream};
use crate::{Error, Result};

/// Distribution family of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Univariate Normal IID observations with known variance.
    NormalIID,
    /// One observation per coordinate from N(theta, sigma2 * I_m); rows of a
    /// panel are independent repetitions of the m-vector.
    MultiNormalIso,
    /// Univariate Laplace IID; `sigma2` is the variance (scale b with
    /// variance 2 b^2, so b = sqrt(sigma2 / 2)).
    LaplaceIID,
    /// Univariate Uniform on [0, theta]; theta is the upper endpoint.
    UniformIID,
    /// Linear regression y = x' beta + u with NIID(0, sigma2) noise. Samples
    /// carry y in column 0 and the design (intercept first) in the rest.
    LinearRegressionNIID,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::NormalIID => "normal-iid",
            ModelKind::MultiNormalIso => "multinormal-iso",
            ModelKind::LaplaceIID => "laplace-iid",
            ModelKind::UniformIID => "uniform-iid",
            ModelKind::LinearRegressionNIID => "linear-regression-niid",
        }
    }
}

/// A parametric sampling law with its true parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticalModel {
    pub kind: ModelKind,
    /// True parameter vector: the mean(s), the Uniform endpoint, or the
    /// regression coefficients.
    pub theta_star: Vec<f64>,
    /// Known variance where applicable (Normal kinds, Laplace, regression
    /// noise). Ignored by Uniform.
    pub sigma2: f64,
    /// Sample size: observations per coordinate (rows).
    pub n: usize,
}

impl StatisticalModel {
    pub fn new(kind: ModelKind, theta_star: Vec<f64>, sigma2: f64, n: usize) -> Result<Self> {
        let model = StatisticalModel {
            kind,
            theta_star,
            sigma2,
            n,
        };
        model.validate()?;
        Ok(model)
    }

    /// Univariate Normal with known variance.
    pub fn normal(theta: f64, sigma2: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::NormalIID, vec![theta], sigma2, n)
    }

    /// Isotropic multivariate Normal, one observation per coordinate per row.
    pub fn multinormal(theta: Vec<f64>, sigma2: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::MultiNormalIso, theta, sigma2, n)
    }

    pub fn laplace(theta: f64, sigma2: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::LaplaceIID, vec![theta], sigma2, n)
    }

    pub fn uniform(theta: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::UniformIID, vec![theta], 1.0, n)
    }

    pub fn regression(beta: Vec<f64>, sigma2: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::LinearRegressionNIID, beta, sigma2, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("sample size n must be >= 1"));
        }
        if self.theta_star.is_empty() {
            return Err(Error::config("theta_star must be nonempty"));
        }
        if self.theta_star.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("theta_star must be finite"));
        }
        match self.kind {
            ModelKind::NormalIID | ModelKind::LaplaceIID => {
                if self.theta_star.len() != 1 {
                    return Err(Error::config(format!(
                        "{} is univariate; theta_star has length {}",
                        self.kind.name(),
                        self.theta_star.len()
                    )));
                }
                if self.sigma2 <= 0.0 {
                    return Err(Error::config("sigma2 must be positive"));
                }
            }
            ModelKind::UniformIID => {
                if self.theta_star.len() != 1 {
                    return Err(Error::config("uniform-iid is univariate"));
                }
                if self.theta_star[0] <= 0.0 {
                    return Err(Error::config(
                        "uniform-iid needs a positive upper endpoint theta",
                    ));
                }
            }
            ModelKind::MultiNormalIso => {
                if self.sigma2 <= 0.0 {
                    return Err(Error::config("sigma2 must be positive"));
                }
            }
            ModelKind::LinearRegressionNIID => {
                if self.sigma2 < 0.0 {
                    return Err(Error::config("regression noise variance must be >= 0"));
                }
                if self.n <= self.theta_star.len() {
                    return Err(Error::config(format!(
                        "regression needs n > number of coefficients ({} <= {})",
                        self.n,
                        self.theta_star.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parameter dimension m.
    pub fn param_dim(&self) -> usize {
        self.theta_star.len()
    }

    /// Columns of a drawn sample matrix.
    pub fn sample_cols(&self) -> usize {
        match self.kind {
            ModelKind::NormalIID | ModelKind::LaplaceIID | ModelKind::UniformIID => 1,
            ModelKind::MultiNormalIso => self.theta_star.len(),
            // y plus the design columns.
            ModelKind::LinearRegressionNIID => self.theta_star.len() + 1,
        }
    }

    /// Same model with the parameter replaced (used when sweeping risk grids).
    pub fn at_theta(&self, theta: &[f64]) -> Result<Self> {
        Self::new(self.kind, theta.to_vec(), self.sigma2, self.n)
    }
}

/// Row-major matrix of draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn from_vec(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::data(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { data, rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Per-column arithmetic means.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (c, m) in means.iter_mut().enumerate() {
                *m += self.get(r, c);
            }
        }
        for m in &mut means {
            *m /= self.rows as f64;
        }
        means
    }
}

/// A seeded draw together with the model that generated it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub values: Matrix,
    pub model: StatisticalModel,
    pub seed: u64,
}

/// Fills `out` (rows x cols) with draws from the model, consuming `stream`.
fn fill_draws(model: &StatisticalModel, stream: &mut Stream, out: &mut Matrix) {
    let sigma = model.sigma2.sqrt();
    match model.kind {
        ModelKind::NormalIID => {
            let theta = model.theta_star[0];
            for r in 0..out.rows() {
                out.set(r, 0, theta + sigma * stream.normal());
            }
        }
        ModelKind::MultiNormalIso => {
            for r in 0..out.rows() {
                for (c, theta) in model.theta_star.iter().enumerate() {
                    out.set(r, c, theta + sigma * stream.normal());
                }
            }
        }
        ModelKind::LaplaceIID => {
            let theta = model.theta_star[0];
            let b = (model.sigma2 / 2.0).sqrt();
            for r in 0..out.rows() {
                out.set(r, 0, theta + stream.laplace(b));
            }
        }
        ModelKind::UniformIID => {
            let theta = model.theta_star[0];
            for r in 0..out.rows() {
                out.set(r, 0, theta * stream.uniform());
            }
        }
        ModelKind::LinearRegressionNIID => {
            let beta = &model.theta_star;
            for r in 0..out.rows() {
                // Design row: intercept then standard Normal regressors.
                let mut xb = beta[0];
                out.set(r, 1, 1.0);
                for (j, bj) in beta.iter().enumerate().skip(1) {
                    let x = stream.normal();
                    out.set(r, 1 + j, x);
                    xb += bj * x;
                }
                let noise = if model.sigma2 > 0.0 {
                    sigma * stream.normal()
                } else {
                    0.0
                };
                out.set(r, 0, xb + noise);
            }
        }
    }
}

/// Internal fast path: draw the value matrix for one replication stream.
pub(crate) fn draw_matrix(model: &StatisticalModel, stream: &mut Stream) -> Matrix {
    let mut out = Matrix::zeros(model.n, model.sample_cols());
    fill_draws(model, stream, &mut out);
    out
}

/// Draws an n-row sample from the model; deterministic in `(model, seed)`.
pub fn draw_sample(model: &StatisticalModel, seed: u64) -> Result<Sample> {
    model.validate()?;
    let mut stream = Stream::new(seed);
    let values = draw_matrix(model, &mut stream);
    // Fail loudly rather than let a non-finite draw poison an MC average.
    if let Some(bad) = values.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::data(format!(
            "sampler produced non-finite value at flat index {bad}"
        )));
    }
    Ok(Sample {
        values,
        model: model.clone(),
        seed,
    })
}

/// Draws a panel of `n_periods` independent m-vectors from an isotropic
/// multivariate Normal. `n_periods = 1` coincides in law with `draw_sample`.
pub fn draw_panel(model: &StatisticalModel, n_periods: usize, seed: u64) -> Result<Sample> {
    if model.kind != ModelKind::MultiNormalIso {
        return Err(Error::config(format!(
            "draw_panel requires multinormal-iso, got {}",
            model.kind.name()
        )));
    }
    let panel = StatisticalModel::new(model.kind, model.theta_star.clone(), model.sigma2, n_periods)?;
    draw_sample(&panel, seed)
}

/// Empirical sampling distribution of a statistic over seeded replications.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl EmpiricalDistribution {
    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased variance estimate.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Order-statistic quantile with linear interpolation, q in [0, 1].
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let q = q.clamp(0.0, 1.0);
        let h = q * (n - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        if lo == hi {
            self.sorted[lo]
        } else {
            let frac = h - lo as f64;
            self.sorted[lo] * (1.0 - frac) + self.sorted[hi] * frac
        }
    }
}

/// Evaluates `statistic` on `reps` independent samples and summarizes the
/// resulting sampling distribution.
///
/// A non-finite statistic value aborts with a data error naming the
/// replication index that produced it.
pub fn empirical_sampling_distribution<F>(
    model: &StatisticalModel,
    statistic: F,
    reps: u64,
    plan: &SeedPlan,
) -> Result<EmpiricalDistribution>
where
    F: Fn(&Sample) -> f64 + Sync,
{
    empirical_sampling_distribution_threaded(model, statistic, reps, plan, 1)
}

/// As [`empirical_sampling_distribution`], fanning chunks out over `threads`
/// workers. The result is identical for every worker count.
pub fn empirical_sampling_distribution_threaded<F>(
    model: &StatisticalModel,
    statistic: F,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<EmpiricalDistribution>
where
    F: Fn(&Sample) -> f64 + Sync,
{
    model.validate()?;
    if reps < 2 {
        return Err(Error::config("empirical distribution requires reps >= 2"));
    }
    let chunks = map_chunks(plan, reps, threads, |_c, range| {
        let mut values = Vec::with_capacity((range.end - range.start) as usize);
        let mut stats = RunningStats::new();
        for i in range {
            let seed = crate::rng::stream_seed(plan.master_seed, i);
            let sample = draw_sample(model, seed)?;
            let y = statistic(&sample);
            if !y.is_finite() {
                return Err(Error::data(format!(
                    "statistic returned non-finite value at replication {i}"
                )));
            }
            values.push(y);
            stats.push(y);
        }
        Ok((values, stats))
    })?;

    let mut all = Vec::with_capacity(reps as usize);
    let mut stats = RunningStats::new();
    for (values, s) in chunks {
        all.extend_from_slice(&values);
        stats.merge(&s);
    }
    all.sort_by(f64::total_cmp);
    Ok(EmpiricalDistribution {
        sorted: all,
        mean: stats.mean(),
        variance: stats.variance(),
    })
}
