//! Pivots, confidence intervals, the one-sided Normal mean test, and their
//! error probabilities.
//!
//! The pivot `sqrt(n) (xbar - theta) / sigma` is standard Normal when theta
//! is the generating value; replacing theta by a hypothesized value shifts
//! the law to `N(delta, 1)` with `delta = sqrt(n) (theta_gen - theta_hyp) /
//! sigma`. Everything here (critical values, p-values, power, coverage)
//! reduces to that one distributional fact plus the Normal CDF.

use serde::{Deserialize, Serialize};

use crate::exec::map_chunks;
use crate::model::{draw_matrix, StatisticalModel};
use crate::normal;
use crate::rng::SeedPlan;
use crate::{Error, Result};

/// One-sided test of theta = theta0 against theta > theta0 under a Normal
/// model with known variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub theta0: f64,
    pub alpha: f64,
    pub n: usize,
    pub sigma2: f64,
}

impl TestSpec {
    pub fn new(theta0: f64, alpha: f64, n: usize, sigma2: f64) -> Result<Self> {
        let spec = TestSpec {
            theta0,
            alpha,
            n,
            sigma2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha must lie in (0, 1)"));
        }
        if self.n == 0 {
            return Err(Error::config("n must be >= 1"));
        }
        if self.sigma2 <= 0.0 {
            return Err(Error::config("sigma2 must be positive"));
        }
        Ok(())
    }
}

/// Outcome of the one-sided test on observed data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Observed statistic sqrt(n) (xbar - theta0) / sigma.
    pub d_obs: f64,
    /// Upper-alpha Normal critical value.
    pub c_alpha: f64,
    pub reject: bool,
    /// P(d > d_obs) under the null: the smallest alpha that would reject.
    pub p_value: f64,
}

/// Two-sided interval for the Normal mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    /// Standard error of the mean actually used for the width: sigma/sqrt(n)
    /// under known variance, or s/sqrt(n) when the caller feeds an estimate.
    /// The width is 2 c_{alpha/2} used_sd.
    pub used_sd: f64,
    pub two_sided: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, theta: f64) -> bool {
        self.lower <= theta && theta <= self.upper
    }
}

/// The pivot sqrt(n) (xbar - theta) / sigma.
pub fn pivot_value(xbar: f64, theta: f64, n: usize, sigma2: f64) -> f64 {
    (n as f64).sqrt() * (xbar - theta) / sigma2.sqrt()
}

/// Law of the test statistic centered at `theta_hyp` when data are generated
/// at `theta_gen`: Normal with this mean and unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypotheticalDistribution {
    /// delta = sqrt(n) (theta_gen - theta_hyp) / sigma.
    pub mean: f64,
    pub variance: f64,
}

pub fn hypothetical_distribution(
    theta_hyp: f64,
    theta_gen: f64,
    n: usize,
    sigma2: f64,
) -> HypotheticalDistribution {
    HypotheticalDistribution {
        mean: (n as f64).sqrt() * (theta_gen - theta_hyp) / sigma2.sqrt(),
        variance: 1.0,
    }
}

/// Two-sided (1 - alpha) interval `xbar -+ c_{alpha/2} sd / sqrt(n)`.
pub fn ci_normal(xbar: f64, n: usize, sd: f64, alpha: f64) -> Result<ConfidenceInterval> {
    if sd <= 0.0 {
        return Err(Error::config("ci_normal requires sd > 0"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config("alpha must lie in (0, 1)"));
    }
    if n == 0 {
        return Err(Error::config("n must be >= 1"));
    }
    let c = normal::upper_quantile(alpha / 2.0)?;
    let sem = sd / (n as f64).sqrt();
    Ok(ConfidenceInterval {
        lower: xbar - c * sem,
        upper: xbar + c * sem,
        alpha,
        used_sd: sem,
        two_sided: true,
    })
}

/// Empirical coverage of the known-sigma interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub coverage: f64,
    /// Binomial standard error sqrt(cov (1 - cov) / reps).
    pub stderr: f64,
    pub reps: u64,
}

/// Simulates interval coverage under a univariate Normal model: the fraction
/// of replications whose interval contains the model's true mean.
pub fn coverage_sim(
    model: &StatisticalModel,
    alpha: f64,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<CoverageEstimate> {
    model.validate()?;
    if model.kind != crate::model::ModelKind::NormalIID {
        return Err(Error::config("coverage_sim requires the normal-iid model"));
    }
    if reps < 1000 {
        return Err(Error::config("coverage_sim requires reps >= 1000"));
    }
    let theta_star = model.theta_star[0];
    let sd = model.sigma2.sqrt();
    let n = model.n;
    let c = normal::upper_quantile(alpha / 2.0)?;
    let half_width = c * sd / (n as f64).sqrt();

    let chunks = map_chunks(plan, reps, threads, |_c, range| {
        let mut hits = 0u64;
        for i in range {
            let mut stream = plan.stream(i);
            let sample = draw_matrix(model, &mut stream);
            let xbar = sample.column_means()[0];
            if (xbar - theta_star).abs() <= half_width {
                hits += 1;
            }
        }
        Ok(hits)
    })?;
    let hits: u64 = chunks.iter().sum();
    let coverage = hits as f64 / reps as f64;
    Ok(CoverageEstimate {
        coverage,
        stderr: (coverage * (1.0 - coverage) / reps as f64).sqrt(),
        reps,
    })
}

/// Runs the one-sided test on an observed sample mean.
pub fn np_test(xbar: f64, spec: &TestSpec) -> Result<TestResult> {
    spec.validate()?;
    let d_obs = pivot_value(xbar, spec.theta0, spec.n, spec.sigma2);
    let c_alpha = normal::upper_quantile(spec.alpha)?;
    Ok(TestResult {
        d_obs,
        c_alpha,
        reject: d_obs > c_alpha,
        p_value: normal::sf(d_obs),
    })
}

/// Closed-form power and type II error at an alternative theta1 > theta0:
/// `power = 1 - Phi(c_alpha - delta1)` with `delta1 = sqrt(n) (theta1 -
/// theta0) / sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub power: f64,
    pub type2: f64,
    pub delta1: f64,
}

pub fn power(theta1: f64, spec: &TestSpec) -> Result<PowerEstimate> {
    spec.validate()?;
    if theta1 <= spec.theta0 {
        return Err(Error::config(
            "power is defined for one-sided alternatives theta1 > theta0",
        ));
    }
    let delta1 = hypothetical_distribution(spec.theta0, theta1, spec.n, spec.sigma2).mean;
    let c_alpha = normal::upper_quantile(spec.alpha)?;
    let pw = 1.0 - normal::cdf(c_alpha - delta1);
    Ok(PowerEstimate {
        power: pw,
        type2: 1.0 - pw,
        delta1,
    })
}

/// Monte Carlo rejection frequency of the test when data are generated at
/// `theta_gen` (equal to theta0 for size, above it for power).
pub fn rejection_frequency_mc(
    spec: &TestSpec,
    theta_gen: f64,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<CoverageEstimate> {
    spec.validate()?;
    let model = StatisticalModel::normal(theta_gen, spec.sigma2, spec.n)?;
    let c_alpha = normal::upper_quantile(spec.alpha)?;
    let chunks = map_chunks(plan, reps, threads, |_c, range| {
        let mut rejections = 0u64;
        for i in range {
            let mut stream = plan.stream(i);
            let sample = draw_matrix(&model, &mut stream);
            let xbar = sample.column_means()[0];
            if pivot_value(xbar, spec.theta0, spec.n, spec.sigma2) > c_alpha {
                rejections += 1;
            }
        }
        Ok(rejections)
    })?;
    let hits: u64 = chunks.iter().sum();
    let freq = hits as f64 / reps as f64;
    Ok(CoverageEstimate {
        coverage: freq,
        stderr: (freq * (1.0 - freq) / reps as f64).sqrt(),
        reps,
    })
}

/// Simulated p-values of the test under the null; used for uniformity checks.
pub fn p_values_under_null(
    spec: &TestSpec,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let model = StatisticalModel::normal(spec.theta0, spec.sigma2, spec.n)?;
    let chunks = map_chunks(plan, reps, threads, |_c, range| {
        let mut ps = Vec::with_capacity((range.end - range.start) as usize);
        for i in range {
            let mut stream = plan.stream(i);
            let sample = draw_matrix(&model, &mut stream);
            let xbar = sample.column_means()[0];
            ps.push(normal::sf(pivot_value(xbar, spec.theta0, spec.n, spec.sigma2)));
        }
        Ok(ps)
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Kolmogorov-Smirnov distance of a sample from the uniform distribution on
/// [0, 1].
pub fn ks_distance_from_uniform(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::data("KS distance requires a nonempty sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, u) in sorted.iter().enumerate() {
        let upper = (i + 1) as f64 / n - u;
        let lower = u - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    Ok(d)
}

/// Asymptotic KS critical distance at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    // Kolmogorov distribution upper 1% point.
    1.627_62 / (n as f64).sqrt()
}
