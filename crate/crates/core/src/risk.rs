//! Monte Carlo risk estimation over parameter grids.
//!
//! The risk of an estimator at a parameter point is the Monte Carlo average
//! of the loss over seeded replications; a [`RiskCurve`] collects those
//! averages over an explicit grid. Grid sweeps share per-replication seeds
//! across points and across estimators (common random numbers), which keeps
//! curves smooth in theta and sharpens paired comparisons.
//!
//! Universal statements ("for every theta") are only ever evaluated on the
//! explicit finite grid carried by the curve, and reports say so: the
//! dominance verdicts here are grid-dominance among named candidates, nothing
//! stronger.

use serde::{Deserialize, Serialize};

use crate::estimator::EstimatorSpec;
use crate::exec::{map_chunks, RunningStats};
use crate::loss::{loss_eval, LossFunction};
use crate::model::{draw_matrix, StatisticalModel};
use crate::quad::trapezoid_weights;
use crate::rng::SeedPlan;
use crate::{Error, Result};

/// A Monte Carlo risk value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub risk: f64,
    pub stderr: f64,
}

/// Provenance carried by every curve; rebuilding with identical meta is
/// bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub estimator: String,
    pub loss: String,
    pub model: String,
    pub reps: u64,
    pub master_seed: u64,
    pub chunk_size: u64,
}

/// Monte Carlo risk over a parameter grid.
///
/// `axis` is the scalar reporting coordinate (theta itself for univariate
/// parameters, the Euclidean norm for vector sweeps) and must be strictly
/// increasing; `points` are the full parameter vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub axis: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub risk: Vec<f64>,
    pub stderr: Vec<f64>,
    pub meta: CurveMeta,
}

impl RiskCurve {
    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    fn same_grid(&self, other: &RiskCurve) -> bool {
        self.axis == other.axis && self.loss_kind() == other.loss_kind()
    }

    fn loss_kind(&self) -> &str {
        &self.meta.loss
    }
}

/// Scalar reporting coordinate for a grid point.
fn axis_value(point: &[f64]) -> f64 {
    if point.len() == 1 {
        point[0]
    } else {
        point.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn tag_replication(err: Error, rep: u64) -> Error {
    match err {
        Error::Config(m) => Error::Config(format!("{m} (replication {rep})")),
        Error::Data(m) => Error::Data(format!("{m} (replication {rep})")),
        Error::Numerical(m) => Error::Numerical(format!("{m} (replication {rep})")),
    }
}

/// Per-point evaluation shared by every risk loop: one pass over the
/// replications, pushing the loss of every estimator and of every estimator
/// pair difference into Welford accumulators. Chunked per the seed plan so
/// the reduction is worker-count invariant.
fn sweep_losses(
    model_at_theta: &StatisticalModel,
    theta: &[f64],
    estimators: &[EstimatorSpec],
    loss: &LossFunction,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<(Vec<RunningStats>, Vec<RunningStats>)> {
    let k = estimators.len();
    let n_pairs = k * (k - 1) / 2;
    let chunks = map_chunks(plan, reps, threads, |_c, range| {
        let mut per_est = vec![RunningStats::new(); k];
        let mut per_pair = vec![RunningStats::new(); n_pairs];
        let mut losses = vec![0.0; k];
        for i in range {
            let mut stream = plan.stream(i);
            let sample = draw_matrix(model_at_theta, &mut stream);
            for (e, spec) in estimators.iter().enumerate() {
                let est = spec.eval(&sample).map_err(|err| tag_replication(err, i))?;
                let l = loss_eval(loss, &est.value, theta).map_err(|err| tag_replication(err, i))?;
                if !l.is_finite() {
                    return Err(Error::data(format!(
                        "non-finite loss for {} at replication {i}",
                        spec.name()
                    )));
                }
                losses[e] = l;
                per_est[e].push(l);
            }
            let mut pair = 0;
            for a in 0..k {
                for b in a + 1..k {
                    per_pair[pair].push(losses[a] - losses[b]);
                    pair += 1;
                }
            }
        }
        Ok((per_est, per_pair))
    })?;

    let mut est_stats = vec![RunningStats::new(); k];
    let mut pair_stats = vec![RunningStats::new(); n_pairs];
    for (per_est, per_pair) in chunks {
        for (acc, s) in est_stats.iter_mut().zip(&per_est) {
            acc.merge(s);
        }
        for (acc, s) in pair_stats.iter_mut().zip(&per_pair) {
            acc.merge(s);
        }
    }
    Ok((est_stats, pair_stats))
}

fn check_reps(reps: u64) -> Result<()> {
    if reps < 100 {
        return Err(Error::config("risk estimation requires reps >= 100"));
    }
    Ok(())
}

/// Monte Carlo risk of one estimator at one parameter point: the average of
/// `loss(estimator(sample), theta)` over samples drawn with the model's
/// parameter set to `theta`.
pub fn risk_mc(
    model: &StatisticalModel,
    theta: &[f64],
    estimator: &EstimatorSpec,
    loss: &LossFunction,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<RiskEstimate> {
    check_reps(reps)?;
    let at = model.at_theta(theta)?;
    let (stats, _) = sweep_losses(&at, theta, std::slice::from_ref(estimator), loss, reps, plan, threads)?;
    Ok(RiskEstimate {
        risk: stats[0].mean(),
        stderr: stats[0].stderr(),
    })
}

/// Builds a risk curve over a grid of parameter points with common random
/// numbers: replication `i` reuses the same stream at every grid point.
pub fn risk_curve(
    model: &StatisticalModel,
    grid: &[Vec<f64>],
    estimator: &EstimatorSpec,
    loss: &LossFunction,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<RiskCurve> {
    let mut curves = risk_curves(model, grid, std::slice::from_ref(estimator), loss, reps, plan, threads)?;
    Ok(curves.curves.remove(0))
}

/// Curves for several estimators evaluated on shared samples, plus the
/// paired per-point difference statistics for every estimator pair.
#[derive(Debug, Clone)]
pub struct MultiCurves {
    pub curves: Vec<RiskCurve>,
    /// `paired_diff[p][pair_index(a, b, k)]` is the Welford accumulator of
    /// per-replication loss differences (estimator a minus estimator b) at
    /// grid point `p`.
    pub paired_diff: Vec<Vec<RunningStats>>,
    pub n_estimators: usize,
}

/// Index of the (a, b) pair, a < b, among k estimators.
pub fn pair_index(a: usize, b: usize, k: usize) -> usize {
    debug_assert!(a < b && b < k);
    a * k - a * (a + 1) / 2 + (b - a - 1)
}

impl MultiCurves {
    /// Paired difference (mean, stderr) of estimators `a - b` at point `p`.
    pub fn diff(&self, p: usize, a: usize, b: usize) -> (f64, f64) {
        if a == b {
            return (0.0, 0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let s = &self.paired_diff[p][pair_index(lo, hi, self.n_estimators)];
        (sign * s.mean(), s.stderr())
    }
}

/// Validates the grid and returns the axis values.
fn grid_axis(model: &StatisticalModel, grid: &[Vec<f64>]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::config("risk grid must be nonempty"));
    }
    let dim = model.param_dim();
    for p in grid {
        if p.len() != dim {
            return Err(Error::data(format!(
                "grid point dimension {} does not match parameter dimension {dim}",
                p.len()
            )));
        }
    }
    let axis: Vec<f64> = grid.iter().map(|p| axis_value(p)).collect();
    if axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("risk grid axis must be strictly increasing"));
    }
    Ok(axis)
}

/// Evaluates several estimators over a grid on shared draws.
pub fn risk_curves(
    model: &StatisticalModel,
    grid: &[Vec<f64>],
    estimators: &[EstimatorSpec],
    loss: &LossFunction,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<MultiCurves> {
    check_reps(reps)?;
    if estimators.is_empty() {
        return Err(Error::config("risk_curves requires at least one estimator"));
    }
    let axis = grid_axis(model, grid)?;

    let k = estimators.len();
    let mut risks = vec![Vec::with_capacity(grid.len()); k];
    let mut stderrs = vec![Vec::with_capacity(grid.len()); k];
    let mut paired = Vec::with_capacity(grid.len());

    for theta in grid {
        let at = model.at_theta(theta)?;
        let (est_stats, pair_stats) = sweep_losses(&at, theta, estimators, loss, reps, plan, threads)?;
        for (e, s) in est_stats.iter().enumerate() {
            risks[e].push(s.mean());
            stderrs[e].push(s.stderr());
        }
        paired.push(pair_stats);
    }

    let curves = estimators
        .iter()
        .enumerate()
        .map(|(e, spec)| RiskCurve {
            axis: axis.clone(),
            points: grid.to_vec(),
            risk: risks[e].clone(),
            stderr: stderrs[e].clone(),
            meta: CurveMeta {
                estimator: spec.name().to_string(),
                loss: loss.name().to_string(),
                model: model.kind.name().to_string(),
                reps,
                master_seed: plan.master_seed,
                chunk_size: plan.chunk_size,
            },
        })
        .collect();

    Ok(MultiCurves {
        curves,
        paired_diff: paired,
        n_estimators: k,
    })
}

/// Frequentist squared-error summary at the model's true parameter.
///
/// All three fields come from the same replication sums, so
/// `mse = variance + ||bias||^2` holds to floating-point rounding and the
/// `mse` field agrees bit for bit with [`risk_mc`] under the squared loss at
/// the same seed plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseBias {
    pub mse: f64,
    pub bias: Vec<f64>,
    pub variance: f64,
}

/// Monte Carlo MSE / bias / variance of an estimator at `theta_star`.
pub fn mse_bias_at_true(
    model: &StatisticalModel,
    estimator: &EstimatorSpec,
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<MseBias> {
    check_reps(reps)?;
    model.validate()?;
    let theta = model.theta_star.clone();
    let dim_loss = if theta.len() == 1 {
        LossFunction::Square
    } else {
        LossFunction::SteinSum
    };

    let chunks = map_chunks(plan, reps, threads, |_c, range| {
        let mut sq = RunningStats::new();
        let mut dev: Vec<RunningStats> = vec![RunningStats::new(); theta.len()];
        for i in range {
            let mut stream = plan.stream(i);
            let sample = draw_matrix(model, &mut stream);
            let est = estimator.eval(&sample).map_err(|err| tag_replication(err, i))?;
            let l = loss_eval(&dim_loss, &est.value, &theta).map_err(|err| tag_replication(err, i))?;
            if !l.is_finite() {
                return Err(Error::data(format!("non-finite loss at replication {i}")));
            }
            sq.push(l);
            for (d, (e, t)) in dev.iter_mut().zip(est.value.iter().zip(&theta)) {
                d.push(e - t);
            }
        }
        Ok((sq, dev))
    })?;

    let mut sq = RunningStats::new();
    let mut dev = vec![RunningStats::new(); theta.len()];
    for (csq, cdev) in chunks {
        sq.merge(&csq);
        for (acc, s) in dev.iter_mut().zip(&cdev) {
            acc.merge(s);
        }
    }
    let mse = sq.mean();
    let bias: Vec<f64> = dev.iter().map(|d| d.mean()).collect();
    let bias_sq: f64 = bias.iter().map(|b| b * b).sum();
    Ok(MseBias {
        mse,
        bias,
        variance: mse - bias_sq,
    })
}

/// The two readings of "mean squared error" side by side: the scalar at the
/// true parameter and the whole curve over a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantifierContrast {
    /// Squared-error risk at theta = theta_star.
    pub at_theta_star: RiskEstimate,
    pub theta_star: Vec<f64>,
    /// Squared-error risk over the explored grid.
    pub curve: RiskCurve,
    /// Index of the grid minimum (first index on ties).
    pub min_index: usize,
    /// Axis value of the grid minimum; need not be anywhere near theta_star.
    pub min_axis: f64,
    /// Whether theta_star's axis value lies inside the grid's span.
    pub theta_star_in_range: bool,
}

/// Computes both MSE readings for one estimator.
pub fn quantifier_contrast(
    model: &StatisticalModel,
    estimator: &EstimatorSpec,
    grid: &[Vec<f64>],
    reps: u64,
    plan: &SeedPlan,
    threads: usize,
) -> Result<QuantifierContrast> {
    let loss = if model.param_dim() == 1 {
        LossFunction::Square
    } else {
        LossFunction::SteinSum
    };
    let curve = risk_curve(model, grid, estimator, &loss, reps, plan, threads)?;
    let scalar = risk_mc(model, &model.theta_star, estimator, &loss, reps, plan, threads)?;
    let mut min_index = 0;
    for (i, r) in curve.risk.iter().enumerate() {
        if *r < curve.risk[min_index] {
            min_index = i;
        }
    }
    let star_axis = axis_value(&model.theta_star);
    let in_range = star_axis >= curve.axis[0] && star_axis <= curve.axis[curve.len() - 1];
    Ok(QuantifierContrast {
        at_theta_star: scalar,
        theta_star: model.theta_star.clone(),
        min_axis: curve.axis[min_index],
        min_index,
        curve,
        theta_star_in_range: in_range,
    })
}

/// Outcome of a pairwise grid comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominanceVerdict {
    ADominates,
    BDominates,
    Cross,
    Indistinguishable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominancePoint {
    pub theta: f64,
    /// risk(A) - risk(B).
    pub diff: f64,
    pub significant: bool,
}

/// Pairwise grid-dominance report. "Dominates" always means grid-dominance
/// on the compared points, not the continuum property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub verdict: DominanceVerdict,
    pub per_point: Vec<DominancePoint>,
    pub tolerance_rule: String,
}

/// Compares two curves on the same grid and loss. A point is significant
/// when |diff| exceeds 3 combined standard errors; A dominates when no point
/// favors B and at least one significant point strictly favors A.
pub fn dominance_on_grid(a: &RiskCurve, b: &RiskCurve) -> Result<DominanceReport> {
    if !a.same_grid(b) {
        return Err(Error::data(
            "dominance comparison requires identical grids and loss kinds",
        ));
    }
    let mut per_point = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        let diff = a.risk[i] - b.risk[i];
        let band = 3.0 * (a.stderr[i] * a.stderr[i] + b.stderr[i] * b.stderr[i]).sqrt();
        per_point.push(DominancePoint {
            theta: a.axis[i],
            diff,
            significant: diff.abs() > band,
        });
    }
    let any_significant = per_point.iter().any(|p| p.significant);
    let all_le = per_point.iter().all(|p| p.diff <= 0.0);
    let all_ge = per_point.iter().all(|p| p.diff >= 0.0);
    let sig_neg = per_point.iter().any(|p| p.significant && p.diff < 0.0);
    let sig_pos = per_point.iter().any(|p| p.significant && p.diff > 0.0);

    let verdict = if !any_significant {
        DominanceVerdict::Indistinguishable
    } else if all_le && sig_neg {
        DominanceVerdict::ADominates
    } else if all_ge && sig_pos {
        DominanceVerdict::BDominates
    } else {
        DominanceVerdict::Cross
    };

    Ok(DominanceReport {
        verdict,
        per_point,
        tolerance_rule: "significant iff |riskA - riskB| > 3*sqrt(stderrA^2 + stderrB^2)".to_string(),
    })
}

/// Grid maximum of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxRisk {
    pub index: usize,
    pub theta_at_max: f64,
    pub risk: f64,
    /// Tie handling, recorded in output.
    pub tie_rule: String,
}

/// Maximum risk over the grid; ties break toward the smallest theta.
pub fn max_risk(curve: &RiskCurve) -> Result<MaxRisk> {
    if curve.is_empty() {
        return Err(Error::data("max_risk requires a nonempty curve"));
    }
    let mut idx = 0;
    for (i, r) in curve.risk.iter().enumerate() {
        if *r > curve.risk[idx] {
            idx = i;
        }
    }
    Ok(MaxRisk {
        index: idx,
        theta_at_max: curve.axis[idx],
        risk: curve.risk[idx],
        tie_rule: "ties break toward the smallest theta".to_string(),
    })
}

/// Weighted trapezoidal integral of the risk against a prior given as
/// nonnegative weights on the same grid. Weights are combined with
/// trapezoid cell widths and renormalized to total mass one.
pub fn bayes_risk(curve: &RiskCurve, prior_weights: &[f64]) -> Result<f64> {
    if prior_weights.len() != curve.len() {
        return Err(Error::data(
            "prior weight vector length does not match the grid",
        ));
    }
    if prior_weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::data("prior weights must be nonnegative and finite"));
    }
    let trap = trapezoid_weights(&curve.axis);
    let masses: Vec<f64> = prior_weights.iter().zip(&trap).map(|(w, t)| w * t).collect();
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(Error::data("prior has zero total mass on the grid"));
    }
    Ok(masses
        .iter()
        .zip(&curve.risk)
        .map(|(m, r)| m * r)
        .sum::<f64>()
        / total)
}

/// Rule-selection criterion over a finite candidate set.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionCriterion {
    /// Smallest grid maximum.
    Minimax,
    /// Smallest prior-weighted risk, prior given on the shared grid.
    BayesWithPrior(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub winner: usize,
    pub scores: Vec<f64>,
    pub tie_rule: String,
}

/// Picks the best candidate under the criterion; ties break to the first
/// index in candidate order.
pub fn select_rule(candidates: &[RiskCurve], criterion: &SelectionCriterion) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::data("select_rule requires at least one candidate"));
    }
    for c in &candidates[1..] {
        if !candidates[0].same_grid(c) {
            return Err(Error::data(
                "select_rule candidates must share grid and loss",
            ));
        }
    }
    let scores: Vec<f64> = match criterion {
        SelectionCriterion::Minimax => candidates
            .iter()
            .map(|c| max_risk(c).map(|m| m.risk))
            .collect::<Result<_>>()?,
        SelectionCriterion::BayesWithPrior(w) => candidates
            .iter()
            .map(|c| bayes_risk(c, w))
            .collect::<Result<_>>()?,
    };
    let mut winner = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s < scores[winner] {
            winner = i;
        }
    }
    Ok(Selection {
        winner,
        scores,
        tie_rule: "ties break to the first candidate".to_string(),
    })
}

/// Grid shadow of the analytic regularity conditions on a risk function:
/// finiteness at every grid point and no jump between adjacent points larger
/// than `max_slope` per unit of theta. A passing check says nothing about
/// the continuum; a failing one disproves regularity outright.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityCheck {
    pub finite_everywhere: bool,
    /// Largest |risk step| / |theta step| between adjacent grid points.
    pub max_observed_slope: f64,
    pub within_bound: bool,
}

pub fn grid_regularity(curve: &RiskCurve, max_slope: f64) -> Result<RegularityCheck> {
    if curve.is_empty() {
        return Err(Error::data("regularity check requires a nonempty curve"));
    }
    let finite = curve.risk.iter().all(|r| r.is_finite());
    let mut observed = 0.0f64;
    for i in 1..curve.len() {
        let dr = (curve.risk[i] - curve.risk[i - 1]).abs();
        let dt = curve.axis[i] - curve.axis[i - 1];
        observed = observed.max(dr / dt);
    }
    Ok(RegularityCheck {
        finite_everywhere: finite,
        max_observed_slope: observed,
        within_bound: finite && observed <= max_slope,
    })
}

/// Convenience: a univariate grid as parameter points.
pub fn scalar_grid(values: &[f64]) -> Vec<Vec<f64>> {
    values.iter().map(|v| vec![*v]).collect()
}

/// The Stein sweep grid: theta = (r, 0, ..., 0) for each norm r.
pub fn norm_grid(norms: &[f64], dim: usize) -> Vec<Vec<f64>> {
    norms
        .iter()
        .map(|r| {
            let mut p = vec![0.0; dim];
            p[0] = *r;
            p
        })
        .collect()
}
