//! The constant-estimator demonstration: squared-error risk of the sample
//! mean against a data-ignoring constant rule over a grid straddling the
//! constant, plus the sample-size contrast that separates them.

use crate::estimator::{EstimatorSpec, CRYSTAL_BALL_DEFAULT};
use crate::loss::LossFunction;
use crate::model::StatisticalModel;
use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::risk::{risk_curves, scalar_grid};
use crate::rng::SeedPlan;
use crate::{Error, Result};

/// Runs the comparison at sample size `n` over `theta_grid` (which must
/// straddle the constant), with an inner window of half-width
/// `lambda / sqrt(n)` where the constant rule must win outright.
pub fn run_crystal_ball(
    n: usize,
    theta_grid: &[f64],
    lambda: f64,
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    run_crystal_ball_with_constant(n, CRYSTAL_BALL_DEFAULT, theta_grid, lambda, reps, seed, threads)
}

pub fn run_crystal_ball_with_constant(
    n: usize,
    constant: f64,
    theta_grid: &[f64],
    lambda: f64,
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    if theta_grid.is_empty()
        || theta_grid[0] >= constant
        || *theta_grid.last().unwrap() <= constant
    {
        return Err(Error::config(format!(
            "theta grid must straddle the constant {constant}"
        )));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::config("lambda must lie in (0, 1)"));
    }
    let plan = SeedPlan::with_seed(seed);
    let estimators = [
        EstimatorSpec::LSMean,
        EstimatorSpec::CrystalBall { constant },
    ];

    let model = StatisticalModel::normal(0.0, 1.0, n)?;
    let mc = risk_curves(
        &model,
        &scalar_grid(theta_grid),
        &estimators,
        &LossFunction::Square,
        reps,
        &plan,
        threads,
    )?;
    let mut mse = Table::new(
        "mse",
        &["theta", "mse_mean", "stderr_mean", "mse_cb", "stderr_cb"],
    );
    for p in 0..theta_grid.len() {
        mse.push_row(vec![
            Cell::Num(mc.curves[0].axis[p]),
            Cell::Num(mc.curves[0].risk[p]),
            Cell::Num(mc.curves[0].stderr[p]),
            Cell::Num(mc.curves[1].risk[p]),
            Cell::Num(mc.curves[1].stderr[p]),
        ]);
    }

    // Sample-size contrast at the grid endpoint farthest from the constant:
    // the mean's risk shrinks with n, the constant rule's does not.
    let theta_ref = if (theta_grid[0] - constant).abs() > (theta_grid.last().unwrap() - constant).abs()
    {
        theta_grid[0]
    } else {
        *theta_grid.last().unwrap()
    };
    let mut contrast = Table::new(
        "contrast",
        &["n", "theta_ref", "mse_mean", "stderr_mean", "mse_cb"],
    );
    for factor in [1usize, 4] {
        let n_here = n * factor;
        let model_here = StatisticalModel::normal(0.0, 1.0, n_here)?;
        let mc_here = risk_curves(
            &model_here,
            &scalar_grid(&[theta_ref]),
            &estimators,
            &LossFunction::Square,
            reps,
            &plan,
            threads,
        )?;
        contrast.push_row(vec![
            Cell::Int(n_here as i64),
            Cell::Num(theta_ref),
            Cell::Num(mc_here.curves[0].risk[0]),
            Cell::Num(mc_here.curves[0].stderr[0]),
            Cell::Num(mc_here.curves[1].risk[0]),
        ]);
    }

    let mut config = Config::new();
    config.insert("n".into(), ParamValue::UInt(n as u64));
    config.insert("constant".into(), ParamValue::Real(constant));
    config.insert("theta_grid".into(), ParamValue::RealList(theta_grid.to_vec()));
    config.insert("lambda".into(), ParamValue::Real(lambda));
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));
    config.insert("sigma2".into(), ParamValue::Real(1.0));

    let tables = vec![mse, contrast];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "crystal-ball".into(),
        config,
        tables,
        verdicts,
    })
}

/// Midpoints of grid intervals where `mse_mean - mse_cb` changes sign.
fn sign_changes(theta: &[f64], diff: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..diff.len() {
        if diff[i - 1].signum() != diff[i].signum() && diff[i - 1] != 0.0 {
            out.push(0.5 * (theta[i - 1] + theta[i]));
        }
    }
    out
}

pub(super) fn verdicts(config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let mse = tables
        .iter()
        .find(|t| t.name == "mse")
        .ok_or_else(|| Error::data("crystal-ball report is missing the mse table"))?;
    let contrast = tables
        .iter()
        .find(|t| t.name == "contrast")
        .ok_or_else(|| Error::data("crystal-ball report is missing the contrast table"))?;
    let n = config["n"].as_u64()? as f64;
    let constant = config["constant"].as_f64()?;
    let lambda = config["lambda"].as_f64()?;
    let mut out = Vec::new();

    let theta = mse.num_column("theta")?;
    let mean_risk = mse.num_column("mse_mean")?;
    let mean_se = mse.num_column("stderr_mean")?;
    let cb_risk = mse.num_column("mse_cb")?;
    let grid_step = theta
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);

    // The mean's curve is flat at 1/n.
    {
        let target = 1.0 / n;
        let mut pass = true;
        let mut worst = 0.0f64;
        for (r, se) in mean_risk.iter().zip(&mean_se) {
            let dev = (r - target).abs();
            worst = worst.max(dev / se.max(f64::MIN_POSITIVE));
            if dev > 3.0 * se {
                pass = false;
            }
        }
        out.push(Verdict::new(
            "mean-mse-flat-at-one-over-n",
            "the sample mean of n unit-variance observations has squared-error risk 1/n at every theta",
            pass,
            format!("worst |mse - 1/n| / stderr = {worst:.2}"),
        ));
    }

    // Crossing boundaries sit within one grid step of constant +- 1/sqrt(n).
    {
        let diff: Vec<f64> = mean_risk
            .iter()
            .zip(&cb_risk)
            .map(|(m, c)| m - c)
            .collect();
        let boundaries = sign_changes(&theta, &diff);
        let expected = [constant - 1.0 / n.sqrt(), constant + 1.0 / n.sqrt()];
        let pass = boundaries.len() == 2
            && boundaries
                .iter()
                .zip(&expected)
                .all(|(b, e)| (b - e).abs() <= grid_step);
        out.push(Verdict::new(
            "crossing-boundary-at-one-over-sqrt-n",
            "(theta - constant)^2 = 1/n exactly at theta = constant +- 1/sqrt(n)",
            pass,
            format!("boundaries {boundaries:?} vs expected {expected:?} (step {grid_step})"),
        ));
    }

    // Inside the lambda window the constant rule wins outright.
    {
        let half = lambda / n.sqrt();
        let cap = lambda * lambda / n;
        let mut checked = 0usize;
        let mut pass = true;
        for i in 0..theta.len() {
            if (theta[i] - constant).abs() <= half {
                checked += 1;
                if cb_risk[i] > cap + 1e-12 || mean_risk[i] - cb_risk[i] <= 3.0 * mean_se[i] {
                    pass = false;
                }
            }
        }
        pass = pass && checked > 0;
        out.push(Verdict::new(
            "constant-rule-wins-inside-lambda-window",
            "for |theta - constant| <= lambda/sqrt(n) the constant rule's risk is at most lambda^2/n < 1/n",
            pass,
            format!("{checked} grid points inside the window"),
        ));
    }

    // Larger n helps the mean and does nothing for the constant rule.
    {
        let m1 = contrast.num(0, "mse_mean")?;
        let m4 = contrast.num(1, "mse_mean")?;
        let c1 = contrast.num(0, "mse_cb")?;
        let c4 = contrast.num(1, "mse_cb")?;
        let pass = m4 < 0.5 * m1 && c1 == c4;
        out.push(Verdict::new(
            "mean-improves-with-n-constant-rule-does-not",
            "the mean's risk is 1/n while the constant rule's risk (theta - constant)^2 is free of n",
            pass,
            format!("mean: {m1:.3e} -> {m4:.3e}; constant rule: {c1:.6e} -> {c4:.6e}"),
        ));
    }

    Ok(out)
}
