//! Consistency contrast: squared-error risk at the true value as the sample
//! grows, for the mean against three rules that cannot learn (last
//! observation, first-last average, and the data-ignoring constant).

use crate::estimator::{EstimatorSpec, CRYSTAL_BALL_DEFAULT};
use crate::loss::LossFunction;
use crate::model::StatisticalModel;
use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::risk::{risk_curves, scalar_grid};
use crate::rng::SeedPlan;
use crate::{Error, Result};

const ESTS: [&str; 4] = ["ls-mean", "toy-last", "toy-first-last", "crystal-ball"];

pub fn run_consistency(
    n_list: &[usize],
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    if n_list.len() < 2 {
        return Err(Error::config("consistency needs at least two sample sizes"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] < 2 {
        return Err(Error::config(
            "sample sizes must be strictly increasing with minimum 2",
        ));
    }
    let theta_star = 0.0;
    let plan = SeedPlan::with_seed(seed);
    let estimators = [
        EstimatorSpec::LSMean,
        EstimatorSpec::ToyLast,
        EstimatorSpec::ToyFirstLast,
        EstimatorSpec::CrystalBall {
            constant: CRYSTAL_BALL_DEFAULT,
        },
    ];

    let mut mse = Table::new(
        "mse",
        &[
            "n",
            "mse_ls_mean",
            "stderr_ls_mean",
            "mse_toy_last",
            "stderr_toy_last",
            "mse_toy_first_last",
            "stderr_toy_first_last",
            "mse_crystal_ball",
            "stderr_crystal_ball",
        ],
    );
    for &n in n_list {
        let model = StatisticalModel::normal(theta_star, 1.0, n)?;
        let mc = risk_curves(
            &model,
            &scalar_grid(&[theta_star]),
            &estimators,
            &LossFunction::Square,
            reps,
            &plan,
            threads,
        )?;
        let mut row = vec![Cell::Int(n as i64)];
        for e in 0..estimators.len() {
            row.push(Cell::Num(mc.curves[e].risk[0]));
            row.push(Cell::Num(mc.curves[e].stderr[0]));
        }
        mse.push_row(row);
    }

    // Log-log slope of MSE against n per estimator.
    let mut slopes = Table::new("slopes", &["estimator", "slope", "intercept"]);
    let ln_n: Vec<f64> = n_list.iter().map(|n| (*n as f64).ln()).collect();
    for name in ESTS {
        let col = format!("mse_{}", name.replace('-', "_"));
        let ln_mse: Vec<f64> = mse
            .num_column(&col)?
            .iter()
            .map(|v| v.ln())
            .collect();
        let (slope, intercept) = least_squares_line(&ln_n, &ln_mse);
        slopes.push_row(vec![
            Cell::Str(name.to_string()),
            Cell::Num(slope),
            Cell::Num(intercept),
        ]);
    }

    let mut config = Config::new();
    config.insert(
        "n_list".into(),
        ParamValue::RealList(n_list.iter().map(|n| *n as f64).collect()),
    );
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));
    config.insert("theta_star".into(), ParamValue::Real(theta_star));
    config.insert("sigma2".into(), ParamValue::Real(1.0));
    config.insert("slope_tolerance".into(), ParamValue::Real(0.05));

    let tables = vec![mse, slopes];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "consistency".into(),
        config,
        tables,
        verdicts,
    })
}

fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub(super) fn verdicts(config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let mse = tables
        .iter()
        .find(|t| t.name == "mse")
        .ok_or_else(|| Error::data("consistency report is missing the mse table"))?;
    let slopes = tables
        .iter()
        .find(|t| t.name == "slopes")
        .ok_or_else(|| Error::data("consistency report is missing the slopes table"))?;
    let tol = config["slope_tolerance"].as_f64()?;
    let mut out = Vec::new();

    let slope_of = |name: &str| -> Result<f64> {
        for (i, row) in slopes.rows.iter().enumerate() {
            if matches!(&row[0], Cell::Str(s) if s == name) {
                return slopes.num(i, "slope");
            }
        }
        Err(Error::data(format!("no slope row for {name}")))
    };

    {
        let s = slope_of("ls-mean")?;
        out.push(Verdict::new(
            "mean-mse-decays-like-one-over-n",
            "risk of the sample mean is sigma2/n, a log-log slope of -1 in n",
            (s + 1.0).abs() <= tol,
            format!("slope {s:.4} (target -1 +- {tol})"),
        ));
    }
    for name in ["toy-last", "toy-first-last", "crystal-ball"] {
        let s = slope_of(name)?;
        out.push(Verdict::new(
            &format!("{name}-mse-plateaus"),
            "rules that use a bounded number of observations (or none) have n-free risk, a log-log slope of 0",
            s.abs() <= tol,
            format!("slope {s:.4} (target 0 +- {tol})"),
        ));
    }

    // Level anchors: the last observation has unit variance, the first-last
    // average has variance one half.
    for (name, target) in [("toy_last", 1.0), ("toy_first_last", 0.5)] {
        let risks = mse.num_column(&format!("mse_{name}"))?;
        let ses = mse.num_column(&format!("stderr_{name}"))?;
        let pass = risks
            .iter()
            .zip(&ses)
            .all(|(r, se)| (r - target).abs() <= 3.0 * se);
        out.push(Verdict::new(
            &format!("{}-mse-level-{target}", name.replace('_', "-")),
            "Var(X_n) = 1 and Var((X_1 + X_n)/2) = 1/2 under unit-variance draws",
            pass,
            "targets hold within 3 standard errors at every n".to_string(),
        ));
    }

    Ok(out)
}
