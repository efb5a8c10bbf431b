//! Unit-of-measurement sensitivity of the summed squared-error loss in
//! regression: rescaling a design column leaves the fit itself invariant but
//! rescales that coefficient's contribution to the loss by 1/u^2, so the
//! contribution ranking across coefficients is an artifact of units.

use crate::estimator::{regression_js, regression_ols};
use crate::exec::{map_chunks, RunningStats};
use crate::model::{draw_matrix, Matrix, StatisticalModel};
use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::rng::SeedPlan;
use crate::{Error, Result};

const TOL_INVARIANCE: f64 = 1e-8;
const TOL_SCALING: f64 = 1e-6;

struct Fit {
    beta_js: Vec<f64>,
    beta_ols: Vec<f64>,
    s2: f64,
    fitted: Vec<f64>,
    fitted_norm_sq: f64,
}

/// Scales design column `col` by `u` and refits OLS and the shrunk variant.
fn fit_scaled(sample: &Matrix, col: usize, u: f64, c: f64) -> Result<Fit> {
    let (y, mut x) = crate::estimator::split_regression(sample)?;
    for r in 0..x.rows() {
        x.set(r, col, x.get(r, col) * u);
    }
    let ols = regression_ols(&y, &x)?;
    let js = regression_js(&y, &x, c)?;
    let mut fitted = Vec::with_capacity(x.rows());
    let mut norm_sq = 0.0;
    for r in 0..x.rows() {
        let row = x.row(r);
        let f: f64 = row.iter().zip(&ols.value).map(|(a, b)| a * b).sum();
        fitted.push(f);
        norm_sq += f * f;
    }
    Ok(Fit {
        beta_js: js.value,
        beta_ols: ols.value,
        s2: ols.aux.s2.unwrap_or(0.0),
        fitted,
        fitted_norm_sq: norm_sq,
    })
}

/// True coefficients after scaling column `col` by `u`.
fn scaled_beta(beta: &[f64], col: usize, u: f64) -> Vec<f64> {
    let mut b = beta.to_vec();
    b[col] /= u;
    b
}

#[allow(clippy::too_many_arguments)]
pub fn run_units_sensitivity(
    beta: &[f64],
    n: usize,
    sigma2: f64,
    scale_factors: &[f64],
    c: f64,
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    let k = beta.len();
    if k < 2 {
        return Err(Error::config(
            "units experiment needs an intercept and at least one regressor",
        ));
    }
    if scale_factors.iter().any(|u| *u <= 0.0) {
        return Err(Error::config("scale factors must be positive"));
    }
    if c <= 0.0 {
        return Err(Error::config("shrinkage constant c must be positive"));
    }
    let model = StatisticalModel::regression(beta.to_vec(), sigma2, n)?;
    let plan = SeedPlan::with_seed(seed);

    // Baseline factor 1 always present, factors sorted and deduplicated.
    let mut factors: Vec<f64> = scale_factors.to_vec();
    factors.push(1.0);
    factors.sort_by(f64::total_cmp);
    factors.dedup();

    // Fixed dataset for the deterministic checks: replication 0.
    let fixed = {
        let mut stream = plan.stream(0);
        draw_matrix(&model, &mut stream)
    };

    // Pick the column to rescale: the non-intercept coefficient with the
    // largest baseline loss contribution, so scaling it can flip the ranking.
    let baseline = fit_scaled(&fixed, 1, 1.0, c)?;
    let baseline_contrib: Vec<f64> = baseline
        .beta_js
        .iter()
        .zip(beta)
        .map(|(e, t)| (e - t) * (e - t))
        .collect();
    let target = (1..k)
        .max_by(|a, b| baseline_contrib[*a].total_cmp(&baseline_contrib[*b]))
        .expect("k >= 2");

    // Monte Carlo mean contributions per coefficient per factor, with the
    // same replication dataset reused across factors.
    let mc_contrib: Vec<Vec<f64>> = {
        let chunks = map_chunks(&plan, reps, threads, |_ci, range| {
            let mut acc = vec![vec![RunningStats::new(); k]; factors.len()];
            for i in range {
                let mut stream = plan.stream(i);
                let sample = draw_matrix(&model, &mut stream);
                for (fi, u) in factors.iter().enumerate() {
                    let fit = fit_scaled(&sample, target, *u, c)?;
                    let truth = scaled_beta(beta, target, *u);
                    for j in 0..k {
                        let d = fit.beta_js[j] - truth[j];
                        acc[fi][j].push(d * d);
                    }
                }
            }
            Ok(acc)
        })?;
        let mut merged = vec![vec![RunningStats::new(); k]; factors.len()];
        for chunk in chunks {
            for (fi, per_coef) in chunk.iter().enumerate() {
                for (j, s) in per_coef.iter().enumerate() {
                    merged[fi][j].merge(s);
                }
            }
        }
        merged
            .into_iter()
            .map(|per_coef| per_coef.into_iter().map(|s| s.mean()).collect())
            .collect()
    };

    // Tables: invariants / contributions / magnitudes, all indexed by u.
    let mut invariants = Table::new(
        "invariants",
        &["u", "fitted_norm_sq", "s2", "yhat_max_rel_diff"],
    );
    let contrib_cols: Vec<String> = (0..k)
        .map(|j| format!("contrib_{j}"))
        .chain((0..k).map(|j| format!("mc_contrib_{j}")))
        .collect();
    let mut contributions = Table::new(
        "contributions",
        &std::iter::once("u")
            .chain(contrib_cols.iter().map(|s| s.as_str()))
            .collect::<Vec<_>>(),
    );
    let mag_cols: Vec<String> = (0..k)
        .map(|j| format!("beta_hat_{j}"))
        .chain((0..k).map(|j| format!("beta_hat_sq_{j}")))
        .collect();
    let mut magnitudes = Table::new(
        "magnitudes",
        &std::iter::once("u")
            .chain(mag_cols.iter().map(|s| s.as_str()))
            .collect::<Vec<_>>(),
    );

    let yhat_scale = baseline
        .fitted
        .iter()
        .map(|f| f.abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for (fi, u) in factors.iter().enumerate() {
        let fit = fit_scaled(&fixed, target, *u, c)?;
        let truth = scaled_beta(beta, target, *u);
        let yhat_max_rel_diff = fit
            .fitted
            .iter()
            .zip(&baseline.fitted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / yhat_scale;
        invariants.push_row(vec![
            Cell::Num(*u),
            Cell::Num(fit.fitted_norm_sq),
            Cell::Num(fit.s2),
            Cell::Num(yhat_max_rel_diff),
        ]);
        let mut row = vec![Cell::Num(*u)];
        for (e, t) in fit.beta_js.iter().zip(&truth) {
            let d = e - t;
            row.push(Cell::Num(d * d));
        }
        for mc in &mc_contrib[fi] {
            row.push(Cell::Num(*mc));
        }
        contributions.push_row(row);
        let mut mrow = vec![Cell::Num(*u)];
        for j in 0..k {
            mrow.push(Cell::Num(fit.beta_ols[j]));
        }
        for j in 0..k {
            mrow.push(Cell::Num(fit.beta_ols[j] * fit.beta_ols[j]));
        }
        magnitudes.push_row(mrow);
    }

    let mut config = Config::new();
    config.insert("beta".into(), ParamValue::RealList(beta.to_vec()));
    config.insert("n".into(), ParamValue::UInt(n as u64));
    config.insert("sigma2".into(), ParamValue::Real(sigma2));
    config.insert("scale_factors".into(), ParamValue::RealList(factors.clone()));
    config.insert("c".into(), ParamValue::Real(c));
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));
    config.insert("target_column".into(), ParamValue::UInt(target as u64));
    config.insert("tol_invariance".into(), ParamValue::Real(TOL_INVARIANCE));
    config.insert("tol_scaling".into(), ParamValue::Real(TOL_SCALING));

    let tables = vec![invariants, contributions, magnitudes];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "units".into(),
        config,
        tables,
        verdicts,
    })
}

pub(super) fn verdicts(config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let invariants = tables
        .iter()
        .find(|t| t.name == "invariants")
        .ok_or_else(|| Error::data("units report is missing the invariants table"))?;
    let contributions = tables
        .iter()
        .find(|t| t.name == "contributions")
        .ok_or_else(|| Error::data("units report is missing the contributions table"))?;
    let magnitudes = tables
        .iter()
        .find(|t| t.name == "magnitudes")
        .ok_or_else(|| Error::data("units report is missing the magnitudes table"))?;
    let beta = config["beta"].as_f64_list()?;
    let k = beta.len();
    let target = config["target_column"].as_u64()? as usize;
    let tol_inv = config["tol_invariance"].as_f64()?;
    let tol_scale = config["tol_scaling"].as_f64()?;
    let factors = invariants.num_column("u")?;
    let base_row = factors
        .iter()
        .position(|u| *u == 1.0)
        .ok_or_else(|| Error::data("no baseline scale factor 1 in the table"))?;
    let mut out = Vec::new();

    // Fit invariance under rescaling.
    {
        let norm0 = invariants.num(base_row, "fitted_norm_sq")?;
        let s20 = invariants.num(base_row, "s2")?;
        let mut worst = 0.0f64;
        for r in 0..invariants.n_rows() {
            let dn = (invariants.num(r, "fitted_norm_sq")? - norm0).abs() / norm0.abs();
            let ds = (invariants.num(r, "s2")? - s20).abs() / s20.abs().max(f64::MIN_POSITIVE);
            let dy = invariants.num(r, "yhat_max_rel_diff")?;
            worst = worst.max(dn).max(ds).max(dy);
        }
        out.push(Verdict::new(
            "fit-invariant-under-column-rescaling",
            "rescaling a design column leaves the fitted values, b'X'Xb and s^2 unchanged; only the coefficient rescales",
            worst <= tol_inv,
            format!("worst relative deviation {worst:.3e} (tolerance {tol_inv:.0e})"),
        ));
    }

    // The rescaled coefficient's loss contribution follows the exact 1/u^2 law.
    {
        let col = format!("contrib_{target}");
        let c0 = contributions.num(base_row, &col)?;
        let mut worst = 0.0f64;
        for r in 0..contributions.n_rows() {
            let u = contributions.num(r, "u")?;
            let cu = contributions.num(r, &col)?;
            let rel = (cu * u * u - c0).abs() / c0.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
        out.push(Verdict::new(
            "target-contribution-scales-as-inverse-u-squared",
            "with the same data, scaling column j by u maps its squared-error contribution to 1/u^2 times its old value",
            worst <= tol_scale,
            format!("worst relative deviation of u^2 * contribution {worst:.3e} (tolerance {tol_scale:.0e})"),
        ));
    }

    // Ranking flip at the largest factor.
    {
        // The target starts as the dominant regressor contribution and is
        // overtaken by some other coefficient at the largest factor.
        let contrib_at = |row: usize, j: usize| contributions.num(row, &format!("contrib_{j}"));
        let last = contributions.n_rows() - 1;
        let u_max = contributions.num(last, "u")?;
        let mut dominant_at_base = true;
        for j in 1..k {
            if j != target && contrib_at(base_row, j)? > contrib_at(base_row, target)? {
                dominant_at_base = false;
            }
        }
        let mut overtaken = false;
        for j in 0..k {
            if j != target && contrib_at(last, j)? > contrib_at(last, target)? {
                overtaken = true;
            }
        }
        let pass = dominant_at_base && (u_max == 1.0 || overtaken);
        out.push(Verdict::new(
            "contribution-ranking-flips-under-rescaling",
            "a large enough unit change demotes the dominant contribution, so the loss's ranking of coefficients is unit-dependent",
            pass,
            format!(
                "coefficient {target} dominant among regressors at u=1: {dominant_at_base}; overtaken at u={u_max}: {overtaken}"
            ),
        ));
    }

    // In raw units, the smallest coefficient is irrelevant to the squared
    // norm next to the largest; the fitted values give the observed scale.
    {
        let true_mags: Vec<f64> = beta[1..].iter().map(|b| b * b).collect();
        let max = true_mags.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = true_mags.iter().cloned().fold(f64::INFINITY, f64::min);
        let ratio = min / max;
        let mut fitted = Vec::with_capacity(k);
        for j in 0..k {
            fitted.push(magnitudes.num(base_row, &format!("beta_hat_{j}"))?);
        }
        out.push(Verdict::new(
            "smallest-coefficient-negligible-in-raw-units",
            "coefficients of very different magnitudes contribute incomparably to a squared-norm criterion",
            ratio < 1e-4,
            format!(
                "smallest/largest squared regressor coefficient = {ratio:.3e}; fitted coefficients {fitted:?}"
            ),
        ));
    }

    Ok(out)
}
