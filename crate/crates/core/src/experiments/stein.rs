//! Shrinkage dominance sweep: least squares against James-Stein and its
//! positive-part variant under the summed squared-error loss, over a grid of
//! mean-vector norms.

use crate::estimator::EstimatorSpec;
use crate::loss::LossFunction;
use crate::model::StatisticalModel;
use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::risk::{norm_grid, risk_curves};
use crate::rng::SeedPlan;
use crate::{Error, Result};

/// Runs the dominance sweep. `theta_norms` parameterizes the grid as
/// theta = (r, 0, ..., 0); under the isotropic model the risks depend on
/// theta only through its norm.
pub fn run_stein(
    m: usize,
    sigma2: f64,
    theta_norms: &[f64],
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    if m < 2 {
        return Err(Error::config("stein experiment requires m >= 2"));
    }
    if sigma2 <= 0.0 {
        return Err(Error::config("sigma2 must be positive"));
    }
    let model = StatisticalModel::multinormal(vec![0.0; m], sigma2, 1)?;
    let grid = norm_grid(theta_norms, m);
    let plan = SeedPlan::with_seed(seed);
    let estimators = [
        EstimatorSpec::LSMean,
        EstimatorSpec::JS { sigma2 },
        EstimatorSpec::JSPlus { sigma2 },
    ];
    let mc = risk_curves(
        &model,
        &grid,
        &estimators,
        &LossFunction::SteinSum,
        reps,
        &plan,
        threads,
    )?;

    let mut table = Table::new(
        "risk",
        &[
            "theta_norm",
            "risk_ls",
            "stderr_ls",
            "risk_js",
            "stderr_js",
            "risk_jsplus",
            "stderr_jsplus",
            "diff_js_ls",
            "stderr_diff_js_ls",
            "diff_jsplus_js",
            "stderr_diff_jsplus_js",
        ],
    );
    for p in 0..grid.len() {
        let (d_js_ls, se_js_ls) = mc.diff(p, 1, 0);
        let (d_jsp_js, se_jsp_js) = mc.diff(p, 2, 1);
        table.push_row(vec![
            Cell::Num(mc.curves[0].axis[p]),
            Cell::Num(mc.curves[0].risk[p]),
            Cell::Num(mc.curves[0].stderr[p]),
            Cell::Num(mc.curves[1].risk[p]),
            Cell::Num(mc.curves[1].stderr[p]),
            Cell::Num(mc.curves[2].risk[p]),
            Cell::Num(mc.curves[2].stderr[p]),
            Cell::Num(d_js_ls),
            Cell::Num(se_js_ls),
            Cell::Num(d_jsp_js),
            Cell::Num(se_jsp_js),
        ]);
    }

    let mut config = Config::new();
    config.insert("m".into(), ParamValue::UInt(m as u64));
    config.insert("sigma2".into(), ParamValue::Real(sigma2));
    config.insert("theta_norms".into(), ParamValue::RealList(theta_norms.to_vec()));
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));
    config.insert("n_per_coord".into(), ParamValue::UInt(1));
    config.insert("loss".into(), ParamValue::Str("stein-sum".into()));

    let tables = vec![table];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "stein".into(),
        config,
        tables,
        verdicts,
    })
}

/// Derives the verdicts from the risk table alone.
pub(super) fn verdicts(config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let table = tables
        .iter()
        .find(|t| t.name == "risk")
        .ok_or_else(|| Error::data("stein report is missing the risk table"))?;
    let m = config["m"].as_u64()?;
    let sigma2 = config["sigma2"].as_f64()?;
    let mut out = Vec::new();

    if m > 2 {
        let mut worst = f64::NEG_INFINITY;
        let mut pass = true;
        for r in 0..table.n_rows() {
            let d = table.num(r, "diff_js_ls")?;
            let se = table.num(r, "stderr_diff_js_ls")?;
            worst = worst.max(d + 3.0 * se);
            if d + 3.0 * se >= 0.0 {
                pass = false;
            }
        }
        out.push(Verdict::new(
            "js-risk-below-ls-risk-at-every-grid-point",
            "for m > 2 the shrinkage estimator has strictly smaller summed squared-error risk than least squares at every mean vector",
            pass,
            format!("largest paired diff + 3se = {worst:.6e} (must be < 0)"),
        ));
    } else {
        let mut pass = true;
        for r in 0..table.n_rows() {
            if table.num(r, "diff_js_ls")? != 0.0 || table.num(r, "stderr_diff_js_ls")? != 0.0 {
                pass = false;
            }
        }
        out.push(Verdict::new(
            "js-coincides-with-ls-at-m-2",
            "the shrink factor 1 - (m-2) sigma2 / ||x||^2 is identically one when m = 2",
            pass,
            "paired loss differences must vanish exactly".into(),
        ));
    }

    {
        let mut worst = f64::NEG_INFINITY;
        let mut pass = true;
        for r in 0..table.n_rows() {
            let d = table.num(r, "diff_jsplus_js")?;
            let se = table.num(r, "stderr_diff_jsplus_js")?;
            worst = worst.max(d - 3.0 * se);
            if d > 3.0 * se {
                pass = false;
            }
        }
        out.push(Verdict::new(
            "jsplus-risk-never-above-js-risk",
            "clamping the shrink factor at zero cannot increase the summed squared-error risk",
            pass,
            format!("largest paired diff - 3se = {worst:.6e} (must be <= 0)"),
        ));
    }

    // Oracle anchor when the grid includes the origin.
    for r in 0..table.n_rows() {
        if table.num(r, "theta_norm")? == 0.0 {
            let js = table.num(r, "risk_js")?;
            let js_se = table.num(r, "stderr_js")?;
            let ls = table.num(r, "risk_ls")?;
            let ls_se = table.num(r, "stderr_ls")?;
            let js_target = 2.0 * sigma2;
            let ls_target = m as f64 * sigma2;
            let pass =
                (js - js_target).abs() <= 3.0 * js_se && (ls - ls_target).abs() <= 3.0 * ls_se;
            out.push(Verdict::new(
                "origin-risks-match-closed-form",
                "risk(LS) = m sigma2 everywhere; risk(JS) at the origin = 2 sigma2 because E[1/chi^2_m] = 1/(m-2)",
                pass,
                format!(
                    "js {js:.6} vs {js_target} (se {js_se:.2e}); ls {ls:.6} vs {ls_target} (se {ls_se:.2e})"
                ),
            ));
            break;
        }
    }

    Ok(out)
}
