//! The two readings of mean squared error side by side: the scalar at the
//! true parameter against the full curve over a grid, for one estimator.
//!
//! Univariate models sweep theta directly; the isotropic multivariate model
//! sweeps mean vectors (r, 0, ..., 0) and reports the norm r on the axis.

use crate::estimator::EstimatorSpec;
use crate::model::StatisticalModel;
use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::risk::{norm_grid, quantifier_contrast, scalar_grid};
use crate::rng::SeedPlan;
use crate::{Error, Result};

pub fn run_quantifier_contrast(
    estimator: &EstimatorSpec,
    model: &StatisticalModel,
    theta_axis: &[f64],
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    let dim = model.param_dim();
    let grid = if dim == 1 {
        scalar_grid(theta_axis)
    } else {
        if theta_axis.iter().any(|t| *t < 0.0) {
            return Err(Error::config(
                "norm axis values must be nonnegative for a vector sweep",
            ));
        }
        norm_grid(theta_axis, dim)
    };
    let plan = SeedPlan::with_seed(seed);
    let qc = quantifier_contrast(model, estimator, &grid, reps, &plan, threads)?;

    let mut curve = Table::new("curve", &["theta", "risk", "stderr"]);
    for i in 0..qc.curve.len() {
        curve.push_row(vec![
            Cell::Num(qc.curve.axis[i]),
            Cell::Num(qc.curve.risk[i]),
            Cell::Num(qc.curve.stderr[i]),
        ]);
    }
    let star_axis = if dim == 1 {
        qc.theta_star[0]
    } else {
        qc.theta_star.iter().map(|x| x * x).sum::<f64>().sqrt()
    };
    let mut scalar = Table::new(
        "scalar",
        &[
            "theta_star",
            "mse_at_theta_star",
            "stderr",
            "curve_min_theta",
            "curve_min_risk",
            "theta_star_in_range",
        ],
    );
    scalar.push_row(vec![
        Cell::Num(star_axis),
        Cell::Num(qc.at_theta_star.risk),
        Cell::Num(qc.at_theta_star.stderr),
        Cell::Num(qc.min_axis),
        Cell::Num(qc.curve.risk[qc.min_index]),
        Cell::Bool(qc.theta_star_in_range),
    ]);

    let mut config = Config::new();
    config.insert("estimator".into(), ParamValue::Str(estimator.name().into()));
    if let EstimatorSpec::CrystalBall { constant } = estimator {
        config.insert("constant".into(), ParamValue::Real(*constant));
    }
    config.insert("model".into(), ParamValue::Str(model.kind.name().into()));
    config.insert("m".into(), ParamValue::UInt(dim as u64));
    config.insert(
        "theta_star".into(),
        ParamValue::RealList(model.theta_star.clone()),
    );
    config.insert("n".into(), ParamValue::UInt(model.n as u64));
    config.insert("sigma2".into(), ParamValue::Real(model.sigma2));
    config.insert("theta_axis".into(), ParamValue::RealList(theta_axis.to_vec()));
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));

    let tables = vec![curve, scalar];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "quantifier".into(),
        config,
        tables,
        verdicts,
    })
}

pub(super) fn verdicts(config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let curve = tables
        .iter()
        .find(|t| t.name == "curve")
        .ok_or_else(|| Error::data("quantifier report is missing the curve table"))?;
    let scalar = tables
        .iter()
        .find(|t| t.name == "scalar")
        .ok_or_else(|| Error::data("quantifier report is missing the scalar table"))?;
    let estimator = config["estimator"].as_str()?;
    let theta_star_axis = scalar.num(0, "theta_star")?;
    let mut out = Vec::new();

    let risks = curve.num_column("risk")?;
    let stderrs = curve.num_column("stderr")?;
    let mse_star = scalar.num(0, "mse_at_theta_star")?;
    let min_theta = scalar.num(0, "curve_min_theta")?;

    match estimator {
        "crystal-ball" => {
            let constant = config["constant"].as_f64()?;
            // The curve bottoms out at the constant, not at the true value.
            let grid_step = {
                let axis = curve.num_column("theta")?;
                axis.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max)
            };
            let minimizer_at_constant = (min_theta - constant).abs() <= grid_step;
            out.push(Verdict::new(
                "curve-minimizer-is-the-constant-not-the-true-value",
                "the constant rule's risk (theta - constant)^2 is minimized at the constant, wherever the true value sits",
                minimizer_at_constant && (min_theta - theta_star_axis).abs() > grid_step,
                format!("curve minimum at {min_theta}, true value {theta_star_axis}"),
            ));
            let expected = (theta_star_axis - constant) * (theta_star_axis - constant);
            out.push(Verdict::new(
                "scalar-mse-equals-squared-offset",
                "at the true value the constant rule's squared error is exactly (theta_star - constant)^2",
                (mse_star - expected).abs() <= 1e-9 * expected.max(1.0),
                format!("scalar {mse_star:.6e} vs (theta*-c)^2 = {expected:.6e}"),
            ));
        }
        "ls-mean" => {
            let max = risks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = risks.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_se = stderrs.iter().cloned().fold(0.0, f64::max);
            out.push(Verdict::new(
                "curve-flat-for-the-location-equivariant-mean",
                "the sample mean's squared-error risk is sigma2/n at every theta",
                (max - min) <= 6.0 * max_se + 1e-12,
                format!("curve spread {:.3e} vs stderr {:.1e}", max - min, max_se),
            ));
            // The two readings coincide for an equivariant rule.
            let se_star = scalar.num(0, "stderr")?;
            let dev = risks
                .iter()
                .zip(&stderrs)
                .map(|(r, se)| (r - mse_star).abs() - 3.0 * (se * se + se_star * se_star).sqrt())
                .fold(f64::NEG_INFINITY, f64::max);
            out.push(Verdict::new(
                "scalar-and-curve-coincide",
                "for a location-equivariant estimator the risk at the true value equals the risk at every other theta",
                dev <= 1e-12,
                format!("worst |curve - scalar| beyond 3 combined se: {dev:.3e}"),
            ));
        }
        _ => {
            // Generic contrast: the scalar is one point of the curve's range.
            let max = risks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            out.push(Verdict::new(
                "scalar-within-curve-range",
                "the risk at the true value is one evaluation of the curve, not its supremum",
                mse_star <= max + 1e-12,
                format!("scalar {mse_star:.4e}, curve max {max:.4e}"),
            ));
        }
    }

    Ok(out)
}
