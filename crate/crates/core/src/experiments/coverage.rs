//! Interval coverage simulation over a grid of levels and sample sizes.

use crate::model::StatisticalModel;
use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::rng::SeedPlan;
use crate::testci::coverage_sim;
use crate::{Error, Result};

pub fn run_coverage(
    alpha_list: &[f64],
    n_list: &[usize],
    theta_star: f64,
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    if alpha_list.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::config("all alpha values must lie in (0, 1)"));
    }
    if alpha_list.is_empty() || n_list.is_empty() {
        return Err(Error::config("alpha and n lists must be nonempty"));
    }
    let plan = SeedPlan::with_seed(seed);
    let mut table = Table::new(
        "coverage",
        &["alpha", "n", "coverage", "stderr", "target"],
    );
    for &alpha in alpha_list {
        for &n in n_list {
            let model = StatisticalModel::normal(theta_star, 1.0, n)?;
            let est = coverage_sim(&model, alpha, reps, &plan, threads)?;
            table.push_row(vec![
                Cell::Num(alpha),
                Cell::Int(n as i64),
                Cell::Num(est.coverage),
                Cell::Num(est.stderr),
                Cell::Num(1.0 - alpha),
            ]);
        }
    }

    let mut config = Config::new();
    config.insert("alpha_list".into(), ParamValue::RealList(alpha_list.to_vec()));
    config.insert(
        "n_list".into(),
        ParamValue::RealList(n_list.iter().map(|n| *n as f64).collect()),
    );
    config.insert("theta_star".into(), ParamValue::Real(theta_star));
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));
    config.insert("sigma2".into(), ParamValue::Real(1.0));

    let tables = vec![table];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "coverage".into(),
        config,
        tables,
        verdicts,
    })
}

pub(super) fn verdicts(_config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let table = tables
        .iter()
        .find(|t| t.name == "coverage")
        .ok_or_else(|| Error::data("coverage report is missing its table"))?;
    let mut pass = true;
    let mut worst = 0.0f64;
    for r in 0..table.n_rows() {
        let cov = table.num(r, "coverage")?;
        let se = table.num(r, "stderr")?;
        let target = table.num(r, "target")?;
        let dev = (cov - target).abs();
        worst = worst.max(dev / se.max(f64::MIN_POSITIVE));
        if dev > 3.0 * se {
            pass = false;
        }
    }
    Ok(vec![Verdict::new(
        "coverage-matches-nominal-level",
        "the random interval xbar -+ c_{alpha/2} sigma/sqrt(n) covers the true mean with probability 1 - alpha",
        pass,
        format!("worst |coverage - (1 - alpha)| / stderr = {worst:.2} (must be <= 3)"),
    )])
}
