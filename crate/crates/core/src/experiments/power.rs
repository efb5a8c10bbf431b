//! Power curve of the one-sided Normal mean test: closed form against Monte
//! Carlo rejection frequencies over a grid of alternatives.

use crate::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use crate::rng::SeedPlan;
use crate::testci::{power, rejection_frequency_mc, TestSpec};
use crate::{Error, Result};

pub fn run_power_curve(
    spec: &TestSpec,
    theta1_grid: &[f64],
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<ExperimentReport> {
    spec.validate()?;
    if theta1_grid.is_empty() {
        return Err(Error::config("theta1 grid must be nonempty"));
    }
    if theta1_grid.iter().any(|t| *t <= spec.theta0) {
        return Err(Error::config(
            "every theta1 must lie strictly above theta0",
        ));
    }
    if theta1_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("theta1 grid must be strictly increasing"));
    }
    let plan = SeedPlan::with_seed(seed);
    let mut table = Table::new(
        "power",
        &[
            "theta1",
            "delta1",
            "power",
            "type2",
            "power_mc",
            "stderr_mc",
        ],
    );
    for &t1 in theta1_grid {
        let closed = power(t1, spec)?;
        let mc = rejection_frequency_mc(spec, t1, reps, &plan, threads)?;
        table.push_row(vec![
            Cell::Num(t1),
            Cell::Num(closed.delta1),
            Cell::Num(closed.power),
            Cell::Num(closed.type2),
            Cell::Num(mc.coverage),
            Cell::Num(mc.stderr),
        ]);
    }

    // Size anchor: rejection frequency at the null itself.
    let size_mc = rejection_frequency_mc(spec, spec.theta0, reps, &plan, threads)?;
    let mut size = Table::new("size", &["alpha", "rejection_mc", "stderr_mc"]);
    size.push_row(vec![
        Cell::Num(spec.alpha),
        Cell::Num(size_mc.coverage),
        Cell::Num(size_mc.stderr),
    ]);

    let mut config = Config::new();
    config.insert("theta0".into(), ParamValue::Real(spec.theta0));
    config.insert("alpha".into(), ParamValue::Real(spec.alpha));
    config.insert("n".into(), ParamValue::UInt(spec.n as u64));
    config.insert("sigma2".into(), ParamValue::Real(spec.sigma2));
    config.insert("theta1_grid".into(), ParamValue::RealList(theta1_grid.to_vec()));
    config.insert("reps".into(), ParamValue::UInt(reps));
    config.insert("master_seed".into(), ParamValue::UInt(seed));

    let tables = vec![table, size];
    let verdicts = verdicts(&config, &tables)?;
    Ok(ExperimentReport {
        name: "power".into(),
        config,
        tables,
        verdicts,
    })
}

pub(super) fn verdicts(config: &Config, tables: &[Table]) -> Result<Vec<Verdict>> {
    let table = tables
        .iter()
        .find(|t| t.name == "power")
        .ok_or_else(|| Error::data("power report is missing its table"))?;
    let size = tables
        .iter()
        .find(|t| t.name == "size")
        .ok_or_else(|| Error::data("power report is missing the size table"))?;
    let alpha = config["alpha"].as_f64()?;
    let mut out = Vec::new();

    {
        let mut pass = true;
        let mut worst = 0.0f64;
        for r in 0..table.n_rows() {
            let closed = table.num(r, "power")?;
            let mc = table.num(r, "power_mc")?;
            let se = table.num(r, "stderr_mc")?;
            let dev = (closed - mc).abs();
            worst = worst.max(dev / se.max(f64::MIN_POSITIVE));
            if dev > 3.0 * se {
                pass = false;
            }
        }
        out.push(Verdict::new(
            "mc-rejection-frequency-matches-closed-form",
            "power = 1 - Phi(c_alpha - delta1) with delta1 = sqrt(n)(theta1 - theta0)/sigma",
            pass,
            format!("worst |closed - mc| / stderr = {worst:.2} (must be <= 3)"),
        ));
    }

    {
        let closed: Vec<f64> = table.num_column("power")?;
        let pass = closed.windows(2).all(|w| w[0] < w[1]);
        out.push(Verdict::new(
            "power-strictly-increasing-in-theta1",
            "the one-sided test's power rises with the alternative's distance from the null",
            pass,
            format!("power spans {:.4} to {:.4} over the grid", closed[0], closed[closed.len() - 1]),
        ));
    }

    {
        let rej = size.num(0, "rejection_mc")?;
        let se = size.num(0, "stderr_mc")?;
        let pass = (rej - alpha).abs() <= 3.0 * se;
        out.push(Verdict::new(
            "size-equals-alpha-and-power-continuous-at-null",
            "at theta1 -> theta0 the rejection probability tends to the significance level alpha",
            pass,
            format!("rejection under the null {rej:.4} vs alpha {alpha} (stderr {se:.1e})"),
        ));
    }

    Ok(out)
}
