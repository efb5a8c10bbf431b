//! Acceptance suite: one test per criterion, full-scale settings, one
//! pass/fail line each. Tolerances are pinned in code; every Monte Carlo
//! band is three standard errors unless stated otherwise.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use risklab_core::bayes::{
    bayes_action, grid_posterior_update, posterior_normal_normal, GridDistribution, Posterior,
};
use risklab_core::estimator::EstimatorSpec;
use risklab_core::experiments::{
    run_consistency, run_coverage, run_crystal_ball, run_stein, run_units_sensitivity,
};
use risklab_core::loss::LossFunction;
use risklab_core::model::{draw_sample, StatisticalModel};
use risklab_core::report::ExperimentReport;
use risklab_core::risk::mse_bias_at_true;
use risklab_core::rng::{SeedPlan, Stream};
use risklab_core::testci::{
    ks_critical_1pct, ks_distance_from_uniform, p_values_under_null, power,
    rejection_frequency_mc, TestSpec,
};

const SEED: u64 = 42;

fn threads() -> usize {
    risklab_core::exec::default_threads()
}

fn pass(criterion: &str, detail: String) {
    println!("criterion {criterion}: PASS - {detail}");
}

/// Criterion 1 and 2 share one full-scale dominance sweep.
fn stein_report() -> &'static (ExperimentReport, f64) {
    static REPORT: OnceLock<(ExperimentReport, f64)> = OnceLock::new();
    REPORT.get_or_init(|| {
        let start = Instant::now();
        let report = run_stein(5, 1.0, &[0.0, 1.0, 2.0, 4.0, 8.0], 1_000_000, SEED, threads())
            .expect("stein experiment");
        (report, start.elapsed().as_secs_f64())
    })
}

#[test]
fn criterion_01_stein_dominance() {
    let (report, secs) = stein_report();
    let t = report.table("risk").unwrap();
    // JS strictly below LS with 3 sigma significance at every grid point.
    for r in 0..t.n_rows() {
        let d = t.num(r, "diff_js_ls").unwrap();
        let se = t.num(r, "stderr_diff_js_ls").unwrap();
        assert!(
            d + 3.0 * se < 0.0,
            "row {r}: paired diff {d} +- {se} is not significantly negative"
        );
    }
    // Oracle anchors at the origin: JS risk 2, LS risk 5.
    let js = t.num(0, "risk_js").unwrap();
    let js_se = t.num(0, "stderr_js").unwrap();
    let ls = t.num(0, "risk_ls").unwrap();
    let ls_se = t.num(0, "stderr_ls").unwrap();
    assert!((js - 2.0).abs() <= 3.0 * js_se, "JS at origin {js} (se {js_se})");
    assert!((ls - 5.0).abs() <= 3.0 * ls_se, "LS at origin {ls} (se {ls_se})");
    assert!(*secs < 120.0, "runtime {secs:.1}s exceeds 2 minutes");
    pass(
        "01 stein-dominance",
        format!("JS < LS at all 5 norms; origin risks {js:.4}/{ls:.4} vs 2/5; {secs:.1}s"),
    );
}

#[test]
fn criterion_02_jsplus_improvement() {
    let (report, _) = stein_report();
    let t = report.table("risk").unwrap();
    for r in 0..t.n_rows() {
        let d = t.num(r, "diff_jsplus_js").unwrap();
        let se = t.num(r, "stderr_diff_jsplus_js").unwrap();
        assert!(
            d <= 3.0 * se,
            "row {r}: positive-part diff {d} (se {se}) significantly positive"
        );
    }
    // The clamp is a strict improvement where it can fire.
    let d0 = t.num(0, "diff_jsplus_js").unwrap();
    let se0 = t.num(0, "stderr_diff_jsplus_js").unwrap();
    assert!(d0 + 3.0 * se0 < 0.0, "no strict gain at the origin");
    pass(
        "02 jsplus-improvement",
        format!("paired JS+ - JS never significantly positive; origin gain {d0:.4}"),
    );
}

#[test]
fn criterion_03_m2_degeneracy() {
    let sigma2 = 1.3;
    let model = StatisticalModel::multinormal(vec![0.4, -0.9], sigma2, 1).unwrap();
    let js = EstimatorSpec::JS { sigma2 };
    let ls = EstimatorSpec::LSMean;
    for i in 0..10_000u64 {
        let s = draw_sample(&model, risklab_core::rng::stream_seed(SEED, i)).unwrap();
        let a = js.eval(&s.values).unwrap();
        let b = ls.eval(&s.values).unwrap();
        for (x, y) in a.value.iter().zip(&b.value) {
            assert_eq!(x.to_bits(), y.to_bits(), "replication {i} differs");
        }
    }
    pass(
        "03 m2-degeneracy",
        "JS and LS estimates bit-identical on 10^4 samples at m=2".to_string(),
    );
}

#[test]
fn criterion_04_crystal_ball_crossing() {
    let n = 100;
    let constant = 7_405_926.0;
    let grid: Vec<f64> = (0..61).map(|i| constant - 0.3 + 0.01 * i as f64).collect();
    let report = run_crystal_ball(n, &grid, 0.5, 100_000, SEED, threads()).unwrap();
    let boundary = report
        .verdicts
        .iter()
        .find(|v| v.claim == "crossing-boundary-at-one-over-sqrt-n")
        .unwrap();
    assert!(boundary.pass, "{}", boundary.detail);
    let flat = report
        .verdicts
        .iter()
        .find(|v| v.claim == "mean-mse-flat-at-one-over-n")
        .unwrap();
    assert!(flat.pass, "{}", flat.detail);
    pass(
        "04 crystal-ball-crossing",
        format!(
            "boundaries within one grid step of +-0.1 and mean MSE at 1/n; {}",
            boundary.detail
        ),
    );
}

#[test]
fn criterion_05_consistency_contrast() {
    let report = run_consistency(&[25, 100, 400, 1600], 100_000, SEED, threads()).unwrap();
    for claim in [
        "mean-mse-decays-like-one-over-n",
        "toy-last-mse-plateaus",
        "toy-first-last-mse-plateaus",
        "crystal-ball-mse-plateaus",
        "toy-last-mse-level-1",
        "toy-first-last-mse-level-0.5",
    ] {
        let v = report
            .verdicts
            .iter()
            .find(|v| v.claim == claim)
            .unwrap_or_else(|| panic!("missing verdict {claim}"));
        assert!(v.pass, "{claim}: {}", v.detail);
    }
    let slopes = report.table("slopes").unwrap();
    let mean_slope = slopes.num(0, "slope").unwrap();
    pass(
        "05 consistency-contrast",
        format!("mean slope {mean_slope:.4} in -1 +- 0.05; other rules flat; levels 1 and 1/2 hold"),
    );
}

#[test]
fn criterion_06_mse_decomposition() {
    let plan = SeedPlan::with_seed(SEED);
    let univariate = StatisticalModel::normal(3.0, 1.0, 25).unwrap();
    let vector = StatisticalModel::multinormal(vec![1.0, -0.5, 0.25, 2.0, 0.0], 1.0, 1).unwrap();
    let laplace = StatisticalModel::laplace(-1.0, 2.0, 20).unwrap();
    let uniform = StatisticalModel::uniform(1.0, 30).unwrap();
    let regression = StatisticalModel::regression(vec![1.0, 1.8, 0.5, -0.004], 1.0, 50).unwrap();

    let matrix: Vec<(&str, StatisticalModel, EstimatorSpec)> = vec![
        ("normal/ls-mean", univariate.clone(), EstimatorSpec::LSMean),
        ("normal/toy-last", univariate.clone(), EstimatorSpec::ToyLast),
        ("normal/toy-first-last", univariate.clone(), EstimatorSpec::ToyFirstLast),
        (
            "normal/crystal-ball",
            univariate.clone(),
            EstimatorSpec::CrystalBall { constant: 7_405_926.0 },
        ),
        ("multinormal/ls-mean", vector.clone(), EstimatorSpec::LSMean),
        ("multinormal/js", vector.clone(), EstimatorSpec::JS { sigma2: 1.0 }),
        ("multinormal/js-plus", vector.clone(), EstimatorSpec::JSPlus { sigma2: 1.0 }),
        ("laplace/ls-mean", laplace, EstimatorSpec::LSMean),
        ("uniform/ls-mean", uniform, EstimatorSpec::LSMean),
        ("regression/ols", regression.clone(), EstimatorSpec::OLS),
        (
            "regression/js",
            regression,
            EstimatorSpec::RegressionJS { c: 2.0 },
        ),
    ];
    let mut worst = 0.0f64;
    for (name, model, est) in &matrix {
        let mb = mse_bias_at_true(model, est, 10_000, &plan, threads()).unwrap();
        let bias_sq: f64 = mb.bias.iter().map(|b| b * b).sum();
        let gap = (mb.mse - (mb.variance + bias_sq)).abs();
        assert!(
            gap <= 1e-10 * mb.mse.abs().max(f64::MIN_POSITIVE),
            "{name}: |mse - (var + bias^2)| = {gap} vs mse {}",
            mb.mse
        );
        if mb.mse != 0.0 {
            worst = worst.max(gap / mb.mse);
        }
    }
    pass(
        "06 mse-decomposition",
        format!(
            "identity holds to 1e-10 relative for {} model/estimator pairs (worst {worst:.2e})",
            matrix.len()
        ),
    );
}

#[test]
fn criterion_07_coverage() {
    let start = Instant::now();
    let report = run_coverage(&[0.05, 0.1, 0.32], &[25, 100], 0.0, 100_000, SEED, threads()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    assert!(report.passed(), "{:#?}", report.verdicts);
    let t = report.table("coverage").unwrap();
    assert_eq!(t.n_rows(), 6);
    for r in 0..6 {
        let cov = t.num(r, "coverage").unwrap();
        let se = t.num(r, "stderr").unwrap();
        let target = t.num(r, "target").unwrap();
        assert!(
            (cov - target).abs() <= 3.0 * se,
            "cell {r}: coverage {cov} target {target} se {se}"
        );
    }
    assert!(secs < 60.0, "runtime {secs:.1}s exceeds 1 minute");
    pass(
        "07 coverage",
        format!("all 6 cells within 3 binomial stderr of 1 - alpha; {secs:.1}s"),
    );
}

#[test]
fn criterion_08_power() {
    let spec = TestSpec::new(0.0, 0.05, 100, 1.0).unwrap();
    let closed = power(0.3, &spec).unwrap();
    assert!(
        (closed.power - 0.9123).abs() <= 5e-4,
        "closed-form power {} vs 0.9123",
        closed.power
    );
    let plan = SeedPlan::with_seed(SEED);
    let mc = rejection_frequency_mc(&spec, 0.3, 100_000, &plan, threads()).unwrap();
    assert!(
        (mc.coverage - closed.power).abs() <= 3.0 * mc.stderr,
        "MC {} vs closed {}",
        mc.coverage,
        closed.power
    );
    // Continuity at the null: power tends to alpha.
    let near = power(1e-9, &spec).unwrap();
    assert!((near.power - 0.05).abs() < 1e-6, "limit {}", near.power);
    pass(
        "08 power",
        format!(
            "closed form {:.4} (target 0.9123 +- 5e-4), MC {:.4} within 3 se, null limit {:.4}",
            closed.power, mc.coverage, near.power
        ),
    );
}

#[test]
fn criterion_09_p_value_uniformity() {
    let spec = TestSpec::new(0.0, 0.05, 25, 1.0).unwrap();
    let plan = SeedPlan::with_seed(SEED);
    let ps = p_values_under_null(&spec, 10_000, &plan, threads()).unwrap();
    let d = ks_distance_from_uniform(&ps).unwrap();
    let crit = ks_critical_1pct(ps.len());
    assert!(d < crit, "KS distance {d} at the 1% critical value {crit}");
    pass(
        "09 p-value-uniformity",
        format!("KS distance {d:.5} below the 1% critical value {crit:.5} on 10^4 p-values"),
    );
}

#[test]
fn criterion_10_bayes_actions() {
    // 20 randomized grid posteriors, half symmetric, half skewed mixtures.
    let mut stream = Stream::new(SEED);
    let grid_n = 481usize;
    let mut checked = 0;
    for case in 0..20 {
        let lo = -6.0;
        let hi = 6.0;
        let step = (hi - lo) / (grid_n - 1) as f64;
        let grid: Vec<f64> = (0..grid_n).map(|i| lo + step * i as f64).collect();
        let mu1 = 4.0 * stream.uniform() - 2.0;
        let s1 = 0.3 + stream.uniform();
        let weights: Vec<f64> = if case % 2 == 0 {
            grid.iter()
                .map(|t| risklab_core::normal::pdf((t - mu1) / s1))
                .collect()
        } else {
            let mu2 = mu1 + 1.0 + 2.0 * stream.uniform();
            let s2 = 0.2 + 0.5 * stream.uniform();
            let a = 0.3 + 0.4 * stream.uniform();
            grid.iter()
                .map(|t| {
                    a * risklab_core::normal::pdf((t - mu1) / s1)
                        + (1.0 - a) * risklab_core::normal::pdf((t - mu2) / s2)
                })
                .collect()
        };
        let posterior = Posterior::Grid(GridDistribution::new(grid, weights).unwrap());
        for loss in [
            LossFunction::Square,
            LossFunction::Absolute,
            LossFunction::ZeroOneEps { eps: Some(2.5 * step) },
        ] {
            let action = bayes_action(&posterior, &loss).unwrap();
            assert!(
                action.matches_closed_form,
                "case {case} {loss:?}: action {} vs closed form {} (step {})",
                action.action, action.closed_form, action.grid_step
            );
            checked += 1;
        }
    }
    pass(
        "10 bayes-actions",
        format!("{checked} minimizers landed within one grid step of mean/median/mode"),
    );
}

#[test]
fn criterion_11_conjugate_posterior() {
    // The pinned case: prior N(0,1), one observation x = 2, sigma2 = 1.
    let p = posterior_normal_normal(0.0, 1.0, 1, 2.0, 1.0).unwrap();
    assert!((p.mean() - 1.0).abs() < 1e-12);
    assert!((p.variance() - 0.5).abs() < 1e-12);

    // 20 randomized (prior, data) pairs against the brute-force grid update.
    let mut stream = Stream::new(SEED.wrapping_add(1));
    let grid: Vec<f64> = (0..16001).map(|i| -40.0 + 0.005 * i as f64).collect();
    let mut worst_mean = 0.0f64;
    let mut worst_var = 0.0f64;
    for case in 0..20 {
        let mu0 = 6.0 * stream.uniform() - 3.0;
        let tau2 = 0.2 + 3.8 * stream.uniform();
        let sigma2 = 0.2 + 3.8 * stream.uniform();
        let n = 1 + (stream.uniform() * 49.0) as usize;
        let xbar = 6.0 * stream.uniform() - 3.0;

        let conj = posterior_normal_normal(mu0, tau2, n, xbar, sigma2).unwrap();
        let prior_weights: Vec<f64> = grid
            .iter()
            .map(|t| risklab_core::normal::pdf((t - mu0) / tau2.sqrt()))
            .collect();
        let prior = GridDistribution::new(grid.clone(), prior_weights).unwrap();
        let gp = grid_posterior_update(&prior, n, xbar, sigma2).unwrap();

        let dm = (gp.mean() - conj.mean()).abs();
        let dv = (gp.variance() - conj.variance()).abs();
        worst_mean = worst_mean.max(dm);
        worst_var = worst_var.max(dv);
        assert!(dm < 1e-3, "case {case}: mean gap {dm}");
        assert!(dv < 1e-3, "case {case}: variance gap {dv}");
    }
    pass(
        "11 conjugate-posterior",
        format!(
            "N(1, 1/2) pinned case exact; 20 grid cross-checks (worst mean gap {worst_mean:.1e}, variance gap {worst_var:.1e})"
        ),
    );
}

#[test]
fn criterion_12_units_sensitivity() {
    let report = run_units_sensitivity(
        &[1.0, 1.8, 0.5, -0.004],
        200,
        1.0,
        &[1.0, 10.0, 1000.0],
        2.0,
        1000,
        SEED,
        threads(),
    )
    .unwrap();
    for claim in [
        "fit-invariant-under-column-rescaling",
        "target-contribution-scales-as-inverse-u-squared",
        "contribution-ranking-flips-under-rescaling",
        "smallest-coefficient-negligible-in-raw-units",
    ] {
        let v = report
            .verdicts
            .iter()
            .find(|v| v.claim == claim)
            .unwrap_or_else(|| panic!("missing verdict {claim}"));
        assert!(v.pass, "{claim}: {}", v.detail);
    }
    pass(
        "12 units-sensitivity",
        "fit invariant to 1e-8, contribution follows 1/u^2 to 1e-6, ranking flips at u=1000".to_string(),
    );
}

// --- criterion 13: byte-identical CLI output across reruns and thread counts ---

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_risklab"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("risklab-acc-{tag}-{}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn run_into(dir: &Path, args: &[&str], threads: &str) {
    let status = bin()
        .args(args)
        .args(["--seed", "42", "--threads", threads, "--out"])
        .arg(dir)
        .status()
        .unwrap();
    assert!(
        status.code() == Some(0) || status.code() == Some(1),
        "{args:?} crashed with {status:?}"
    );
}

#[test]
fn criterion_13_cli_determinism() {
    let cb_grid = "7405925.8,7405925.9,7405925.95,7405926.0,7405926.05,7405926.1,7405926.2";
    let cases: Vec<Vec<&str>> = vec![
        vec!["stein", "--m", "5", "--reps", "20000"],
        vec!["crystal-ball", "--reps", "5000", "--theta-grid", cb_grid],
        vec!["consistency", "--n-list", "25,100", "--reps", "5000"],
        vec!["units", "--reps", "200"],
        vec!["coverage", "--alphas", "0.1", "--n-list", "25", "--reps", "5000"],
        vec!["power", "--theta1-grid", "0.1,0.3", "--reps", "5000"],
        vec!["quantifier", "--reps", "5000"],
        vec!["risk-curve", "--reps", "1000"],
        vec!["dominance", "--reps", "5000"],
        vec!["bayes-action", "--loss", "absolute"],
        vec!["test", "--xbar", "0.25"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let d1 = temp_dir(&format!("c13-{i}-a"));
        let d2 = temp_dir(&format!("c13-{i}-b"));
        let d3 = temp_dir(&format!("c13-{i}-c"));
        run_into(&d1, args, "1");
        run_into(&d2, args, "1");
        run_into(&d3, args, "7");
        let f1 = files(&d1);
        assert_eq!(f1, files(&d2), "{args:?}: rerun differs");
        assert_eq!(f1, files(&d3), "{args:?}: thread count changed the bytes");
        assert!(!f1.is_empty(), "{args:?} wrote nothing");
        for d in [d1, d2, d3] {
            std::fs::remove_dir_all(&d).ok();
        }
    }
    pass(
        "13 cli-determinism",
        format!(
            "{} subcommands byte-identical across reruns and thread counts",
            cases.len()
        ),
    );
}
