//! Desk-scale end-to-end runs of every experiment: verdicts hold, reports
//! are deterministic, and every verdict can be recomputed from the tables.

use risklab_core::estimator::EstimatorSpec;
use risklab_core::experiments::{
    recompute_verdicts, run_consistency, run_coverage, run_crystal_ball, run_power_curve,
    run_quantifier_contrast, run_stein, run_units_sensitivity,
};
use risklab_core::model::StatisticalModel;
use risklab_core::report::ExperimentReport;
use risklab_core::testci::TestSpec;

fn assert_report_contract(report: &ExperimentReport, rebuilt: &ExperimentReport) {
    assert_eq!(report.to_json(), rebuilt.to_json(), "report not reproducible");
    let recomputed = recompute_verdicts(report).unwrap();
    assert_eq!(
        recomputed, report.verdicts,
        "verdicts are not derivable from the tables"
    );
    for v in &report.verdicts {
        assert!(v.pass, "verdict {} failed: {}", v.claim, v.detail);
    }
}

#[test]
fn stein_desk_scale() {
    let run = || run_stein(5, 1.0, &[0.0, 1.0, 2.0, 4.0, 8.0], 30_000, 42, 4).unwrap();
    let report = run();
    assert_report_contract(&report, &run());
    let t = report.table("risk").unwrap();
    assert_eq!(t.n_rows(), 5);
    // LS risk is flat at m sigma2 = 5.
    for r in 0..5 {
        let ls = t.num(r, "risk_ls").unwrap();
        let se = t.num(r, "stderr_ls").unwrap();
        assert!((ls - 5.0).abs() < 3.0 * se);
    }
}

#[test]
fn stein_m2_degeneracy() {
    let report = run_stein(2, 1.0, &[0.0, 2.0], 5_000, 7, 2).unwrap();
    assert!(report.passed());
    let claims: Vec<&str> = report.verdicts.iter().map(|v| v.claim.as_str()).collect();
    assert!(claims.contains(&"js-coincides-with-ls-at-m-2"));
    // Thread count must not change a single byte of the report.
    let other = run_stein(2, 1.0, &[0.0, 2.0], 5_000, 7, 11).unwrap();
    assert_eq!(report.to_json(), other.to_json());
}

#[test]
fn crystal_ball_desk_scale() {
    let grid: Vec<f64> = (0..61).map(|i| 7_405_926.0 - 0.3 + 0.01 * i as f64).collect();
    let run = || run_crystal_ball(100, &grid, 0.5, 20_000, 42, 4).unwrap();
    let report = run();
    assert_report_contract(&report, &run());
}

#[test]
fn crystal_ball_requires_straddling_grid() {
    let err = run_crystal_ball(100, &[0.0, 1.0], 0.5, 1_000, 1, 1).unwrap_err();
    assert!(matches!(err, risklab_core::Error::Config(_)));
}

#[test]
fn consistency_desk_scale() {
    let run = || run_consistency(&[25, 100, 400], 20_000, 42, 4).unwrap();
    let report = run();
    assert_report_contract(&report, &run());
    // The mean's risk drops 16x from n=25 to n=400.
    let t = report.table("mse").unwrap();
    let first = t.num(0, "mse_ls_mean").unwrap();
    let last = t.num(2, "mse_ls_mean").unwrap();
    assert!(last < first / 10.0);
}

#[test]
fn units_desk_scale() {
    let run = || {
        run_units_sensitivity(
            &[1.0, 1.8, 0.5, -0.004],
            200,
            1.0,
            &[1.0, 10.0, 1000.0],
            2.0,
            500,
            42,
            4,
        )
        .unwrap()
    };
    let report = run();
    assert_report_contract(&report, &run());
}

#[test]
fn coverage_desk_scale() {
    let run = || run_coverage(&[0.05, 0.32], &[25], 0.0, 20_000, 42, 4).unwrap();
    let report = run();
    assert_report_contract(&report, &run());
}

#[test]
fn power_desk_scale() {
    let spec = TestSpec::new(0.0, 0.05, 100, 1.0).unwrap();
    let run = || run_power_curve(&spec, &[0.1, 0.2, 0.3, 0.4], 20_000, 42, 4).unwrap();
    let report = run();
    assert_report_contract(&report, &run());
    // The table carries the closed-form anchor at theta1 = 0.3.
    let t = report.table("power").unwrap();
    assert!((t.num(2, "power").unwrap() - 0.9123).abs() < 5e-4);
}

#[test]
fn quantifier_crystal_ball_and_js() {
    let model = StatisticalModel::normal(0.0, 1.0, 100).unwrap();
    let est = EstimatorSpec::CrystalBall {
        constant: 7_405_926.0,
    };
    let grid = vec![-1.0, 0.0, 1.0, 7_405_925.0, 7_405_926.0, 7_405_927.0];
    let run = || run_quantifier_contrast(&est, &model, &grid, 5_000, 42, 2).unwrap();
    let report = run();
    assert_report_contract(&report, &run());
    let scalar = report.table("scalar").unwrap();
    assert_eq!(scalar.num(0, "curve_min_theta").unwrap(), 7_405_926.0);
    assert_eq!(
        scalar.num(0, "mse_at_theta_star").unwrap(),
        7_405_926.0f64 * 7_405_926.0
    );

    // Vector sweep: the shrinkage risk at the origin is far below the
    // least-squares level the curve climbs to.
    let model5 = StatisticalModel::multinormal(vec![0.0; 5], 1.0, 1).unwrap();
    let js = EstimatorSpec::JS { sigma2: 1.0 };
    let report_js =
        run_quantifier_contrast(&js, &model5, &[0.0, 1.0, 2.0, 4.0, 8.0], 30_000, 42, 4).unwrap();
    assert!(report_js.passed());
    let scalar_js = report_js.table("scalar").unwrap();
    let mse0 = scalar_js.num(0, "mse_at_theta_star").unwrap();
    let se0 = scalar_js.num(0, "stderr").unwrap();
    assert!((mse0 - 2.0).abs() < 3.0 * se0, "JS at origin: {mse0}");
    let curve = report_js.table("curve").unwrap();
    let tail = curve.num(4, "risk").unwrap();
    assert!(tail > 4.0, "JS risk climbs toward m: {tail}");
}

#[test]
fn ls_mean_quantifier_readings_coincide() {
    let model = StatisticalModel::normal(1.0, 1.0, 25).unwrap();
    let report = run_quantifier_contrast(
        &EstimatorSpec::LSMean,
        &model,
        &[-1.0, 0.0, 1.0, 2.0],
        10_000,
        42,
        2,
    )
    .unwrap();
    assert!(report.passed(), "{:#?}", report.verdicts);
}

#[test]
fn unknown_report_name_rejected() {
    let model = StatisticalModel::normal(0.0, 1.0, 10).unwrap();
    let mut report = run_quantifier_contrast(
        &EstimatorSpec::LSMean,
        &model,
        &[0.0, 1.0],
        1_000,
        1,
        1,
    )
    .unwrap();
    report.name = "mystery".into();
    assert!(recompute_verdicts(&report).is_err());
}
