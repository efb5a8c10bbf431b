//! Property tests for the structural invariants: shrinkage geometry, loss
//! axioms, dominance antisymmetry, selection invariance, fit equivariance,
//! and the test/p-value duality.

use proptest::prelude::*;

use risklab_core::estimator::{js_shrink, regression_ols, EstimatorSpec};
use risklab_core::loss::{loss_eval, LossFunction};
use risklab_core::model::{draw_sample, Matrix, StatisticalModel};
use risklab_core::normal;
use risklab_core::report::format_real;
use risklab_core::risk::{
    dominance_on_grid, scalar_grid, select_rule, CurveMeta, DominanceVerdict, RiskCurve,
    SelectionCriterion,
};
use risklab_core::testci::{np_test, TestSpec};

fn synthetic_curve(risks: &[f64], stderrs: &[f64]) -> RiskCurve {
    let axis: Vec<f64> = (0..risks.len()).map(|i| i as f64).collect();
    RiskCurve {
        points: scalar_grid(&axis),
        axis,
        risk: risks.to_vec(),
        stderr: stderrs.to_vec(),
        meta: CurveMeta {
            estimator: "synthetic".into(),
            loss: "square".into(),
            model: "normal-iid".into(),
            reps: 1000,
            master_seed: 0,
            chunk_size: 1,
        },
    }
}

proptest! {
    // m = 1 sits outside this bound: its shrink numerator is negative and
    // the factor exceeds one (flagged by aux.warning, covered below).
    #[test]
    fn js_plus_never_grows_the_vector(
        xs in prop::collection::vec(-50.0f64..50.0, 2..8),
        sigma2 in 0.01f64..25.0,
        n in 1usize..20,
    ) {
        let e = js_shrink(&xs, sigma2, n, true).unwrap();
        let norm_in: f64 = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm_out: f64 = e.value.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(norm_out <= norm_in + 1e-12);
        let f = e.aux.shrink_factor.unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        if xs.len() >= 3 {
            prop_assert!(f < 1.0);
        }
    }

    #[test]
    fn js_is_identity_scaled_for_low_dims(
        x0 in 0.1f64..10.0,
        x1 in -10.0f64..10.0,
        sigma2 in 0.1f64..4.0,
    ) {
        // m = 2: factor exactly one; m = 1: factor above one (negative numerator).
        let two = js_shrink(&[x0, x1], sigma2, 1, false).unwrap();
        prop_assert_eq!(two.aux.shrink_factor.unwrap(), 1.0);
        prop_assert_eq!(&two.value[..], &[x0, x1][..]);
        let one = js_shrink(&[x0], sigma2, 1, false).unwrap();
        prop_assert!(one.aux.shrink_factor.unwrap() > 1.0);
        prop_assert!(one.aux.warning.is_some());
    }

    #[test]
    fn losses_are_nonnegative_and_vanish_at_identity(
        est in -100.0f64..100.0,
        theta in -100.0f64..100.0,
        p in 0.2f64..5.0,
        n in 1usize..50,
        sigma2 in 0.01f64..10.0,
    ) {
        let losses = [
            LossFunction::Square,
            LossFunction::Absolute,
            LossFunction::Lp { p },
            LossFunction::ZeroOneEps { eps: None },
            LossFunction::KLNormal { n, sigma2 },
            LossFunction::SteinSum,
        ];
        for loss in losses {
            let v = loss_eval(&loss, &[est], &[theta]).unwrap();
            prop_assert!(v >= 0.0, "{loss:?} gave {v}");
            let at_truth = loss_eval(&loss, &[theta], &[theta]).unwrap();
            prop_assert_eq!(at_truth, 0.0);
        }
    }

    #[test]
    fn dominance_is_antisymmetric(
        risks_a in prop::collection::vec(0.0f64..10.0, 2..12),
        deltas in prop::collection::vec(-1.0f64..1.0, 2..12),
    ) {
        let len = risks_a.len().min(deltas.len());
        let a = synthetic_curve(&risks_a[..len], &vec![0.01; len]);
        let risks_b: Vec<f64> = risks_a[..len]
            .iter()
            .zip(&deltas[..len])
            .map(|(r, d)| (r + d).max(0.0))
            .collect();
        let b = synthetic_curve(&risks_b, &vec![0.01; len]);
        let ab = dominance_on_grid(&a, &b).unwrap().verdict;
        let ba = dominance_on_grid(&b, &a).unwrap().verdict;
        let mirrored = match ab {
            DominanceVerdict::ADominates => DominanceVerdict::BDominates,
            DominanceVerdict::BDominates => DominanceVerdict::ADominates,
            other => other,
        };
        prop_assert_eq!(ba, mirrored);
    }

    #[test]
    fn minimax_winner_invariant_under_loss_scaling(
        risks in prop::collection::vec(prop::collection::vec(0.01f64..10.0, 4), 2..6),
        scale in 0.01f64..100.0,
    ) {
        let curves: Vec<RiskCurve> = risks
            .iter()
            .map(|r| synthetic_curve(r, &vec![0.001; r.len()]))
            .collect();
        let scaled: Vec<RiskCurve> = risks
            .iter()
            .map(|r| {
                let sr: Vec<f64> = r.iter().map(|x| x * scale).collect();
                synthetic_curve(&sr, &vec![0.001 * scale; r.len()])
            })
            .collect();
        let base = select_rule(&curves, &SelectionCriterion::Minimax).unwrap();
        let after = select_rule(&scaled, &SelectionCriterion::Minimax).unwrap();
        prop_assert_eq!(base.winner, after.winner);
    }

    #[test]
    fn ols_fitted_values_invariant_to_column_rescaling(
        seed in 0u64..1000,
        u in prop::sample::select(vec![0.001f64, 0.1, 10.0, 1000.0]),
    ) {
        // A seeded random regression sample; rescale the last column.
        let model = StatisticalModel::regression(vec![1.0, 2.0, -0.5], 1.0, 30).unwrap();
        let s = draw_sample(&model, seed).unwrap();
        let (y, x) = risklab_core::estimator::split_regression(&s.values).unwrap();
        let base = regression_ols(&y, &x).unwrap();
        let mut scaled = Matrix::zeros(x.rows(), x.cols());
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                let v = x.get(r, c) * if c == 2 { u } else { 1.0 };
                scaled.set(r, c, v);
            }
        }
        let re = regression_ols(&y, &scaled).unwrap();
        for r in 0..x.rows() {
            let f0: f64 = (0..3).map(|j| x.get(r, j) * base.value[j]).sum();
            let f1: f64 = (0..3).map(|j| scaled.get(r, j) * re.value[j]).sum();
            prop_assert!((f0 - f1).abs() <= 1e-7 * f0.abs().max(1.0), "row {r}: {f0} vs {f1}");
        }
    }

    #[test]
    fn samplers_are_deterministic_in_seed(
        seed in any::<u64>(),
        theta in -5.0f64..5.0,
        n in 1usize..20,
    ) {
        let model = StatisticalModel::normal(theta, 1.0, n).unwrap();
        let a = draw_sample(&model, seed).unwrap();
        let b = draw_sample(&model, seed).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn reject_iff_p_value_below_alpha(
        xbar in -3.0f64..3.0,
        alpha in 0.001f64..0.5,
        n in 1usize..400,
    ) {
        let spec = TestSpec::new(0.0, alpha, n, 1.0).unwrap();
        let r = np_test(xbar, &spec).unwrap();
        prop_assert_eq!(r.reject, r.p_value < alpha);
    }

    #[test]
    fn normal_quantile_round_trips(p in 0.0001f64..0.9999) {
        let x = normal::quantile(p).unwrap();
        prop_assert!((normal::cdf(x) - p).abs() < 1e-12);
    }

    #[test]
    fn csv_reals_round_trip(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let parsed: f64 = format_real(x).parse().unwrap();
        prop_assert_eq!(parsed.to_bits(), x.to_bits());
    }

    #[test]
    fn crystal_ball_constant_across_samples(seed in any::<u64>(), constant in -1e6f64..1e6) {
        let model = StatisticalModel::normal(0.0, 1.0, 5).unwrap();
        let s1 = draw_sample(&model, seed).unwrap();
        let s2 = draw_sample(&model, seed.wrapping_add(1)).unwrap();
        let spec = EstimatorSpec::CrystalBall { constant };
        prop_assert_eq!(spec.eval(&s1.values).unwrap().value, spec.eval(&s2.values).unwrap().value);
    }
}
