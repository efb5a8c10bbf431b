//! Conjugate Normal-Normal posteriors, posterior-risk minimization, and the
//! grid-level hypothesis checks for flat-risk minimax selection.
//!
//! Posterior risks are evaluated on grid representations: conjugate Normal
//! posteriors are discretized over mean +/- 8 posterior standard deviations
//! with at least 2001 points, leaving under 1e-14 of truncated mass. The
//! numeric minimizer of the posterior risk is cross-checked against the
//! closed-form action (mean under square loss, median under absolute loss,
//! window-mode under zero-one loss).

use serde::{Deserialize, Serialize};

use crate::loss::{loss_eval, LossFunction};
use crate::risk::{dominance_on_grid, DominanceVerdict, RiskCurve};
use crate::{Error, Result};

/// Discretization used for conjugate posteriors.
const GRID_POINTS: usize = 2001;
const GRID_HALF_WIDTH_SDS: f64 = 8.0;

/// A normalized distribution on an ordered grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDistribution {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridDistribution {
    /// Builds a grid distribution, validating and normalizing the weights.
    pub fn new(grid: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != weights.len() {
            return Err(Error::data(
                "grid distribution needs matching nonempty grid and weights",
            ));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::data("grid must be strictly increasing"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::data("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::data("weights must have positive total mass"));
        }
        Ok(GridDistribution {
            grid,
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn mean(&self) -> f64 {
        self.grid
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| t * w)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.grid
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * (t - mu) * (t - mu))
            .sum()
    }

    /// Smallest grid point where the cumulative weight reaches one half.
    pub fn median(&self) -> f64 {
        let mut cum = 0.0;
        for (t, w) in self.grid.iter().zip(&self.weights) {
            cum += w;
            if cum >= 0.5 {
                return *t;
            }
        }
        *self.grid.last().unwrap()
    }

    /// Maximizer of the eps-window weight sum (the smoothed mode); first
    /// index wins ties.
    pub fn window_mode(&self, eps: f64) -> f64 {
        let mut best_idx = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, t) in self.grid.iter().enumerate() {
            let mass: f64 = self
                .grid
                .iter()
                .zip(&self.weights)
                .filter(|(u, _)| (*u - t).abs() < eps)
                .map(|(_, w)| w)
                .sum();
            if mass > best {
                best = mass;
                best_idx = i;
            }
        }
        self.grid[best_idx]
    }

    /// Mass inside the closed window [theta - eps, theta + eps].
    pub fn window_mass(&self, theta: f64, eps: f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.weights)
            .filter(|(t, _)| (*t - theta).abs() <= eps)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn step(&self) -> f64 {
        if self.grid.len() < 2 {
            0.0
        } else {
            (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
        }
    }
}

/// Prior over the mean parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Prior {
    NormalConjugate { mu0: f64, tau2: f64 },
    Grid(GridDistribution),
}

impl Prior {
    pub fn validate(&self) -> Result<()> {
        match self {
            Prior::NormalConjugate { tau2, .. } if *tau2 <= 0.0 => {
                Err(Error::config("prior variance tau2 must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Posterior over the mean parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Posterior {
    NormalConjugate { mu_n: f64, tau_n2: f64 },
    Grid(GridDistribution),
}

impl Posterior {
    pub fn mean(&self) -> f64 {
        match self {
            Posterior::NormalConjugate { mu_n, .. } => *mu_n,
            Posterior::Grid(g) => g.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Posterior::NormalConjugate { tau_n2, .. } => *tau_n2,
            Posterior::Grid(g) => g.variance(),
        }
    }

    /// Grid representation for quadrature; conjugate posteriors discretize
    /// over mean +/- 8 sd with 2001 points.
    pub fn to_grid(&self) -> GridDistribution {
        match self {
            Posterior::Grid(g) => g.clone(),
            Posterior::NormalConjugate { mu_n, tau_n2 } => {
                let sd = tau_n2.sqrt();
                let lo = mu_n - GRID_HALF_WIDTH_SDS * sd;
                let hi = mu_n + GRID_HALF_WIDTH_SDS * sd;
                let step = (hi - lo) / (GRID_POINTS - 1) as f64;
                let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
                let weights: Vec<f64> = grid
                    .iter()
                    .map(|t| crate::normal::pdf((t - mu_n) / sd))
                    .collect();
                GridDistribution::new(grid, weights).expect("conjugate discretization is valid")
            }
        }
    }
}

/// Conjugate Normal-Normal update with known observation variance:
/// `mu_n = (mu0/tau2 + n xbar/sigma2) / (1/tau2 + n/sigma2)`,
/// `tau_n2 = 1 / (1/tau2 + n/sigma2)`. With `n = 0` the posterior is the
/// prior; as `tau2` grows the posterior tends to `N(xbar, sigma2/n)`.
pub fn posterior_normal_normal(
    mu0: f64,
    tau2: f64,
    n: usize,
    xbar: f64,
    sigma2: f64,
) -> Result<Posterior> {
    if tau2 <= 0.0 {
        return Err(Error::config("prior variance tau2 must be positive"));
    }
    if sigma2 <= 0.0 {
        return Err(Error::config("observation variance sigma2 must be positive"));
    }
    if n == 0 {
        return Ok(Posterior::NormalConjugate {
            mu_n: mu0,
            tau_n2: tau2,
        });
    }
    let precision = 1.0 / tau2 + n as f64 / sigma2;
    let mu_n = (mu0 / tau2 + n as f64 * xbar / sigma2) / precision;
    Ok(Posterior::NormalConjugate {
        mu_n,
        tau_n2: 1.0 / precision,
    })
}

/// Brute-force grid Bayes update of a grid prior against a Normal mean
/// likelihood with known variance; the independent cross-check for the
/// conjugate formula.
pub fn grid_posterior_update(
    prior: &GridDistribution,
    n: usize,
    xbar: f64,
    sigma2: f64,
) -> Result<GridDistribution> {
    if sigma2 <= 0.0 {
        return Err(Error::config("observation variance sigma2 must be positive"));
    }
    if n == 0 {
        return Ok(prior.clone());
    }
    // Work with shifted log-likelihoods for stability.
    let logls: Vec<f64> = prior
        .grid
        .iter()
        .map(|t| -(n as f64) * (xbar - t) * (xbar - t) / (2.0 * sigma2))
        .collect();
    let max_logl = logls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = prior
        .weights
        .iter()
        .zip(&logls)
        .map(|(w, l)| w * (l - max_logl).exp())
        .collect();
    GridDistribution::new(prior.grid.clone(), weights)
}

/// Posterior expected loss of taking `action`, by quadrature against the
/// posterior's grid representation. Only square, absolute and zero-one
/// losses are admitted.
pub fn posterior_risk(posterior: &Posterior, loss: &LossFunction, action: f64) -> Result<f64> {
    match loss {
        LossFunction::Square | LossFunction::Absolute | LossFunction::ZeroOneEps { .. } => {}
        other => {
            return Err(Error::config(format!(
                "posterior risk supports square/absolute/zero-one losses, got {}",
                other.name()
            )))
        }
    }
    let g = posterior.to_grid();
    let mut acc = 0.0;
    for (t, w) in g.grid.iter().zip(&g.weights) {
        acc += w * loss_eval(loss, &[action], &[*t])?;
    }
    Ok(acc)
}

/// Result of numerically minimizing the posterior risk over an action grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesAction {
    pub action: f64,
    pub posterior_risk: f64,
    /// Closed-form action: posterior mean, median or window-mode.
    pub closed_form: f64,
    /// Numeric minimizer within one action-grid step of the closed form.
    pub matches_closed_form: bool,
    pub grid_step: f64,
    /// Whether the minimum was tied (first index reported).
    pub tied: bool,
}

/// Minimizes the posterior risk over the posterior's own grid and
/// cross-checks the minimizer against the closed-form Bayes action.
pub fn bayes_action(posterior: &Posterior, loss: &LossFunction) -> Result<BayesAction> {
    let g = posterior.to_grid();
    let step = g.step().max(f64::EPSILON);

    // One pass of posterior risks over the action grid; O(grid^2) but the
    // grids here are small.
    let mut best_idx = 0;
    let mut best = f64::INFINITY;
    let mut tied = false;
    for (i, a) in g.grid.iter().enumerate() {
        let r = {
            let mut acc = 0.0;
            for (t, w) in g.grid.iter().zip(&g.weights) {
                acc += w * loss_eval(loss, &[*a], &[*t])?;
            }
            acc
        };
        if r < best {
            best = r;
            best_idx = i;
            tied = false;
        } else if r == best {
            tied = true;
        }
    }
    let action = g.grid[best_idx];

    let closed_form = match loss {
        LossFunction::Square => g.mean(),
        LossFunction::Absolute => g.median(),
        LossFunction::ZeroOneEps { eps } => {
            let e = eps.unwrap_or_else(|| crate::loss::default_zero_one_eps(g.mean()));
            g.window_mode(e)
        }
        other => {
            return Err(Error::config(format!(
                "bayes_action supports square/absolute/zero-one losses, got {}",
                other.name()
            )))
        }
    };

    Ok(BayesAction {
        action,
        posterior_risk: best,
        closed_form,
        matches_closed_form: (action - closed_form).abs() <= step * (1.0 + 1e-9),
        grid_step: step,
        tied,
    })
}

/// Reports, for each grid point, whether the prior puts positive mass on
/// the closed eps-window around it.
///
/// A conjugate Normal prior has positive mass on every interval, so its
/// entries are true by construction; grid priors are checked by summing the
/// window weights.
pub fn check_full_support(prior: &Prior, theta_grid: &[f64], eps: f64) -> Result<Vec<bool>> {
    prior.validate()?;
    if eps <= 0.0 {
        return Err(Error::config("full-support check requires eps > 0"));
    }
    Ok(match prior {
        Prior::NormalConjugate { .. } => vec![true; theta_grid.len()],
        Prior::Grid(g) => theta_grid
            .iter()
            .map(|t| g.window_mass(*t, eps) > 0.0)
            .collect(),
    })
}

/// Grid-level check of the flat-risk route to minimax selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRiskCheck {
    /// Curve is flat within `tol` plus 3 times its largest standard error.
    pub is_constant: bool,
    /// No candidate grid-dominates the curve.
    pub is_grid_undominated: bool,
    /// Both of the above.
    pub minimax_flag: bool,
    /// True when the candidate set was empty, making undominatedness vacuous.
    pub vacuous: bool,
}

/// Checks whether a curve is constant on the grid and undominated by each
/// candidate; the conjunction flags it as the minimax pick of the set.
pub fn constant_risk_minimax_check(
    curve: &RiskCurve,
    candidates: &[RiskCurve],
    tol: f64,
) -> Result<ConstantRiskCheck> {
    if curve.is_empty() {
        return Err(Error::data("constant-risk check requires a nonempty curve"));
    }
    let max = curve.risk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = curve.risk.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_se = curve.stderr.iter().cloned().fold(0.0, f64::max);
    let is_constant = (max - min) <= tol + 3.0 * max_se;

    let mut undominated = true;
    for cand in candidates {
        let rep = dominance_on_grid(cand, curve)?;
        if rep.verdict == DominanceVerdict::ADominates {
            undominated = false;
            break;
        }
    }

    Ok(ConstantRiskCheck {
        is_constant,
        is_grid_undominated: undominated,
        minimax_flag: is_constant && undominated,
        vacuous: candidates.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{EstimatorSpec, CRYSTAL_BALL_DEFAULT};
    use crate::model::StatisticalModel;
    use crate::risk::{risk_curves, scalar_grid};
    use crate::rng::SeedPlan;

    #[test]
    fn conjugate_update_prior_n01_x2() {
        // Prior N(0,1), one observation x = 2, sigma2 = 1 -> N(1, 1/2).
        let p = posterior_normal_normal(0.0, 1.0, 1, 2.0, 1.0).unwrap();
        assert!((p.mean() - 1.0).abs() < 1e-15);
        assert!((p.variance() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_prior_limit_recovers_sample_mean() {
        let p = posterior_normal_normal(3.0, 1e12, 25, 0.4, 1.0).unwrap();
        assert!((p.mean() - 0.4).abs() < 1e-9);
        assert!((p.variance() - 1.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn no_data_returns_prior() {
        let p = posterior_normal_normal(1.5, 2.0, 0, f64::NAN, 1.0).unwrap();
        assert_eq!(p.mean(), 1.5);
        assert_eq!(p.variance(), 2.0);
    }

    #[test]
    fn conjugate_agrees_with_grid_update() {
        // Wide prior grid around the answer; moments agree to grid tolerance.
        let grid: Vec<f64> = (0..4001).map(|i| -10.0 + 0.005 * i as f64).collect();
        let weights: Vec<f64> = grid.iter().map(|t| crate::normal::pdf(*t)).collect();
        let prior = GridDistribution::new(grid, weights).unwrap();
        let gp = grid_posterior_update(&prior, 1, 2.0, 1.0).unwrap();
        let conj = posterior_normal_normal(0.0, 1.0, 1, 2.0, 1.0).unwrap();
        assert!((gp.mean() - conj.mean()).abs() < 1e-3);
        assert!((gp.variance() - conj.variance()).abs() < 1e-3);
    }

    #[test]
    fn posterior_risk_square_at_mean_is_variance() {
        let p = posterior_normal_normal(0.0, 1.0, 1, 2.0, 1.0).unwrap();
        let r = posterior_risk(&p, &LossFunction::Square, p.mean()).unwrap();
        assert!((r - 0.5).abs() < 1e-6, "risk {r}");
    }

    #[test]
    fn point_mass_posterior_has_zero_risk_at_its_atom() {
        // A sharply peaked two-point grid: all mass at 1.0.
        let g = GridDistribution::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let p = Posterior::Grid(g);
        for loss in [
            LossFunction::Square,
            LossFunction::Absolute,
            LossFunction::ZeroOneEps { eps: Some(1e-9) },
        ] {
            assert_eq!(posterior_risk(&p, &loss, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn bayes_actions_match_closed_forms_symmetric() {
        let p = posterior_normal_normal(0.0, 1.0, 1, 2.0, 1.0).unwrap();
        let sq = bayes_action(&p, &LossFunction::Square).unwrap();
        assert!(sq.matches_closed_form, "square: {sq:?}");
        assert!((sq.action - 1.0).abs() <= 2.0 * sq.grid_step);
        let ab = bayes_action(&p, &LossFunction::Absolute).unwrap();
        assert!(ab.matches_closed_form);
        // Symmetric posterior: median equals mean.
        assert!((ab.action - 1.0).abs() <= 2.0 * ab.grid_step);
    }

    #[test]
    fn skewed_posterior_orders_mean_median_mode() {
        // Right-skewed grid posterior: mode < median < mean; the numeric
        // minimizers under zero-one / absolute / square losses follow.
        let grid: Vec<f64> = (0..801).map(|i| i as f64 * 0.01).collect();
        let weights: Vec<f64> = grid
            .iter()
            .map(|t| if *t <= 0.0 { 0.0 } else { t * (-2.0 * t).exp() })
            .collect();
        let g = GridDistribution::new(grid, weights).unwrap();
        let p = Posterior::Grid(g);
        let sq = bayes_action(&p, &LossFunction::Square).unwrap();
        let ab = bayes_action(&p, &LossFunction::Absolute).unwrap();
        let zo = bayes_action(&p, &LossFunction::ZeroOneEps { eps: Some(0.025) }).unwrap();
        assert!(sq.matches_closed_form && ab.matches_closed_form && zo.matches_closed_form);
        // Gamma(2, rate 2): mean 1, median ~0.84, mode 0.5.
        assert!(
            zo.action < ab.action && ab.action < sq.action,
            "mode {} median {} mean {}",
            zo.action,
            ab.action,
            sq.action
        );
    }

    #[test]
    fn full_support_checks() {
        let prior = Prior::NormalConjugate { mu0: 0.0, tau2: 1.0 };
        let grid = [-3.0, 0.0, 3.0, 50.0];
        assert_eq!(check_full_support(&prior, &grid, 0.1).unwrap(), vec![true; 4]);

        // A grid prior with a zero-weight gap wider than 2 eps.
        let g = GridDistribution::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            vec![1.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let flags = check_full_support(&Prior::Grid(g), &[0.0, 2.0, 4.0], 0.5).unwrap();
        assert_eq!(flags, vec![true, false, true]);

        // Uniform grid prior: every window holds mass.
        let u = GridDistribution::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            check_full_support(&Prior::Grid(u), &[0.0, 1.0, 2.0], 0.6).unwrap(),
            vec![true; 3]
        );
    }

    #[test]
    fn constant_risk_minimax_for_ls_mean() {
        let n = 25;
        let model = StatisticalModel::normal(0.0, 1.0, n).unwrap();
        let grid = scalar_grid(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let plan = SeedPlan::with_seed(9);
        let mc = risk_curves(
            &model,
            &grid,
            &[
                EstimatorSpec::LSMean,
                EstimatorSpec::CrystalBall {
                    constant: CRYSTAL_BALL_DEFAULT,
                },
            ],
            &LossFunction::Square,
            5000,
            &plan,
            2,
        )
        .unwrap();
        let check =
            constant_risk_minimax_check(&mc.curves[0], &mc.curves[1..], 1e-6).unwrap();
        assert!(check.is_constant);
        assert!(check.is_grid_undominated);
        assert!(check.minimax_flag);
        assert!(!check.vacuous);

        // Crystal ball's parabola is nowhere near constant on this grid.
        let cb = constant_risk_minimax_check(&mc.curves[1], &mc.curves[..1], 1e-6).unwrap();
        assert!(!cb.is_constant);
        assert!(!cb.minimax_flag);

        // Empty candidate set: vacuously undominated.
        let vac = constant_risk_minimax_check(&mc.curves[0], &[], 1e-6).unwrap();
        assert!(vac.is_grid_undominated && vac.vacuous);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(posterior_normal_normal(0.0, 0.0, 1, 1.0, 1.0).is_err());
        assert!(posterior_normal_normal(0.0, 1.0, 1, 1.0, -1.0).is_err());
        assert!(GridDistribution::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(GridDistribution::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(GridDistribution::new(vec![0.0, 1.0], vec![-1.0, 1.0]).is_err());
        let p = posterior_normal_normal(0.0, 1.0, 1, 2.0, 1.0).unwrap();
        assert!(posterior_risk(&p, &LossFunction::SteinSum, 0.0).is_err());
        let prior = Prior::NormalConjugate { mu0: 0.0, tau2: 1.0 };
        assert!(check_full_support(&prior, &[0.0], 0.0).is_err());
    }
}
