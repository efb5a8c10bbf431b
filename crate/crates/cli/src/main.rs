//! risklab: seeded Monte Carlo experiments on losses, risks, shrinkage,
//! coverage and test error probabilities.
//!
//! Exit codes: 0 success, 1 at least one verdict failed, 2 configuration
//! error, 3 data or numerical error. Identical invocations produce
//! byte-identical output files regardless of `--threads`.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use risklab_core::bayes::{bayes_action, posterior_normal_normal};
use risklab_core::estimator::{EstimatorSpec, CRYSTAL_BALL_DEFAULT};
use risklab_core::experiments;
use risklab_core::loss::LossFunction;
use risklab_core::model::StatisticalModel;
use risklab_core::report::{Cell, Config, ExperimentReport, ParamValue, Table, Verdict};
use risklab_core::risk::{dominance_on_grid, norm_grid, risk_curves, scalar_grid};
use risklab_core::rng::SeedPlan;
use risklab_core::testci::{np_test, TestSpec};
use risklab_core::{Error, Result};

use config::{resolve, resolve_with, FileConfig};
use output::write_report;

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo replications.
    #[arg(long)]
    reps: Option<u64>,
    /// Output directory (default: $RISKLAB_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which files to write.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker thread cap; never affects the numbers.
    #[arg(long)]
    threads: Option<usize>,
    /// key=value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
}

struct CommonResolved {
    seed: u64,
    reps: u64,
    out: PathBuf,
    format: Format,
    threads: usize,
}

impl Common {
    /// Merges flags with the config file (flags win) at a per-command
    /// default rep count.
    fn merge(&self, file: &mut FileConfig, default_reps: u64) -> Result<CommonResolved> {
        let seed = resolve(self.seed, file.take_u64("seed")?, DEFAULT_SEED);
        let reps = resolve(self.reps, file.take_u64("reps")?, default_reps);
        let out = resolve_with(
            self.out.clone(),
            file.take_string("out")?.map(PathBuf::from),
            || {
                std::env::var_os("RISKLAB_OUT_DIR")
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("."))
            },
        );
        let format = resolve(
            self.format,
            match file.take_string("format")?.as_deref() {
                None => None,
                Some("csv") => Some(Format::Csv),
                Some("json") => Some(Format::Json),
                Some("both") => Some(Format::Both),
                Some(other) => {
                    return Err(Error::config(format!(
                        "config key format: expected csv|json|both, got {other:?}"
                    )))
                }
            },
            Format::Both,
        );
        let threads = resolve(
            self.threads,
            file.take_usize("threads")?,
            risklab_core::exec::default_threads(),
        );
        if threads == 0 {
            return Err(Error::config("threads must be >= 1"));
        }
        Ok(CommonResolved {
            seed,
            reps,
            out,
            format,
            threads,
        })
    }
}

fn load_file(common: &Common) -> Result<FileConfig> {
    match &common.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "risklab", version, about = "seeded decision-theory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shrinkage dominance sweep (least squares vs James-Stein vs positive part).
    Stein {
        #[command(flatten)]
        common: Common,
        /// Mean-vector dimension (>= 2).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        /// Grid of mean-vector norms.
        #[arg(long, value_delimiter = ',')]
        theta_norms: Option<Vec<f64>>,
    },
    /// Sample mean vs the data-ignoring constant rule around the constant.
    CrystalBall {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// Constant the rule always answers.
        #[arg(long)]
        constant: Option<f64>,
        /// Explicit theta grid (default: constant +- 0.3, 61 points).
        #[arg(long, value_delimiter = ',')]
        theta_grid: Option<Vec<f64>>,
        /// Inner-window half-width multiplier in (0, 1).
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Squared-error risk at the true value as n grows, for four rules.
    Consistency {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Unit-of-measurement sensitivity of the summed squared-error loss.
    Units {
        #[command(flatten)]
        common: Common,
        /// True coefficients, intercept first.
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        /// Column scale factors to sweep.
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        /// Shrinkage constant (default: number of coefficients - 2).
        #[arg(long)]
        c: Option<f64>,
    },
    /// Interval coverage over a grid of levels and sample sizes.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        theta_star: Option<f64>,
    },
    /// Power curve of the one-sided Normal mean test.
    Power {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta0: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        theta1_grid: Option<Vec<f64>>,
    },
    /// Scalar MSE at the true value vs the MSE curve over a grid.
    Quantifier {
        #[command(flatten)]
        common: Common,
        /// ls-mean | crystal-ball | js | js-plus | toy-last | toy-first-last
        #[arg(long)]
        estimator: Option<String>,
        /// normal | multinormal
        #[arg(long)]
        model: Option<String>,
        /// Dimension for the multinormal sweep.
        #[arg(long)]
        m: Option<usize>,
        /// True value (first coordinate for vector models).
        #[arg(long)]
        theta_star: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        /// Grid of theta values (norms for vector models).
        #[arg(long, value_delimiter = ',')]
        theta_grid: Option<Vec<f64>>,
        /// Constant for the crystal-ball rule.
        #[arg(long)]
        constant: Option<f64>,
    },
    /// Monte Carlo risk curve for one estimator.
    RiskCurve {
        #[command(flatten)]
        common: Common,
        /// normal | multinormal | laplace | uniform
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        estimator: Option<String>,
        /// square | absolute | lp | zero-one | kl | stein-sum
        #[arg(long)]
        loss: Option<String>,
        /// Exponent for the lp loss.
        #[arg(long)]
        p: Option<f64>,
        /// Window for the zero-one loss.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        theta_grid: Option<Vec<f64>>,
        #[arg(long)]
        constant: Option<f64>,
    },
    /// Pairwise grid-dominance comparison of two estimators.
    Dominance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        estimator_a: Option<String>,
        #[arg(long)]
        estimator_b: Option<String>,
        #[arg(long)]
        loss: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        theta_grid: Option<Vec<f64>>,
        #[arg(long)]
        constant: Option<f64>,
    },
    /// Posterior-risk minimizer vs the closed-form Bayes action.
    BayesAction {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu0: Option<f64>,
        #[arg(long)]
        tau2: Option<f64>,
        #[arg(long)]
        xbar: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        /// square | absolute | zero-one
        #[arg(long)]
        loss: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// One-sided Normal mean test on an observed sample mean.
    Test {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        xbar: Option<f64>,
        #[arg(long)]
        theta0: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
    },
}

fn estimator_from_name(
    name: &str,
    sigma2: f64,
    constant: f64,
    c: Option<f64>,
) -> Result<EstimatorSpec> {
    Ok(match name {
        "ls-mean" | "mean" => EstimatorSpec::LSMean,
        "js" => EstimatorSpec::JS { sigma2 },
        "js-plus" => EstimatorSpec::JSPlus { sigma2 },
        "panel-ls" => EstimatorSpec::PanelLS,
        "panel-js-plus" => EstimatorSpec::PanelJSPlus { sigma2 },
        "crystal-ball" => EstimatorSpec::CrystalBall { constant },
        "toy-last" => EstimatorSpec::ToyLast,
        "toy-first-last" => EstimatorSpec::ToyFirstLast,
        "ols" => EstimatorSpec::OLS,
        "regression-js" => EstimatorSpec::RegressionJS { c: c.unwrap_or(1.0) },
        other => return Err(Error::config(format!("unknown estimator {other}"))),
    })
}

fn loss_from_name(
    name: &str,
    p: Option<f64>,
    eps: Option<f64>,
    n: usize,
    sigma2: f64,
) -> Result<LossFunction> {
    Ok(match name {
        "square" => LossFunction::Square,
        "absolute" => LossFunction::Absolute,
        "lp" => LossFunction::Lp { p: p.unwrap_or(2.0) },
        "zero-one" => LossFunction::ZeroOneEps { eps },
        "kl" => LossFunction::KLNormal { n, sigma2 },
        "stein-sum" => LossFunction::SteinSum,
        other => return Err(Error::config(format!("unknown loss {other}"))),
    })
}

/// Builds the model for curve-style commands; univariate kinds ignore `m`.
/// The placeholder parameter is overwritten point by point along the grid.
fn model_from_name(
    kind: &str,
    m: usize,
    n: usize,
    sigma2: f64,
    theta0: f64,
) -> Result<StatisticalModel> {
    match kind {
        "normal" => StatisticalModel::normal(theta0, sigma2, n),
        "multinormal" => {
            let mut theta = vec![0.0; m];
            theta[0] = theta0;
            StatisticalModel::multinormal(theta, sigma2, n)
        }
        "laplace" => StatisticalModel::laplace(theta0, sigma2, n),
        "uniform" => StatisticalModel::uniform(if theta0 > 0.0 { theta0 } else { 1.0 }, n),
        other => Err(Error::config(format!("unknown model {other}"))),
    }
}

/// Grid of parameter points for a model: plain for univariate kinds, padded
/// vectors (r, 0, ..., 0) for the isotropic multivariate kind.
fn grid_for_model(model: &StatisticalModel, axis: &[f64]) -> Vec<Vec<f64>> {
    if model.param_dim() == 1 {
        scalar_grid(axis)
    } else {
        norm_grid(axis, model.param_dim())
    }
}

fn run(cli: Cli) -> Result<(ExperimentReport, CommonResolved)> {
    match cli.command {
        Command::Stein {
            common,
            m,
            sigma2,
            theta_norms,
        } => {
            let mut file = load_file(&common)?;
            let m = resolve(m, file.take_usize("m")?, 5);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let norms = resolve(
                theta_norms,
                file.take_f64_list("theta_norms")?,
                vec![0.0, 1.0, 2.0, 4.0, 8.0],
            );
            let c = common.merge(&mut file, 1_000_000)?;
            file.finish()?;
            let report = experiments::run_stein(m, sigma2, &norms, c.reps, c.seed, c.threads)?;
            Ok((report, c))
        }
        Command::CrystalBall {
            common,
            n,
            constant,
            theta_grid,
            lambda,
        } => {
            let mut file = load_file(&common)?;
            let n = resolve(n, file.take_usize("n")?, 100);
            let constant = resolve(constant, file.take_f64("constant")?, CRYSTAL_BALL_DEFAULT);
            let grid = resolve_with(theta_grid, file.take_f64_list("theta_grid")?, || {
                (0..61).map(|i| constant - 0.3 + 0.01 * i as f64).collect()
            });
            let lambda = resolve(lambda, file.take_f64("lambda")?, 0.5);
            let c = common.merge(&mut file, 100_000)?;
            file.finish()?;
            let report = experiments::run_crystal_ball_with_constant(
                n, constant, &grid, lambda, c.reps, c.seed, c.threads,
            )?;
            Ok((report, c))
        }
        Command::Consistency { common, n_list } => {
            let mut file = load_file(&common)?;
            let n_list = resolve(
                n_list,
                file.take_usize_list("n_list")?,
                vec![25, 100, 400, 1600],
            );
            let c = common.merge(&mut file, 100_000)?;
            file.finish()?;
            let report = experiments::run_consistency(&n_list, c.reps, c.seed, c.threads)?;
            Ok((report, c))
        }
        Command::Units {
            common,
            beta,
            n,
            sigma2,
            scales,
            c,
        } => {
            let mut file = load_file(&common)?;
            let beta = resolve(
                beta,
                file.take_f64_list("beta")?,
                vec![1.0, 1.8, 0.5, -0.004],
            );
            let n = resolve(n, file.take_usize("n")?, 200);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let scales = resolve(
                scales,
                file.take_f64_list("scales")?,
                vec![1.0, 10.0, 1000.0],
            );
            let c_shrink =
                resolve_with(c, file.take_f64("c")?, || (beta.len() as f64 - 2.0).max(1.0));
            let cr = common.merge(&mut file, 1000)?;
            file.finish()?;
            let report = experiments::run_units_sensitivity(
                &beta, n, sigma2, &scales, c_shrink, cr.reps, cr.seed, cr.threads,
            )?;
            Ok((report, cr))
        }
        Command::Coverage {
            common,
            alphas,
            n_list,
            theta_star,
        } => {
            let mut file = load_file(&common)?;
            let alphas = resolve(alphas, file.take_f64_list("alphas")?, vec![0.05, 0.1, 0.32]);
            let n_list = resolve(n_list, file.take_usize_list("n_list")?, vec![25, 100]);
            let theta_star = resolve(theta_star, file.take_f64("theta_star")?, 0.0);
            let c = common.merge(&mut file, 100_000)?;
            file.finish()?;
            let report =
                experiments::run_coverage(&alphas, &n_list, theta_star, c.reps, c.seed, c.threads)?;
            Ok((report, c))
        }
        Command::Power {
            common,
            theta0,
            alpha,
            n,
            sigma2,
            theta1_grid,
        } => {
            let mut file = load_file(&common)?;
            let theta0 = resolve(theta0, file.take_f64("theta0")?, 0.0);
            let alpha = resolve(alpha, file.take_f64("alpha")?, 0.05);
            let n = resolve(n, file.take_usize("n")?, 100);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let grid = resolve_with(theta1_grid, file.take_f64_list("theta1_grid")?, || {
                (1..=10).map(|i| theta0 + 0.05 * i as f64).collect()
            });
            let c = common.merge(&mut file, 100_000)?;
            file.finish()?;
            let spec = TestSpec::new(theta0, alpha, n, sigma2)?;
            let report = experiments::run_power_curve(&spec, &grid, c.reps, c.seed, c.threads)?;
            Ok((report, c))
        }
        Command::Quantifier {
            common,
            estimator,
            model,
            m,
            theta_star,
            n,
            sigma2,
            theta_grid,
            constant,
        } => {
            let mut file = load_file(&common)?;
            let estimator_name = resolve(
                estimator,
                file.take_string("estimator")?,
                "crystal-ball".to_string(),
            );
            let model_name = resolve(model, file.take_string("model")?, "normal".to_string());
            let m = resolve(m, file.take_usize("m")?, 5);
            let theta_star = resolve(theta_star, file.take_f64("theta_star")?, 0.0);
            let n = resolve(n, file.take_usize("n")?, 100);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let constant = resolve(constant, file.take_f64("constant")?, CRYSTAL_BALL_DEFAULT);
            let grid = resolve_with(theta_grid, file.take_f64_list("theta_grid")?, || {
                if estimator_name == "crystal-ball" {
                    // Span from the true value out past the constant.
                    vec![
                        theta_star - 1.0,
                        theta_star,
                        theta_star + 1.0,
                        constant - 1.0,
                        constant,
                        constant + 1.0,
                    ]
                } else if model_name == "multinormal" {
                    vec![0.0, 1.0, 2.0, 4.0, 8.0]
                } else {
                    (-4..=4).map(|i| theta_star + i as f64 * 0.5).collect()
                }
            });
            let c = common.merge(&mut file, 100_000)?;
            file.finish()?;
            let spec = estimator_from_name(&estimator_name, sigma2, constant, None)?;
            let model = model_from_name(&model_name, m, n, sigma2, theta_star)?;
            let report = experiments::run_quantifier_contrast(
                &spec, &model, &grid, c.reps, c.seed, c.threads,
            )?;
            Ok((report, c))
        }
        Command::RiskCurve {
            common,
            model,
            m,
            n,
            sigma2,
            estimator,
            loss,
            p,
            eps,
            theta_grid,
            constant,
        } => {
            let mut file = load_file(&common)?;
            let model_name = resolve(model, file.take_string("model")?, "normal".to_string());
            let m = resolve(m, file.take_usize("m")?, 5);
            let n = resolve(n, file.take_usize("n")?, 25);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let estimator_name = resolve(
                estimator,
                file.take_string("estimator")?,
                "ls-mean".to_string(),
            );
            let loss_name = resolve(loss, file.take_string("loss")?, "square".to_string());
            let p = resolve(p.map(Some), file.take_f64("p")?.map(Some), None);
            let eps = resolve(eps.map(Some), file.take_f64("eps")?.map(Some), None);
            let constant = resolve(constant, file.take_f64("constant")?, CRYSTAL_BALL_DEFAULT);
            let grid_axis = resolve(
                theta_grid,
                file.take_f64_list("theta_grid")?,
                vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            );
            let c = common.merge(&mut file, 10_000)?;
            file.finish()?;

            let model = model_from_name(&model_name, m, n, sigma2, grid_axis[0].max(0.5))?;
            let spec = estimator_from_name(&estimator_name, sigma2, constant, None)?;
            let loss = loss_from_name(&loss_name, p, eps, n, sigma2)?;
            let grid = grid_for_model(&model, &grid_axis);
            let plan = SeedPlan::with_seed(c.seed);
            let mc = risk_curves(&model, &grid, &[spec], &loss, c.reps, &plan, c.threads)?;
            let curve = &mc.curves[0];

            let mut table = Table::new("curve", &["theta", "risk", "stderr"]);
            for i in 0..curve.len() {
                table.push_row(vec![
                    Cell::Num(curve.axis[i]),
                    Cell::Num(curve.risk[i]),
                    Cell::Num(curve.stderr[i]),
                ]);
            }
            let mut cfg = Config::new();
            cfg.insert("model".into(), ParamValue::Str(model_name));
            cfg.insert("m".into(), ParamValue::UInt(model.param_dim() as u64));
            cfg.insert("n".into(), ParamValue::UInt(n as u64));
            cfg.insert("sigma2".into(), ParamValue::Real(sigma2));
            cfg.insert("estimator".into(), ParamValue::Str(estimator_name));
            cfg.insert("loss".into(), ParamValue::Str(loss_name));
            cfg.insert("theta_grid".into(), ParamValue::RealList(grid_axis));
            cfg.insert("reps".into(), ParamValue::UInt(c.reps));
            cfg.insert("master_seed".into(), ParamValue::UInt(c.seed));
            let report = ExperimentReport {
                name: "risk-curve".into(),
                config: cfg,
                tables: vec![table],
                verdicts: vec![],
            };
            Ok((report, c))
        }
        Command::Dominance {
            common,
            model,
            m,
            n,
            sigma2,
            estimator_a,
            estimator_b,
            loss,
            p,
            eps,
            theta_grid,
            constant,
        } => {
            let mut file = load_file(&common)?;
            let model_name = resolve(model, file.take_string("model")?, "multinormal".to_string());
            let m = resolve(m, file.take_usize("m")?, 5);
            let n = resolve(n, file.take_usize("n")?, 1);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let name_a = resolve(estimator_a, file.take_string("estimator_a")?, "js".to_string());
            let name_b = resolve(
                estimator_b,
                file.take_string("estimator_b")?,
                "ls-mean".to_string(),
            );
            let loss_name = resolve(loss, file.take_string("loss")?, "stein-sum".to_string());
            let p = resolve(p.map(Some), file.take_f64("p")?.map(Some), None);
            let eps = resolve(eps.map(Some), file.take_f64("eps")?.map(Some), None);
            let constant = resolve(constant, file.take_f64("constant")?, CRYSTAL_BALL_DEFAULT);
            let grid_axis = resolve(
                theta_grid,
                file.take_f64_list("theta_grid")?,
                vec![0.0, 1.0, 2.0, 4.0, 8.0],
            );
            let c = common.merge(&mut file, 100_000)?;
            file.finish()?;

            let model = model_from_name(&model_name, m, n, sigma2, grid_axis[0].max(0.5))?;
            let spec_a = estimator_from_name(&name_a, sigma2, constant, None)?;
            let spec_b = estimator_from_name(&name_b, sigma2, constant, None)?;
            let loss = loss_from_name(&loss_name, p, eps, n, sigma2)?;
            let grid = grid_for_model(&model, &grid_axis);
            let plan = SeedPlan::with_seed(c.seed);
            let mc = risk_curves(
                &model,
                &grid,
                &[spec_a, spec_b],
                &loss,
                c.reps,
                &plan,
                c.threads,
            )?;
            let dom = dominance_on_grid(&mc.curves[0], &mc.curves[1])?;

            // Leading columns follow the curve serialization (theta, risk,
            // stderr, diff, significant); estimator B's curve trails.
            let mut table = Table::new(
                "comparison",
                &[
                    "theta",
                    "risk",
                    "stderr",
                    "diff",
                    "significant",
                    "risk_b",
                    "stderr_b",
                ],
            );
            for (i, point) in dom.per_point.iter().enumerate() {
                table.push_row(vec![
                    Cell::Num(point.theta),
                    Cell::Num(mc.curves[0].risk[i]),
                    Cell::Num(mc.curves[0].stderr[i]),
                    Cell::Num(point.diff),
                    Cell::Bool(point.significant),
                    Cell::Num(mc.curves[1].risk[i]),
                    Cell::Num(mc.curves[1].stderr[i]),
                ]);
            }
            let mut summary = Table::new("summary", &["verdict", "tolerance_rule"]);
            summary.push_row(vec![
                Cell::Str(format!("{:?}", dom.verdict)),
                Cell::Str(dom.tolerance_rule.clone()),
            ]);
            let mut cfg = Config::new();
            cfg.insert("model".into(), ParamValue::Str(model_name));
            cfg.insert("m".into(), ParamValue::UInt(model.param_dim() as u64));
            cfg.insert("n".into(), ParamValue::UInt(n as u64));
            cfg.insert("sigma2".into(), ParamValue::Real(sigma2));
            cfg.insert("estimator_a".into(), ParamValue::Str(name_a));
            cfg.insert("estimator_b".into(), ParamValue::Str(name_b));
            cfg.insert("loss".into(), ParamValue::Str(loss_name));
            cfg.insert("theta_grid".into(), ParamValue::RealList(grid_axis));
            cfg.insert("reps".into(), ParamValue::UInt(c.reps));
            cfg.insert("master_seed".into(), ParamValue::UInt(c.seed));
            let report = ExperimentReport {
                name: "dominance".into(),
                config: cfg,
                tables: vec![table, summary],
                verdicts: vec![],
            };
            Ok((report, c))
        }
        Command::BayesAction {
            common,
            mu0,
            tau2,
            xbar,
            n,
            sigma2,
            loss,
            eps,
        } => {
            let mut file = load_file(&common)?;
            let mu0 = resolve(mu0, file.take_f64("mu0")?, 0.0);
            let tau2 = resolve(tau2, file.take_f64("tau2")?, 1.0);
            let xbar = resolve(xbar, file.take_f64("xbar")?, 2.0);
            let n = resolve(n, file.take_usize("n")?, 1);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let loss_name = resolve(loss, file.take_string("loss")?, "square".to_string());
            let eps = resolve(eps.map(Some), file.take_f64("eps")?.map(Some), None);
            let c = common.merge(&mut file, 0)?;
            file.finish()?;

            let loss = match loss_name.as_str() {
                "square" => LossFunction::Square,
                "absolute" => LossFunction::Absolute,
                "zero-one" => LossFunction::ZeroOneEps { eps },
                other => {
                    return Err(Error::config(format!(
                        "bayes-action supports square|absolute|zero-one, got {other}"
                    )))
                }
            };
            let posterior = posterior_normal_normal(mu0, tau2, n, xbar, sigma2)?;
            let action = bayes_action(&posterior, &loss)?;

            let mut table = Table::new(
                "action",
                &[
                    "loss",
                    "action",
                    "closed_form",
                    "gap",
                    "grid_step",
                    "posterior_mean",
                    "posterior_variance",
                ],
            );
            table.push_row(vec![
                Cell::Str(loss_name.clone()),
                Cell::Num(action.action),
                Cell::Num(action.closed_form),
                Cell::Num((action.action - action.closed_form).abs()),
                Cell::Num(action.grid_step),
                Cell::Num(posterior.mean()),
                Cell::Num(posterior.variance()),
            ]);
            let mut cfg = Config::new();
            cfg.insert("mu0".into(), ParamValue::Real(mu0));
            cfg.insert("tau2".into(), ParamValue::Real(tau2));
            cfg.insert("xbar".into(), ParamValue::Real(xbar));
            cfg.insert("n".into(), ParamValue::UInt(n as u64));
            cfg.insert("sigma2".into(), ParamValue::Real(sigma2));
            cfg.insert("loss".into(), ParamValue::Str(loss_name));
            cfg.insert("master_seed".into(), ParamValue::UInt(c.seed));
            let verdict = Verdict::new(
                "numeric-minimizer-matches-closed-form-action",
                "the posterior-risk minimizer is the posterior mean / median / window-mode under square / absolute / zero-one loss",
                action.matches_closed_form,
                format!(
                    "action {} vs closed form {} (one grid step = {})",
                    action.action, action.closed_form, action.grid_step
                ),
            );
            let report = ExperimentReport {
                name: "bayes-action".into(),
                config: cfg,
                tables: vec![table],
                verdicts: vec![verdict],
            };
            Ok((report, c))
        }
        Command::Test {
            common,
            xbar,
            theta0,
            alpha,
            n,
            sigma2,
        } => {
            let mut file = load_file(&common)?;
            let xbar = resolve(xbar, file.take_f64("xbar")?, 0.0);
            let theta0 = resolve(theta0, file.take_f64("theta0")?, 0.0);
            let alpha = resolve(alpha, file.take_f64("alpha")?, 0.05);
            let n = resolve(n, file.take_usize("n")?, 100);
            let sigma2 = resolve(sigma2, file.take_f64("sigma2")?, 1.0);
            let c = common.merge(&mut file, 0)?;
            file.finish()?;

            let spec = TestSpec::new(theta0, alpha, n, sigma2)?;
            let result = np_test(xbar, &spec)?;
            let mut table = Table::new("result", &["d_obs", "c_alpha", "reject", "p_value"]);
            table.push_row(vec![
                Cell::Num(result.d_obs),
                Cell::Num(result.c_alpha),
                Cell::Bool(result.reject),
                Cell::Num(result.p_value),
            ]);
            let mut cfg = Config::new();
            cfg.insert("xbar".into(), ParamValue::Real(xbar));
            cfg.insert("theta0".into(), ParamValue::Real(theta0));
            cfg.insert("alpha".into(), ParamValue::Real(alpha));
            cfg.insert("n".into(), ParamValue::UInt(n as u64));
            cfg.insert("sigma2".into(), ParamValue::Real(sigma2));
            cfg.insert("master_seed".into(), ParamValue::UInt(c.seed));
            let report = ExperimentReport {
                name: "test".into(),
                config: cfg,
                tables: vec![table],
                verdicts: vec![],
            };
            Ok((report, c))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, common)) => {
            let write_csv = matches!(common.format, Format::Csv | Format::Both);
            let write_json = matches!(common.format, Format::Json | Format::Both);
            if let Err(e) = write_report(&report, &common.out, write_csv, write_json) {
                return fail(&e);
            }
            for v in &report.verdicts {
                println!(
                    "verdict {}: {} - {}",
                    v.claim,
                    if v.pass { "PASS" } else { "FAIL" },
                    v.detail
                );
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let (kind, code) = match e {
        Error::Config(_) => ("config", 2),
        Error::Data(_) => ("data", 3),
        Error::Numerical(_) => ("numerical", 3),
    };
    eprintln!("error kind={kind} msg={:?}", e.to_string());
    ExitCode::from(code)
}
