//! Named, seeded, end-to-end demonstrations.
//!
//! Each experiment draws everything it needs from an explicit configuration,
//! emits tables of raw numbers, and derives its verdicts from those tables
//! alone, so a consumer can recompute every pass flag from the serialized
//! report. Identical configurations produce byte-identical reports.

mod consistency;
mod crystal;
mod coverage;
mod power;
mod quantifier;
mod stein;
mod units;

pub use consistency::run_consistency;
pub use coverage::run_coverage;
pub use crystal::{run_crystal_ball, run_crystal_ball_with_constant};
pub use power::run_power_curve;
pub use quantifier::run_quantifier_contrast;
pub use stein::run_stein;
pub use units::run_units_sensitivity;

use crate::report::{ExperimentReport, Verdict};
use crate::{Error, Result};

/// Recomputes an experiment's verdicts from its config and tables, for any
/// experiment this crate produces. Used to check that no report carries a
/// verdict its own tables cannot justify.
pub fn recompute_verdicts(report: &ExperimentReport) -> Result<Vec<Verdict>> {
    match report.name.as_str() {
        "stein" => stein::verdicts(&report.config, &report.tables),
        "crystal-ball" => crystal::verdicts(&report.config, &report.tables),
        "consistency" => consistency::verdicts(&report.config, &report.tables),
        "units" => units::verdicts(&report.config, &report.tables),
        "coverage" => coverage::verdicts(&report.config, &report.tables),
        "power" => power::verdicts(&report.config, &report.tables),
        "quantifier" => quantifier::verdicts(&report.config, &report.tables),
        other => Err(Error::data(format!("unknown experiment name {other}"))),
    }
}
