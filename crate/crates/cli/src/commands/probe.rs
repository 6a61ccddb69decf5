use morphogrow::fields::GrowthBounds;
use morphogrow::probe::lipschitz_probe;

use super::{grid, segment_field, setup, system, CmdError};
use crate::config::RunConfig;
use crate::output::RunDir;

/// Writes `probe.json`. Assumption violations are reported in the file
/// and logged; only solver failures make the command fail.
pub fn run(cfg: &RunConfig, seed: u64, out: &mut RunDir) -> Result<(), CmdError> {
    let grid = grid(cfg)?;
    let system = system(cfg, &grid)?;
    let center =
        cfg.probe.center.as_ref().ok_or_else(|| {
            CmdError::Config("probe.center: required by the probe command".into())
        })?;
    let center = segment_field(&grid, center)?;
    let ball = setup(GrowthBounds::new(center, cfg.probe.radius))?;
    let report = lipschitz_probe(&system, &ball, cfg.probe.pairs, seed, cfg.probe.samples)
        .map_err(|e| CmdError::Solver(e.to_string()))?;

    if report.assumptions.comparison_holds == Some(false) {
        log::warn!(
            "comparison assumption fails at {} lattice points",
            report.assumptions.comparison_violations
        );
    }
    if !report.assumptions.bounded {
        log::warn!("growth law is not bounded on the sampled box");
    }
    for (name, s) in [
        ("stress", &report.stress_summary),
        ("nutrient", &report.nutrient_summary),
    ] {
        if s.stable == Some(false) {
            log::warn!("{name} ratios spread beyond ten times the median");
        }
    }
    let text =
        serde_json::to_string_pretty(&report).map_err(|e| CmdError::Solver(e.to_string()))?;
    out.write("probe.json", &(text + "\n"))?;
    Ok(())
}
