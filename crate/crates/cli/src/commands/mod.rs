//! Subcommands and the shared assembly of core objects from a config.

use std::sync::Arc;

use morphogrow::dynamics::{GrowthLaw, GrowthSystem};
use morphogrow::energy::EnergyModel;
use morphogrow::fields::{two_segment_grid, uniform_grid, GrowthField, MaterialGrid};
use morphogrow::nutrients::NutrientParams;
use morphogrow::oracle::TwoSegmentConfig;
use thiserror::Error;

use crate::config::{ConfigError, Layout, RunConfig};

pub mod figures;
pub mod oracle;
pub mod probe;
pub mod simulate;

/// Failure of a subcommand, classified by exit code.
#[derive(Debug, Error)]
pub enum CmdError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("violation: {0}")]
    Violation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Solver(_) | CmdError::Io(_) => 3,
            CmdError::Violation(_) => 4,
        }
    }

    /// Manifest status word.
    pub fn status(&self) -> &'static str {
        match self {
            CmdError::Config(_) => "config_error",
            CmdError::Solver(_) | CmdError::Io(_) => "solver_error",
            CmdError::Violation(_) => "violation",
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e.to_string())
    }
}

/// Errors while assembling the problem are input errors.
pub(crate) fn setup<T>(r: morphogrow::Result<T>) -> Result<T, CmdError> {
    r.map_err(|e| CmdError::Config(e.to_string()))
}

pub(crate) fn grid(cfg: &RunConfig) -> Result<Arc<MaterialGrid>, CmdError> {
    let g = match cfg.layout {
        Layout::TwoSegment {
            interface,
            cells_per_segment,
        } => two_segment_grid(cfg.length, interface, cells_per_segment),
        Layout::Uniform { cells } => uniform_grid(cfg.length, cells),
    };
    setup(g).map(Arc::new)
}

pub(crate) fn segment_field(
    grid: &Arc<MaterialGrid>,
    per_segment: &[f64],
) -> Result<GrowthField, CmdError> {
    setup(
        grid.expand_segments(per_segment)
            .and_then(|v| GrowthField::new(grid.clone(), v)),
    )
}

pub(crate) fn system(cfg: &RunConfig, grid: &Arc<MaterialGrid>) -> Result<GrowthSystem, CmdError> {
    let model = setup(
        grid.expand_segments(&cfg.kappa)
            .and_then(|k| EnergyModel::new(cfg.base, grid.clone(), k)),
    )?;
    let nutrients = match &cfg.nutrients {
        Some(n) => Some(setup(NutrientParams::from_segments(
            grid, &n.d0, &n.beta0, n.n_left, n.n_right,
        ))?),
        None => None,
    };
    let law = setup(grid.expand_segments(&cfg.law.gamma).and_then(|gamma| {
        GrowthLaw::new(
            cfg.law.kind,
            gamma,
            cfg.law.mu,
            cfg.law.eta,
            cfg.law.sampling,
        )
    }))?;
    let mut sys = setup(GrowthSystem::new(model, cfg.ell0, nutrients, law))?
        .with_stress_tol(cfg.tolerances.stress * cfg.ell0);
    if let Some(n) = &cfg.nutrients {
        sys = sys.with_refine(n.refine);
    }
    Ok(sys)
}

/// Closed-form problem for the two-segment commands.
pub(crate) fn two_segment(cfg: &RunConfig) -> Result<TwoSegmentConfig, CmdError> {
    let Layout::TwoSegment { interface, .. } = cfg.layout else {
        return Err(CmdError::Config(
            "geometry.XI: this command needs a two-segment body".into(),
        ));
    };
    let nutrients = cfg
        .nutrients
        .as_ref()
        .ok_or_else(|| CmdError::Config("nutrients.D0: this command needs nutrient data".into()))?;
    let growth = cfg.oracle.growth.as_ref().ok_or_else(|| {
        CmdError::Config("oracle.growth: this command needs a two-value growth field".into())
    })?;
    let pair = |v: &[f64]| [v[0], v[1]];
    let config = TwoSegmentConfig {
        length: cfg.length,
        interface,
        ell0: cfg.ell0,
        base: cfg.base,
        kappa: pair(&cfg.kappa),
        growth: pair(growth),
        d0: pair(&nutrients.d0),
        beta0: pair(&nutrients.beta0),
        n_left: nutrients.n_left,
        n_right: nutrients.n_right,
    };
    setup(config.validate())?;
    Ok(config)
}
