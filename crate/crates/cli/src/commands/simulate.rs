use morphogrow::dynamics::{integrate_partial, IntegrationOptions, Trajectory};
use morphogrow::fields::GrowthField;
use morphogrow::Error;

use super::{grid, segment_field, system, CmdError};
use crate::config::RunConfig;
use crate::output::{csv, EnvelopeStatus, RunDir};

pub fn run(cfg: &RunConfig, out: &mut RunDir) -> Result<(), CmdError> {
    let grid = grid(cfg)?;
    let system = system(cfg, &grid)?;
    let initial = match &cfg.integration.initial {
        Some(v) => segment_field(&grid, v)?,
        None => {
            GrowthField::constant(grid.clone(), 1.0).map_err(|e| CmdError::Config(e.to_string()))?
        }
    };
    let options = IntegrationOptions {
        method: cfg.integration.method,
        stride: cfg.integration.stride,
        slack: cfg.tolerances.envelope_slack,
        guard_dt: cfg.integration.guard_dt,
        inject_fault_at: cfg.integration.inject_fault_at,
    };
    let (traj, err) = integrate_partial(
        &system,
        &initial,
        cfg.integration.horizon,
        cfg.integration.dt,
        &options,
    );

    {
        let m = out.manifest_mut();
        m.steps = traj.steps.clone();
        m.envelope = traj.envelope.map(|e| EnvelopeStatus {
            c0: e.c0,
            c1: e.c1,
            breached: traj.envelope_breached,
        });
    }
    write_trajectory(&traj, out)?;

    if let Some(e) = err {
        return Err(classify(e));
    }
    let limit = cfg.tolerances.boundary * cfg.ell0;
    if let Some(s) = traj.steps.iter().find(|s| s.max_residual > limit) {
        return Err(CmdError::Solver(format!(
            "boundary residual {:e} at t={} exceeds tolerances.boundary",
            s.max_residual, s.t
        )));
    }
    Ok(())
}

fn classify(e: Error) -> CmdError {
    match e.root() {
        Error::EnvelopeViolation { .. } => CmdError::Violation(e.to_string()),
        // only the step-size guard and horizon checks get here before any work
        Error::InvalidArgument(_) => CmdError::Config(e.to_string()),
        _ => CmdError::Solver(e.to_string()),
    }
}

fn write_trajectory(traj: &Trajectory, out: &mut RunDir) -> Result<(), CmdError> {
    let cells = traj.states.first().map_or(0, |g| g.values().len());
    let names: Vec<String> = (0..cells).map(|c| format!("G{c}")).collect();
    let mut header = vec!["t"];
    header.extend(names.iter().map(String::as_str));
    let rows = traj.times.iter().zip(&traj.states).map(|(&t, g)| {
        let mut row = vec![t];
        row.extend_from_slice(g.values());
        row
    });
    out.write("trajectory.csv", &csv(&header, rows))?;

    let rows = traj
        .times
        .iter()
        .zip(&traj.stresses)
        .map(|(&t, &s)| vec![t, s]);
    out.write("stress.csv", &csv(&["t", "S"], rows))?;

    for (t, snap) in traj.times.iter().zip(&traj.nutrients) {
        let Some(snap) = snap else { continue };
        let rows = snap.x.iter().zip(&snap.n).map(|(&x, &n)| vec![x, n]);
        out.write(&format!("nutrients_t{t:.6}.csv"), &csv(&["x", "n"], rows))?;
        let rows = snap
            .reference_x
            .iter()
            .zip(&snap.referential)
            .map(|(&x, &n)| vec![x, n]);
        out.write(&format!("referential_t{t:.6}.csv"), &csv(&["X", "N"], rows))?;
    }
    Ok(())
}
