//! Elastic equilibrium between two plates for a given growth field.
//!
//! The minimiser of the stored energy on the natural configuration is
//! characterised by its Euler-Lagrange equation: the stress `S` is
//! spatially constant and the elastic stretch in every cell is
//! `pi0(X, S)`. The plate condition `y(L0) = ell0` then reduces the
//! problem to the scalar equation
//!
//! ```text
//! Phi(S, G) = sum_cells pi0(X_mid, S) * G * width - ell0 = 0
//! ```
//!
//! which is strictly increasing in `S`.

use serde::Serialize;

use crate::energy::{EnergyModel, StretchBounds};
use crate::error::{Error, Result};
use crate::fields::{GrowthBounds, GrowthField};
use crate::roots::newton_bisect;

/// Relative accuracy of the inner `pi0` solves used while evaluating `Phi`.
const INNER_TOL: f64 = 1e-14;
const MAX_EXPANSIONS: usize = 200;
const MAX_NEWTON: usize = 200;

/// Default absolute tolerance on `Phi`, per unit of `ell0`.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-12;
/// Allowed mismatch `|y(L0) - ell0|`, per unit of `ell0`.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Solved equilibrium for one growth field.
#[derive(Debug, Clone)]
pub struct EquilibriumState {
    growth: GrowthField,
    stress: f64,
    stretch: Vec<f64>,
    g_nodes: Vec<f64>,
    y_nodes: Vec<f64>,
    ell0: f64,
    diagnostics: SolveDiagnostics,
}

/// Iteration counts and final residual of a stress solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub expansions: usize,
    pub newton_iterations: usize,
    pub residual: f64,
}

impl EquilibriumState {
    pub fn growth(&self) -> &GrowthField {
        &self.growth
    }

    pub fn stress(&self) -> f64 {
        self.stress
    }

    /// Elastic stretch `phi' o g` per cell.
    pub fn stretch(&self) -> &[f64] {
        &self.stretch
    }

    pub fn g_nodes(&self) -> &[f64] {
        &self.g_nodes
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }

    pub fn ell0(&self) -> f64 {
        self.ell0
    }

    pub fn diagnostics(&self) -> SolveDiagnostics {
        self.diagnostics
    }

    /// Current position `y(X)` of a reference point.
    pub fn interface_image(&self, x_ref: f64) -> Result<f64> {
        let grid = self.growth.grid();
        let cell = grid.locate(x_ref)?;
        let x0 = grid.nodes()[cell];
        let slope = self.stretch[cell] * self.growth.values()[cell];
        Ok(self.y_nodes[cell] + slope * (x_ref - x0))
    }

    /// Reference point `y^{-1}(x)` of a current position.
    pub fn inverse_deformation(&self, x: f64) -> Result<f64> {
        let end = *self.y_nodes.last().expect("nodes");
        let top = end.max(self.ell0);
        let slack = BOUNDARY_TOL * self.ell0;
        if !(x >= 0.0 && x <= top + slack) {
            return Err(Error::InvalidArgument(format!(
                "current coordinate {x} outside [0, {}]",
                self.ell0
            )));
        }
        let grid = self.growth.grid();
        if x >= end {
            return Ok(grid.length());
        }
        let cell = (self.y_nodes.partition_point(|&y| y <= x) - 1).min(grid.cell_count() - 1);
        let slope = self.stretch[cell] * self.growth.values()[cell];
        Ok(grid.nodes()[cell] + (x - self.y_nodes[cell]) / slope)
    }

    /// `max_cell |dW/dp(X, stretch) - S|`.
    pub fn stress_deviation(&self, model: &EnergyModel) -> f64 {
        self.stretch
            .iter()
            .enumerate()
            .map(|(c, &p)| (model.wp_cell(c, p) - self.stress).abs())
            .fold(0.0, f64::max)
    }

    /// `|y(L0) - ell0|`.
    pub fn boundary_error(&self) -> f64 {
        (self.y_nodes.last().expect("nodes") - self.ell0).abs()
    }
}

/// Node values of the growth map `g(X) = int_0^X G`.
pub fn growth_map(growth: &GrowthField) -> Vec<f64> {
    let grid = growth.grid();
    let mut nodes = Vec::with_capacity(grid.cell_count() + 1);
    let mut acc = 0.0;
    nodes.push(acc);
    for (w, g) in grid.widths().zip(growth.values()) {
        acc += w * g;
        nodes.push(acc);
    }
    nodes
}

fn check_model(model: &EnergyModel, growth: &GrowthField) -> Result<()> {
    if model.grid().as_ref() != growth.grid().as_ref() {
        return Err(Error::IncompatibleGrids(
            "energy model and growth field live on different grids".into(),
        ));
    }
    Ok(())
}

/// `Phi(S, G)` and `dPhi/dS = sum G * width / W_pp(pi0)`.
fn phi_with_slope(
    model: &EnergyModel,
    growth: &GrowthField,
    stress: f64,
    ell0: f64,
) -> Result<(f64, f64)> {
    let grid = growth.grid();
    let mut value = -ell0;
    let mut slope = 0.0;
    for (cell, (&g, w)) in growth.values().iter().zip(grid.widths()).enumerate() {
        let p = model.inverse_stress_cell(cell, stress, INNER_TOL)?;
        value += p * g * w;
        slope += g * w / model.wpp_cell(cell, p);
    }
    Ok((value, slope))
}

/// Plate mismatch for a trial stress.
pub fn residual_phi(
    model: &EnergyModel,
    growth: &GrowthField,
    stress: f64,
    ell0: f64,
) -> Result<f64> {
    check_model(model, growth)?;
    phi_with_slope(model, growth, stress, ell0).map(|(v, _)| v)
}

/// Solve `Phi(S, G) = 0` and reconstruct the deformation.
pub fn solve_stress(
    model: &EnergyModel,
    growth: &GrowthField,
    ell0: f64,
    tol: f64,
) -> Result<EquilibriumState> {
    check_model(model, growth)?;
    if !(ell0 > 0.0) || !ell0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "current length must be positive, got {ell0}"
        )));
    }
    let phi0 = growth.grown_length() - ell0;
    let mut diagnostics = SolveDiagnostics::default();
    let stress = if phi0 == 0.0 {
        0.0
    } else {
        let (lo, hi, expansions) = bracket_stress(model, growth, ell0, phi0)?;
        diagnostics.expansions = expansions;
        let (_, slope0) = phi_with_slope(model, growth, 0.0, ell0)?;
        let guess = -phi0 / slope0;
        let root = newton_bisect(
            |s| phi_with_slope(model, growth, s, ell0),
            lo,
            hi,
            guess,
            tol,
            MAX_NEWTON,
        )?;
        diagnostics.newton_iterations = root.iterations;
        root.x
    };
    let state = assemble(model, growth.clone(), stress, ell0, diagnostics)?;
    if state.boundary_error() > BOUNDARY_TOL * ell0 {
        return Err(Error::NoConvergence(format!(
            "plate mismatch {} exceeds {}",
            state.boundary_error(),
            BOUNDARY_TOL * ell0
        )));
    }
    Ok(state)
}

/// Expand from `S = 0` in the direction given by the sign of `Phi(0)`.
fn bracket_stress(
    model: &EnergyModel,
    growth: &GrowthField,
    ell0: f64,
    phi0: f64,
) -> Result<(f64, f64, usize)> {
    let limit = model.stress_lower_limit();
    let mut near = 0.0;
    let mut step = 1.0;
    for k in 1..=MAX_EXPANSIONS {
        if phi0 < 0.0 {
            let trial = step;
            if residual_phi(model, growth, trial, ell0)? >= 0.0 {
                return Ok((near, trial, k));
            }
            near = trial;
        } else {
            let mut trial = -step;
            if trial <= limit {
                // approach the end of the stress range geometrically
                trial = 0.5 * (near + limit);
                if trial <= limit || trial == near {
                    break;
                }
            }
            if residual_phi(model, growth, trial, ell0)? <= 0.0 {
                return Ok((trial, near, k));
            }
            near = trial;
        }
        step *= 2.0;
    }
    Err(Error::NoEquilibrium(format!(
        "no stress bracket within {MAX_EXPANSIONS} expansions (grown length {}, plate distance {ell0})",
        growth.grown_length()
    )))
}

fn assemble(
    model: &EnergyModel,
    growth: GrowthField,
    stress: f64,
    ell0: f64,
    mut diagnostics: SolveDiagnostics,
) -> Result<EquilibriumState> {
    let grid = growth.grid().clone();
    let stretch = (0..grid.cell_count())
        .map(|c| model.inverse_stress_cell(c, stress, INNER_TOL))
        .collect::<Result<Vec<_>>>()?;
    let g_nodes = growth_map(&growth);
    let mut y_nodes = Vec::with_capacity(grid.cell_count() + 1);
    let mut acc = 0.0;
    y_nodes.push(acc);
    for ((w, g), p) in grid.widths().zip(growth.values()).zip(&stretch) {
        acc += w * g * p;
        y_nodes.push(acc);
    }
    diagnostics.residual = acc - ell0;
    Ok(EquilibriumState {
        growth,
        stress,
        stretch,
        g_nodes,
        y_nodes,
        ell0,
        diagnostics,
    })
}

/// Stress interval `[Sigma0, Sigma1]` containing `S(G)` for every `G`
/// admitted by `bounds`: evaluate the stress at the extreme mean stretches
/// `ell0 / (Gamma1 L0)` and `ell0 / (Gamma0 L0)`.
pub fn stress_bounds(model: &EnergyModel, bounds: &GrowthBounds, ell0: f64) -> Result<(f64, f64)> {
    let length = model.grid().length();
    let compressed = ell0 / (bounds.gamma1() * length);
    let stretched = ell0 / (bounds.gamma0() * length);
    let cells = 0..model.grid().cell_count();
    let sigma0 = cells
        .clone()
        .map(|c| model.wp_cell(c, compressed))
        .fold(0.0, f64::min);
    let sigma1 = cells
        .map(|c| model.wp_cell(c, stretched))
        .fold(0.0, f64::max);
    Ok((sigma0, sigma1))
}

/// Stress and stretch bounds together.
pub fn equilibrium_bounds(
    model: &EnergyModel,
    bounds: &GrowthBounds,
    ell0: f64,
) -> Result<((f64, f64), StretchBounds)> {
    let (s0, s1) = stress_bounds(model, bounds, ell0)?;
    Ok(((s0, s1), model.stretch_bounds(s0, s1)?))
}
