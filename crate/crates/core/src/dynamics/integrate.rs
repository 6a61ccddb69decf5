use serde::Serialize;

use super::envelope::{Envelope, EnvelopeCheck};
use super::law::{GrowthLaw, NutrientSampling};
use crate::elastostatics::{solve_stress, EquilibriumState, DEFAULT_RESIDUAL_TOL};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::fields::GrowthField;
use crate::nutrients::{
    pull_back_midpoints, pull_back_nodes, segment_averages, solve_nutrients, NutrientParams,
    NutrientSolution, DEFAULT_REFINE,
};

/// Everything needed to evaluate the growth rate of a field.
#[derive(Debug, Clone)]
pub struct GrowthSystem {
    pub model: EnergyModel,
    pub ell0: f64,
    pub nutrients: Option<NutrientParams>,
    pub refine: usize,
    pub law: GrowthLaw,
    pub stress_tol: f64,
}

/// One evaluation of the right-hand side.
#[derive(Debug, Clone)]
pub struct RateEvaluation {
    pub increment: Vec<f64>,
    pub equilibrium: Option<EquilibriumState>,
    /// Nutrient level fed to `eta` in every cell.
    pub drive: Option<Vec<f64>>,
}

/// Nutrient field at an output instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NutrientSnapshot {
    pub x: Vec<f64>,
    pub n: Vec<f64>,
    /// Material nodes and `N = n o y` there.
    pub reference_x: Vec<f64>,
    pub referential: Vec<f64>,
}

impl GrowthSystem {
    pub fn new(
        model: EnergyModel,
        ell0: f64,
        nutrients: Option<NutrientParams>,
        law: GrowthLaw,
    ) -> Result<Self> {
        let cells = model.grid().cell_count();
        if law.gamma.len() != cells {
            return Err(Error::IncompatibleGrids(format!(
                "{} growth rates for {cells} cells",
                law.gamma.len()
            )));
        }
        if let Some(p) = &nutrients {
            if p.d0().len() != cells {
                return Err(Error::IncompatibleGrids(format!(
                    "nutrient data for {} cells, grid has {cells}",
                    p.d0().len()
                )));
            }
        } else if law.uses_nutrients() {
            return Err(Error::InvalidConfiguration(
                "nutrient-coupled law without nutrient parameters".into(),
            ));
        }
        if !(ell0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "plate distance must be positive, got {ell0}"
            )));
        }
        Ok(Self {
            model,
            ell0,
            nutrients,
            refine: DEFAULT_REFINE,
            law,
            stress_tol: DEFAULT_RESIDUAL_TOL * ell0,
        })
    }

    pub fn with_refine(mut self, refine: usize) -> Self {
        self.refine = refine;
        self
    }

    pub fn with_stress_tol(mut self, tol: f64) -> Self {
        self.stress_tol = tol;
        self
    }

    /// Upper bound for nutrient levels (maximum principle).
    pub fn n_max(&self) -> f64 {
        self.nutrients.as_ref().map_or(1.0, NutrientParams::n_max)
    }

    pub fn envelope(&self) -> Option<Envelope> {
        Envelope::for_law(&self.law, self.n_max())
    }

    pub fn equilibrium(&self, g: &GrowthField) -> Result<EquilibriumState> {
        solve_stress(&self.model, g, self.ell0, self.stress_tol)
    }

    pub fn nutrients(&self, state: &EquilibriumState) -> Result<Option<NutrientSolution>> {
        self.nutrients
            .as_ref()
            .map(|p| solve_nutrients(p, state, self.refine))
            .transpose()
    }

    fn drive(&self, sol: &NutrientSolution, state: &EquilibriumState) -> Result<Vec<f64>> {
        match self.law.sampling {
            NutrientSampling::Midpoint => pull_back_midpoints(sol, state),
            NutrientSampling::Segment => {
                let avg = segment_averages(sol, state)?;
                let grid = state.growth().grid();
                Ok((0..grid.cell_count())
                    .map(|c| avg[grid.segment_of(c)])
                    .collect())
            }
        }
    }

    /// `G_hat(G)`: solves equilibrium (and nutrients) only when the law
    /// needs them.
    pub fn rhs(&self, g: &GrowthField) -> Result<RateEvaluation> {
        let (equilibrium, drive) = if self.law.uses_stress() {
            let state = self.equilibrium(g)?;
            let drive = if self.law.uses_nutrients() {
                let sol = self.nutrients(&state)?.expect("checked in constructor");
                Some(self.drive(&sol, &state)?)
            } else {
                None
            };
            (Some(state), drive)
        } else {
            (None, None)
        };
        let stress = equilibrium.as_ref().map_or(0.0, EquilibriumState::stress);
        let increment = g
            .values()
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                let n = drive.as_ref().map_or(1.0, |d| d[c]);
                self.law.rate(c, v, stress, n)
            })
            .collect();
        Ok(RateEvaluation {
            increment,
            equilibrium,
            drive,
        })
    }

    /// Stress and nutrient fields at an output instant.
    pub fn snapshot(
        &self,
        g: &GrowthField,
    ) -> Result<(EquilibriumState, Option<NutrientSnapshot>)> {
        let state = self.equilibrium(g)?;
        let snap = match self.nutrients(&state)? {
            Some(sol) if self.law.uses_nutrients() => Some(NutrientSnapshot {
                x: sol.x_nodes().to_vec(),
                n: sol.n().to_vec(),
                reference_x: g.grid().nodes().to_vec(),
                referential: pull_back_nodes(&sol, &state)?,
            }),
            _ => None,
        };
        Ok((state, snap))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Euler,
}

/// Knobs of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationOptions {
    pub method: Method,
    /// Record every `stride` steps (the final time is always recorded).
    pub stride: usize,
    /// Absolute envelope slack; `None` uses `1e-8 exp(c1 t)`.
    pub slack: Option<f64>,
    /// Refuse `dt > 0.5 / |c1|`.
    pub guard_dt: bool,
    /// Corrupt cell 0 after the first step ending at or beyond this time.
    pub inject_fault_at: Option<f64>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            stride: 1,
            slack: None,
            guard_dt: true,
            inject_fault_at: None,
        }
    }
}

/// Per-step solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub t: f64,
    pub newton_iterations: usize,
    pub max_residual: f64,
}

/// Recorded solution path.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GrowthField>,
    /// Stress at each recorded instant.
    pub stresses: Vec<f64>,
    pub nutrients: Vec<Option<NutrientSnapshot>>,
    pub steps: Vec<StepDiagnostics>,
    pub envelope: Option<Envelope>,
    pub envelope_breached: bool,
}

impl Trajectory {
    pub fn last_state(&self) -> Option<&GrowthField> {
        self.states.last()
    }
}

fn axpy(base: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    base.iter().zip(k).map(|(b, k)| b + h * k).collect()
}

fn stage_field(template: &GrowthField, values: Vec<f64>, t: f64) -> Result<GrowthField> {
    if let Some((cell, &value)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::PositivityLoss { t, cell, value });
    }
    GrowthField::new(template.grid().clone(), values)
}

struct StageStats {
    iterations: usize,
    residual: f64,
}

impl StageStats {
    fn absorb(&mut self, eval: &RateEvaluation) {
        if let Some(st) = &eval.equilibrium {
            let d = st.diagnostics();
            self.iterations = self.iterations.max(d.newton_iterations);
            self.residual = self.residual.max(d.residual.abs());
        }
    }
}

fn step(
    system: &GrowthSystem,
    g: &GrowthField,
    t: f64,
    h: f64,
    method: Method,
    stats: &mut StageStats,
) -> Result<Vec<f64>> {
    let y = g.values();
    let eval = |field: &GrowthField, stats: &mut StageStats| -> Result<Vec<f64>> {
        let r = system.rhs(field).map_err(|e| e.at_time(t))?;
        stats.absorb(&r);
        Ok(r.increment)
    };
    match method {
        Method::Euler => {
            let k1 = eval(g, stats)?;
            Ok(axpy(y, h, &k1))
        }
        Method::Rk4 => {
            let k1 = eval(g, stats)?;
            let g2 = stage_field(g, axpy(y, 0.5 * h, &k1), t + 0.5 * h)?;
            let k2 = eval(&g2, stats)?;
            let g3 = stage_field(g, axpy(y, 0.5 * h, &k2), t + 0.5 * h)?;
            let k3 = eval(&g3, stats)?;
            let g4 = stage_field(g, axpy(y, h, &k3), t + h)?;
            let k4 = eval(&g4, stats)?;
            Ok(y.iter()
                .enumerate()
                .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        }
    }
}

fn record(system: &GrowthSystem, traj: &mut Trajectory, t: f64, g: &GrowthField) -> Result<()> {
    let (stress, snap) = match system.snapshot(g) {
        Ok((state, snap)) => (state.stress(), snap),
        // the stress is only reported for laws that ignore it
        Err(_) if !system.law.uses_stress() => (f64::NAN, None),
        Err(e) => return Err(e.at_time(t)),
    };
    traj.times.push(t);
    traj.states.push(g.clone());
    traj.stresses.push(stress);
    traj.nutrients.push(snap);
    Ok(())
}

/// Fixed-step integration on `[0, horizon]`; returns the path recorded so
/// far together with the error that stopped it, if any.
pub fn integrate_partial(
    system: &GrowthSystem,
    initial: &GrowthField,
    horizon: f64,
    dt: f64,
    options: &IntegrationOptions,
) -> (Trajectory, Option<Error>) {
    let mut traj = Trajectory {
        envelope: system.envelope(),
        ..Trajectory::default()
    };
    if !(horizon > 0.0) || !(dt > 0.0) || dt > horizon || !horizon.is_finite() {
        return (
            traj,
            Some(Error::InvalidArgument(format!(
                "need 0 < dt <= T, got dt={dt}, T={horizon}"
            ))),
        );
    }
    if options.stride == 0 {
        return (
            traj,
            Some(Error::InvalidArgument(
                "output stride must be at least 1".into(),
            )),
        );
    }
    if options.guard_dt {
        if let Some(env) = traj.envelope {
            let bound = 0.5 / env.c1.abs();
            if dt > bound {
                return (
                    traj,
                    Some(Error::InvalidArgument(format!(
                        "dt={dt} exceeds the step bound 0.5/|c1| = {bound}"
                    ))),
                );
            }
        }
    }
    if let Err(e) = record(system, &mut traj, 0.0, initial) {
        return (traj, Some(e));
    }

    let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let start = initial.values().to_vec();
    let mut g = initial.clone();
    let mut faulted = false;
    for k in 0..steps {
        let t = k as f64 * dt;
        let t_next = if k + 1 == steps {
            horizon
        } else {
            (k + 1) as f64 * dt
        };
        let h = t_next - t;
        let mut stats = StageStats {
            iterations: 0,
            residual: 0.0,
        };
        let next = step(system, &g, t, h, options.method, &mut stats)
            .and_then(|v| stage_field(&g, v, t_next));
        let mut next = match next {
            Ok(n) => n,
            Err(e) => return (traj, Some(e)),
        };
        traj.steps.push(StepDiagnostics {
            t: t_next,
            newton_iterations: stats.iterations,
            max_residual: stats.residual,
        });

        if let (Some(at), false, Some(env)) = (options.inject_fault_at, faulted, traj.envelope) {
            if t_next >= at {
                let mut values = next.values().to_vec();
                values[0] = start[0] * env.upper(t_next) + 1.0;
                next = GrowthField::new(next.grid().clone(), values).expect("positive");
                faulted = true;
            }
        }
        if let Some(env) = traj.envelope {
            if let EnvelopeCheck::Fail {
                cell,
                value,
                lower,
                upper,
            } = env.check(&next, &start, t_next, options.slack)
            {
                traj.envelope_breached = true;
                traj.times.push(t_next);
                traj.stresses.push(f64::NAN);
                traj.nutrients.push(None);
                traj.states.push(next);
                return (
                    traj,
                    Some(Error::EnvelopeViolation {
                        t: t_next,
                        cell,
                        value,
                        lower,
                        upper,
                    }),
                );
            }
        }
        g = next;
        if (k + 1) % options.stride == 0 || k + 1 == steps {
            if let Err(e) = record(system, &mut traj, t_next, &g) {
                return (traj, Some(e));
            }
        }
    }
    (traj, None)
}

/// Fixed-step integration on `[0, horizon]`.
pub fn integrate(
    system: &GrowthSystem,
    initial: &GrowthField,
    horizon: f64,
    dt: f64,
    options: &IntegrationOptions,
) -> Result<Trajectory> {
    match integrate_partial(system, initial, horizon, dt, options) {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}
