//! Steady reaction-diffusion on the deformed body and its pull-back.
//!
//! On the current configuration `[0, ell0]` the nutrient concentration
//! solves `-(D_G n')' + beta_G n = 0` with Dirichlet data `n_L`, `n_R`.
//! The coefficients are the reference fields transported by the elastic
//! stretch: `D_G = stretch * D0` and `beta_G = beta0 / stretch` on the
//! image of every cell.
//!
//! The discretisation is a vertex-centred finite-volume scheme on the
//! image grid, refined uniformly inside every image cell. Coefficient
//! jumps therefore sit on grid nodes and the face diffusivity (harmonic
//! mean of `D_G` over the segment between two nodes) is single-valued.

use log::warn;

use crate::elastostatics::EquilibriumState;
use crate::error::{Error, Result};
use crate::fields::MaterialGrid;
use crate::tridiag;

/// Default number of subcells per image cell.
pub const DEFAULT_REFINE: usize = 8;

/// Reference diffusivity, absorption and boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct NutrientParams {
    d0: Vec<f64>,
    beta0: Vec<f64>,
    n_left: f64,
    n_right: f64,
}

impl NutrientParams {
    /// Cellwise `d0` and `beta0` with Dirichlet values.
    ///
    /// `beta0 = 0` is accepted as a degenerate diagnostic case.
    pub fn new(d0: Vec<f64>, beta0: Vec<f64>, n_left: f64, n_right: f64) -> Result<Self> {
        if d0.len() != beta0.len() {
            return Err(Error::InvalidArgument(
                "diffusivity and absorption need one value per cell".into(),
            ));
        }
        if let Some(d) = d0.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "diffusivity must be positive, got {d}"
            )));
        }
        if let Some(b) = beta0.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "absorption must be nonnegative, got {b}"
            )));
        }
        if beta0.contains(&0.0) {
            warn!("zero absorption rate: degenerate diagnostic configuration");
        }
        for (name, v) in [("n_L", n_left), ("n_R", n_right)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "boundary value {name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(Self {
            d0,
            beta0,
            n_left,
            n_right,
        })
    }

    /// Spread per-segment values over the cells of `grid`.
    pub fn from_segments(
        grid: &MaterialGrid,
        d0: &[f64],
        beta0: &[f64],
        n_left: f64,
        n_right: f64,
    ) -> Result<Self> {
        Self::new(
            grid.expand_segments(d0)?,
            grid.expand_segments(beta0)?,
            n_left,
            n_right,
        )
    }

    pub fn d0(&self) -> &[f64] {
        &self.d0
    }

    pub fn beta0(&self) -> &[f64] {
        &self.beta0
    }

    pub fn n_left(&self) -> f64 {
        self.n_left
    }

    pub fn n_right(&self) -> f64 {
        self.n_right
    }

    /// Upper bound for the concentration (maximum principle).
    pub fn n_max(&self) -> f64 {
        self.n_left.max(self.n_right)
    }

    fn bounds(values: &[f64]) -> (f64, f64) {
        values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn d0_range(&self) -> (f64, f64) {
        Self::bounds(&self.d0)
    }

    pub fn beta0_range(&self) -> (f64, f64) {
        Self::bounds(&self.beta0)
    }
}

/// Coefficients of the nutrient equation on each image cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedCoefficients {
    pub diffusivity: Vec<f64>,
    pub absorption: Vec<f64>,
}

pub fn transformed_coefficients(
    params: &NutrientParams,
    state: &EquilibriumState,
) -> Result<TransformedCoefficients> {
    let stretch = state.stretch();
    if stretch.len() != params.d0.len() {
        return Err(Error::IncompatibleState(format!(
            "nutrient data for {} cells, state has {}",
            params.d0.len(),
            stretch.len()
        )));
    }
    Ok(TransformedCoefficients {
        diffusivity: stretch.iter().zip(&params.d0).map(|(p, d)| p * d).collect(),
        absorption: stretch
            .iter()
            .zip(&params.beta0)
            .map(|(p, b)| b / p)
            .collect(),
    })
}

/// Nodal solution of the nutrient problem on a one-dimensional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NutrientProfile {
    pub x: Vec<f64>,
    pub n: Vec<f64>,
    /// `-D n'` on every segment between consecutive nodes.
    pub flux: Vec<f64>,
}

impl NutrientProfile {
    /// Piecewise-linear evaluation; `x` is clamped to the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.x.len() - 1;
        if x <= self.x[0] {
            return self.n[0];
        }
        if x >= self.x[last] {
            return self.n[last];
        }
        let i = self.x.partition_point(|&v| v <= x) - 1;
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.n[i] + t * (self.n[i + 1] - self.n[i])
    }

    /// Trapezoidal mean over the nodes `first..=last`.
    pub fn mean_between(&self, first: usize, last: usize) -> f64 {
        let width = self.x[last] - self.x[first];
        let integral: f64 = (first..last)
            .map(|i| 0.5 * (self.n[i] + self.n[i + 1]) * (self.x[i + 1] - self.x[i]))
            .sum();
        integral / width
    }
}

/// Solve `-(D n')' + beta n = 0` with piecewise-constant coefficients given
/// on the cells between `cell_nodes`, each cell split into `refine` equal
/// subcells.
pub fn solve_on_cells(
    cell_nodes: &[f64],
    diffusivity: &[f64],
    absorption: &[f64],
    n_left: f64,
    n_right: f64,
    refine: usize,
) -> Result<NutrientProfile> {
    if refine == 0 {
        return Err(Error::InvalidArgument("refine must be at least 1".into()));
    }
    let cells = cell_nodes.len().saturating_sub(1);
    if cells == 0 || diffusivity.len() != cells || absorption.len() != cells {
        return Err(Error::InvalidArgument(
            "need one diffusivity and absorption value per cell".into(),
        ));
    }
    let segments = cells * refine;
    let mut x = Vec::with_capacity(segments + 1);
    let mut seg_d = Vec::with_capacity(segments);
    let mut seg_b = Vec::with_capacity(segments);
    for c in 0..cells {
        let (a, b) = (cell_nodes[c], cell_nodes[c + 1]);
        if !(b > a) {
            return Err(Error::InvalidArgument(
                "image grid must be strictly increasing".into(),
            ));
        }
        for k in 0..refine {
            x.push(a + (b - a) * k as f64 / refine as f64);
            seg_d.push(diffusivity[c]);
            seg_b.push(absorption[c]);
        }
    }
    x.push(cell_nodes[cells]);
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();

    // unknowns are the interior nodes 1..segments
    let m = segments - 1;
    let mut n = vec![0.0; segments + 1];
    n[0] = n_left;
    n[segments] = n_right;
    if m > 0 {
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for r in 0..m {
            let i = r + 1;
            let west = seg_d[i - 1] / h[i - 1];
            let east = seg_d[i] / h[i];
            let reaction = 0.5 * (seg_b[i - 1] * h[i - 1] + seg_b[i] * h[i]);
            diag[r] = west + east + reaction;
            if r > 0 {
                lower[r] = -west;
            } else {
                rhs[r] += west * n_left;
            }
            if r + 1 < m {
                upper[r] = -east;
            } else {
                rhs[r] += east * n_right;
            }
        }
        let interior = tridiag::solve(&lower, &diag, &upper, &rhs)?;
        n[1..segments].copy_from_slice(&interior);
    }
    let flux = (0..segments)
        .map(|j| -seg_d[j] * (n[j + 1] - n[j]) / h[j])
        .collect();
    Ok(NutrientProfile { x, n, flux })
}

/// Nutrient field on the current configuration together with its
/// referential description.
#[derive(Debug, Clone)]
pub struct NutrientSolution {
    profile: NutrientProfile,
    refine: usize,
    /// `N_k = n(y(X_k))` at the material nodes.
    referential: Vec<f64>,
}

impl NutrientSolution {
    pub fn profile(&self) -> &NutrientProfile {
        &self.profile
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.profile.x
    }

    pub fn n(&self) -> &[f64] {
        &self.profile.n
    }

    pub fn flux(&self) -> &[f64] {
        &self.profile.flux
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    /// Referential values at the material nodes.
    pub fn referential(&self) -> &[f64] {
        &self.referential
    }

    /// Index in the nutrient grid of material node `k`.
    pub fn image_index(&self, k: usize) -> usize {
        k * self.refine
    }
}

/// Full pipeline: transport the coefficients, solve, pull back.
pub fn solve_nutrients(
    params: &NutrientParams,
    state: &EquilibriumState,
    refine: usize,
) -> Result<NutrientSolution> {
    let coeffs = transformed_coefficients(params, state)?;
    let profile = solve_on_cells(
        state.y_nodes(),
        &coeffs.diffusivity,
        &coeffs.absorption,
        params.n_left,
        params.n_right,
        refine,
    )?;
    let referential = (0..state.y_nodes().len())
        .map(|k| profile.n[k * refine])
        .collect();
    Ok(NutrientSolution {
        profile,
        refine,
        referential,
    })
}

fn check_match(solution: &NutrientSolution, state: &EquilibriumState) -> Result<()> {
    let cells = state.stretch().len();
    let expected = cells * solution.refine + 1;
    let aligned = solution.profile.x.len() == expected
        && state
            .y_nodes()
            .iter()
            .enumerate()
            .all(|(k, &y)| solution.profile.x[k * solution.refine] == y);
    if aligned {
        Ok(())
    } else {
        Err(Error::IncompatibleState(
            "nutrient solution was not computed on this equilibrium".into(),
        ))
    }
}

/// `N = n o y` sampled at arbitrary reference points.
pub fn pull_back(
    solution: &NutrientSolution,
    state: &EquilibriumState,
    reference_points: &[f64],
) -> Result<Vec<f64>> {
    check_match(solution, state)?;
    reference_points
        .iter()
        .map(|&xr| Ok(solution.profile.eval(state.interface_image(xr)?)))
        .collect()
}

/// `N` at the material nodes (exact nodal identification).
pub fn pull_back_nodes(solution: &NutrientSolution, state: &EquilibriumState) -> Result<Vec<f64>> {
    check_match(solution, state)?;
    Ok(solution.referential.clone())
}

/// `N` at the cell midpoints of the material grid.
pub fn pull_back_midpoints(
    solution: &NutrientSolution,
    state: &EquilibriumState,
) -> Result<Vec<f64>> {
    let grid = state.growth().grid();
    let mids: Vec<f64> = (0..grid.cell_count()).map(|c| grid.midpoint(c)).collect();
    pull_back(solution, state, &mids)
}

/// Mean of `n` over the image of every material segment.
pub fn segment_averages(solution: &NutrientSolution, state: &EquilibriumState) -> Result<Vec<f64>> {
    check_match(solution, state)?;
    let grid = state.growth().grid();
    Ok(grid
        .segment_node_ranges()
        .into_iter()
        .map(|(a, b)| {
            solution
                .profile
                .mean_between(solution.image_index(a), solution.image_index(b))
        })
        .collect())
}

/// Means of `n` over `[0, x_I]` and `[x_I, ell0]` for a two-segment body.
pub fn local_averages(solution: &NutrientSolution, state: &EquilibriumState) -> Result<(f64, f64)> {
    if state.growth().grid().segment_count() != 2 {
        return Err(Error::InvalidConfiguration(
            "local averages need a two-segment body".into(),
        ));
    }
    let avg = segment_averages(solution, state)?;
    Ok((avg[0], avg[1]))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::elastostatics::solve_stress;
    use crate::energy::{BaseEnergy, EnergyModel};
    use crate::fields::{two_segment_grid, uniform_grid, GrowthField};

    fn identity_state(cells: usize) -> EquilibriumState {
        let grid = Arc::new(uniform_grid(1.0, cells).unwrap());
        let m = EnergyModel::homogeneous(BaseEnergy::Mooney, grid.clone(), 1.0).unwrap();
        let g = GrowthField::constant(grid, 1.0).unwrap();
        solve_stress(&m, &g, 1.0, 1e-12).unwrap()
    }

    fn compressed_state() -> EquilibriumState {
        let grid = Arc::new(uniform_grid(1.0, 2).unwrap());
        let m = EnergyModel::homogeneous(BaseEnergy::Quadratic, grid.clone(), 1.0).unwrap();
        let g = GrowthField::constant(grid, 2.0).unwrap();
        solve_stress(&m, &g, 1.0, 1e-12).unwrap()
    }

    #[test]
    fn identity_elasticity_keeps_coefficients() {
        let st = identity_state(2);
        let p = NutrientParams::new(vec![1.0, 8.0], vec![2.0, 3.0], 1.0, 1.0).unwrap();
        let c = transformed_coefficients(&p, &st).unwrap();
        assert_eq!(c.diffusivity, vec![1.0, 8.0]);
        assert_eq!(c.absorption, vec![2.0, 3.0]);
    }

    #[test]
    fn compression_halves_diffusion() {
        let st = compressed_state();
        let p = NutrientParams::new(vec![1.0; 2], vec![1.0; 2], 1.0, 1.0).unwrap();
        let c = transformed_coefficients(&p, &st).unwrap();
        for (d, b) in c.diffusivity.iter().zip(&c.absorption) {
            assert!((d - 0.5).abs() < 1e-10);
            assert!((b - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn harmonic_without_absorption() {
        let st = identity_state(3);
        let p = NutrientParams::new(vec![1.0; 3], vec![0.0; 3], 1.0, 1.0).unwrap();
        let sol = solve_nutrients(&p, &st, 4).unwrap();
        assert!(sol.n().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn homogeneous_cosh_profile() {
        let st = identity_state(2);
        let p = NutrientParams::new(vec![1.0; 2], vec![1.0; 2], 1.0, 1.0).unwrap();
        let sol = solve_nutrients(&p, &st, 64).unwrap();
        let mid = sol.n()[sol.image_index(1)];
        let exact = 1.0 / 0.5f64.cosh();
        assert!((exact - 0.88681).abs() < 1e-5);
        assert!((mid - exact).abs() < 1e-4);
    }

    #[test]
    fn dirichlet_rows_are_exact() {
        let st = identity_state(2);
        let p = NutrientParams::new(vec![1.0, 3.0], vec![5.0, 1.0], 0.3, 0.7).unwrap();
        let sol = solve_nutrients(&p, &st, 3).unwrap();
        assert_eq!(sol.n()[0], 0.3);
        assert_eq!(*sol.n().last().unwrap(), 0.7);
        assert_eq!(sol.flux().len(), sol.n().len() - 1);
    }

    #[test]
    fn single_subcell_without_interior_nodes() {
        let p = solve_on_cells(&[0.0, 1.0], &[1.0], &[1.0], 0.2, 0.4, 1).unwrap();
        assert_eq!(p.n, vec![0.2, 0.4]);
        assert!((p.flux[0] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn pull_back_identifies_nodes() {
        let st = identity_state(4);
        let p = NutrientParams::new(vec![1.0; 4], vec![2.0; 4], 1.0, 0.5).unwrap();
        let sol = solve_nutrients(&p, &st, 2).unwrap();
        let nodal = pull_back_nodes(&sol, &st).unwrap();
        for (k, v) in nodal.iter().enumerate() {
            assert_eq!(*v, sol.n()[2 * k]);
        }
        let at = pull_back(&sol, &st, &[0.25, 0.125]).unwrap();
        assert_eq!(at[0], sol.n()[2]);
        assert!((at[1] - sol.n()[1]).abs() < 1e-15);
    }

    #[test]
    fn pull_back_of_constant() {
        let st = compressed_state();
        let p = NutrientParams::new(vec![1.0; 2], vec![0.0; 2], 0.6, 0.6).unwrap();
        let sol = solve_nutrients(&p, &st, 4).unwrap();
        let mids = pull_back_midpoints(&sol, &st).unwrap();
        assert!(mids.iter().all(|v| (v - 0.6).abs() < 1e-14));
    }

    #[test]
    fn pull_back_detects_foreign_state() {
        let st = identity_state(2);
        let p = NutrientParams::new(vec![1.0; 2], vec![1.0; 2], 1.0, 1.0).unwrap();
        let sol = solve_nutrients(&p, &st, 4).unwrap();
        // same cell count, different image nodes
        let grid = Arc::new(two_segment_grid(1.0, 0.8, 1).unwrap());
        let m = EnergyModel::new(BaseEnergy::Quadratic, grid.clone(), vec![1.0, 2.0]).unwrap();
        let g = GrowthField::new(grid, vec![0.9, 5.5]).unwrap();
        let other = solve_stress(&m, &g, 1.0, 1e-12).unwrap();
        assert!(matches!(
            pull_back_nodes(&sol, &other),
            Err(Error::IncompatibleState(_))
        ));
        assert!(matches!(
            pull_back_nodes(&sol, &identity_state(3)),
            Err(Error::IncompatibleState(_))
        ));
    }

    #[test]
    fn local_average_examples() {
        let grid = Arc::new(two_segment_grid(1.0, 0.5, 1).unwrap());
        let m = EnergyModel::homogeneous(BaseEnergy::Mooney, grid.clone(), 1.0).unwrap();
        let st = solve_stress(&m, &GrowthField::constant(grid, 1.0).unwrap(), 1.0, 1e-12).unwrap();

        let flat = NutrientParams::new(vec![1.0; 2], vec![0.0; 2], 1.0, 1.0).unwrap();
        let sol = solve_nutrients(&flat, &st, 8).unwrap();
        let (l, r) = local_averages(&sol, &st).unwrap();
        assert!((l - 1.0).abs() < 1e-14 && (r - 1.0).abs() < 1e-14);

        let sym = NutrientParams::new(vec![1.0; 2], vec![1.0; 2], 1.0, 1.0).unwrap();
        let sol = solve_nutrients(&sym, &st, 8).unwrap();
        let (l, r) = local_averages(&sol, &st).unwrap();
        assert!((l - r).abs() < 1e-13);

        let single = identity_state(2);
        let sol = solve_nutrients(&sym, &single, 8).unwrap();
        assert!(matches!(
            local_averages(&sol, &single),
            Err(Error::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn parameter_validation() {
        assert!(NutrientParams::new(vec![0.0], vec![1.0], 1.0, 1.0).is_err());
        assert!(NutrientParams::new(vec![1.0], vec![-1.0], 1.0, 1.0).is_err());
        assert!(NutrientParams::new(vec![1.0], vec![1.0], -1.0, 1.0).is_err());
        assert!(NutrientParams::new(vec![1.0, 1.0], vec![1.0], 1.0, 1.0).is_err());
        assert!(solve_on_cells(&[0.0, 1.0], &[1.0], &[1.0], 1.0, 1.0, 0).is_err());
    }
}
