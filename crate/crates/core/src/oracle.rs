//! Closed-form solution for a body made of two homogeneous segments.
//!
//! With cellwise-constant data on `[0, X_I]` and `[X_I, L0]` the elastic map
//! is piecewise affine, `phi(z) = A_i + B_i z`, and the nutrient profile is
//! a sum of exponentials on each image segment. Both are computed here
//! without any discretisation and serve as the reference for the general
//! grid-based pipeline.

use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::elastostatics::{solve_stress, DEFAULT_RESIDUAL_TOL};
use crate::energy::{inverse_with_modulus, BaseEnergy, EnergyModel};
use crate::error::{Error, Result};
use crate::fields::{two_segment_grid, GrowthField};
use crate::nutrients::{solve_nutrients, NutrientParams};
use crate::roots::newton_bisect;

/// Geometry, material and nutrient data of a two-segment body.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSegmentConfig {
    pub length: f64,
    pub interface: f64,
    pub ell0: f64,
    pub base: BaseEnergy,
    pub kappa: [f64; 2],
    pub growth: [f64; 2],
    pub d0: [f64; 2],
    pub beta0: [f64; 2],
    pub n_left: f64,
    pub n_right: f64,
}

impl TwoSegmentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("L0", self.length)?;
        positive("ell0", self.ell0)?;
        for i in 0..2 {
            positive("kappa", self.kappa[i])?;
            positive("G", self.growth[i])?;
            positive("D0", self.d0[i])?;
            positive("beta0", self.beta0[i])?;
        }
        if !(self.interface > 0.0 && self.interface < self.length) {
            return Err(Error::InvalidArgument(format!(
                "interface {} must lie strictly inside (0, {})",
                self.interface, self.length
            )));
        }
        if !(self.n_left >= 0.0 && self.n_right >= 0.0) {
            return Err(Error::InvalidArgument(
                "boundary concentrations must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Piecewise-affine elastic map `phi(z) = A_i + B_i z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElasticSolution {
    pub z_i: f64,
    pub g_l: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub stress: f64,
    pub x_i: f64,
}

impl ElasticSolution {
    /// Residuals of the boundary, continuity and stress-balance equations.
    pub fn residuals(&self, config: &TwoSegmentConfig) -> [f64; 4] {
        let w = |p: f64| config.base.w0_p(p);
        [
            self.a[0],
            self.a[1] + self.b[1] * self.g_l - config.ell0,
            self.a[0] + self.b[0] * self.z_i - (self.a[1] + self.b[1] * self.z_i),
            config.kappa[0] * w(self.b[0]) - config.kappa[1] * w(self.b[1]),
        ]
    }

    /// `phi(z)` on the natural configuration `[0, g(L0)]`.
    pub fn phi(&self, z: f64) -> f64 {
        let i = usize::from(z > self.z_i);
        self.a[i] + self.b[i] * z
    }
}

pub fn solve_elastic(config: &TwoSegmentConfig) -> Result<ElasticSolution> {
    config.validate()?;
    let z_i = config.interface * config.growth[0];
    let g_l = z_i + (config.length - config.interface) * config.growth[1];
    let right = g_l - z_i;
    let [k0, k1] = config.kappa;
    let b = match config.base {
        BaseEnergy::Quadratic => {
            // z_I B0 + (gL - zI) B1 = ell0,  k0 B0 - k1 B1 = k0 - k1
            let det = -z_i * k1 - right * k0;
            let b0 = (-config.ell0 * k1 - right * (k0 - k1)) / det;
            let b1 = (z_i * (k0 - k1) - config.ell0 * k0) / det;
            if !(b0 > 0.0 && b1 > 0.0) {
                return Err(Error::NoEquilibrium(format!(
                    "quadratic energy admits no positive stretches (B = {b0}, {b1})"
                )));
            }
            [b0, b1]
        }
        BaseEnergy::Mooney => {
            let tol = 1e-14;
            let stretch = |s: f64| -> Result<(f64, f64)> {
                let b0 = inverse_with_modulus(config.base, k0, s, tol)?;
                let b1 = inverse_with_modulus(config.base, k1, s, tol)?;
                let value = z_i * b0 + right * b1 - config.ell0;
                let slope =
                    z_i / (k0 * config.base.w0_pp(b0)) + right / (k1 * config.base.w0_pp(b1));
                Ok((value, slope))
            };
            // stress scale of the fully homogeneous answer
            let guess = k0.max(k1) * config.base.w0_p(config.ell0 / g_l);
            let mut span = guess.abs().max(1.0);
            let mut tries = 0;
            while stretch(-span)?.0 > 0.0 || stretch(span)?.0 < 0.0 {
                span *= 2.0;
                tries += 1;
                if tries > 200 {
                    return Err(Error::NoEquilibrium("stress bracket not found".into()));
                }
            }
            let root = newton_bisect(stretch, -span, span, guess, 1e-15 * config.ell0, 200)?;
            [
                inverse_with_modulus(config.base, k0, root.x, tol)?,
                inverse_with_modulus(config.base, k1, root.x, tol)?,
            ]
        }
    };
    let a = [0.0, (b[0] - b[1]) * z_i];
    Ok(ElasticSolution {
        z_i,
        g_l,
        a,
        b,
        stress: k0 * config.base.w0_p(b[0]),
        x_i: b[0] * z_i,
    })
}

/// Inputs of the two-segment nutrient problem on the current configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NutrientSegments {
    pub x_i: f64,
    pub ell0: f64,
    pub stretch: [f64; 2],
    pub d0: [f64; 2],
    pub beta0: [f64; 2],
    pub n_left: f64,
    pub n_right: f64,
}

impl NutrientSegments {
    pub fn from_solution(config: &TwoSegmentConfig, elastic: &ElasticSolution) -> Self {
        Self {
            x_i: elastic.x_i,
            ell0: config.ell0,
            stretch: elastic.b,
            d0: config.d0,
            beta0: config.beta0,
            n_left: config.n_left,
            n_right: config.n_right,
        }
    }

    pub fn diffusivity(&self) -> [f64; 2] {
        [self.d0[0] * self.stretch[0], self.d0[1] * self.stretch[1]]
    }

    pub fn absorption(&self) -> [f64; 2] {
        [
            self.beta0[0] / self.stretch[0],
            self.beta0[1] / self.stretch[1],
        ]
    }
}

/// `n(x) = c+ exp(lambda x) + c- exp(-lambda x)` on each image segment.
///
/// Stored in shifted form so that every basis function is bounded by one
/// on its own segment:
/// left `p e^{lambda0 (x - x_I)} + q e^{-lambda0 x}`,
/// right `r e^{lambda1 (x - ell0)} + s e^{-lambda1 (x - x_I)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialProfile {
    pub segments: NutrientSegments,
    pub lambdas: [f64; 2],
    shifted: [f64; 4],
}

impl ExponentialProfile {
    /// Coefficients `(c0+, c0-, c1+, c1-)` in the unshifted representation.
    pub fn coefficients(&self) -> [f64; 4] {
        let [l0, l1] = self.lambdas;
        let NutrientSegments { x_i, ell0, .. } = self.segments;
        let [p, q, r, s] = self.shifted;
        [
            p * (-l0 * x_i).exp(),
            q,
            r * (-l1 * ell0).exp(),
            s * (l1 * x_i).exp(),
        ]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let [l0, l1] = self.lambdas;
        let NutrientSegments { x_i, ell0, .. } = self.segments;
        let [p, q, r, s] = self.shifted;
        if x <= x_i {
            p * (l0 * (x - x_i)).exp() + q * (-l0 * x).exp()
        } else {
            r * (l1 * (x - ell0)).exp() + s * (-l1 * (x - x_i)).exp()
        }
    }

    /// Diffusive flux `D_G n'` evaluated from the left or right segment.
    pub fn flux_at(&self, x: f64, right: bool) -> f64 {
        let [l0, l1] = self.lambdas;
        let d = self.segments.diffusivity();
        let NutrientSegments { x_i, ell0, .. } = self.segments;
        let [p, q, r, s] = self.shifted;
        if right {
            d[1] * l1 * (r * (l1 * (x - ell0)).exp() - s * (-l1 * (x - x_i)).exp())
        } else {
            d[0] * l0 * (p * (l0 * (x - x_i)).exp() - q * (-l0 * x).exp())
        }
    }

    /// Value and flux jumps at `x_I`.
    pub fn interface_jumps(&self) -> (f64, f64) {
        let [l0, l1] = self.lambdas;
        let NutrientSegments { x_i, ell0, .. } = self.segments;
        let [p, q, r, s] = self.shifted;
        let left = p + q * (-l0 * x_i).exp();
        let right = r * (-l1 * (ell0 - x_i)).exp() + s;
        (
            left - right,
            self.flux_at(x_i, false) - self.flux_at(x_i, true),
        )
    }

    /// Residuals of the boundary, continuity and flux equations in the
    /// unshifted representation.
    pub fn residuals(&self) -> [f64; 4] {
        let [c0p, c0m, c1p, c1m] = self.coefficients();
        let [l0, l1] = self.lambdas;
        let seg = &self.segments;
        let [d0, d1] = seg.diffusivity();
        let (x, e) = (seg.x_i, seg.ell0);
        [
            c0p + c0m - seg.n_left,
            c1p * (l1 * e).exp() + c1m * (-l1 * e).exp() - seg.n_right,
            c0p * (l0 * x).exp() + c0m * (-l0 * x).exp()
                - (c1p * (l1 * x).exp() + c1m * (-l1 * x).exp()),
            d0 * (l0 * c0p * (l0 * x).exp() - l0 * c0m * (-l0 * x).exp())
                - d1 * (l1 * c1p * (l1 * x).exp() - l1 * c1m * (-l1 * x).exp()),
        ]
    }

    /// Exact means of `n` over `[0, x_I]` and `[x_I, ell0]`.
    pub fn segment_averages(&self) -> (f64, f64) {
        let [l0, l1] = self.lambdas;
        let NutrientSegments { x_i, ell0, .. } = self.segments;
        let [p, q, r, s] = self.shifted;
        let left = -(-l0 * x_i).exp_m1() / l0;
        let right = -(-l1 * (ell0 - x_i)).exp_m1() / l1;
        ((p + q) * left / x_i, (r + s) * right / (ell0 - x_i))
    }
}

/// Solve the four interface/boundary conditions with partial pivoting.
pub fn solve_exponential(segments: NutrientSegments) -> Result<ExponentialProfile> {
    let NutrientSegments { x_i, ell0, .. } = segments;
    if !(x_i > 0.0 && x_i < ell0) {
        return Err(Error::InvalidArgument(format!(
            "interface image {x_i} must lie inside (0, {ell0})"
        )));
    }
    let d = segments.diffusivity();
    let b = segments.absorption();
    if d.iter().chain(&b).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "closed form needs positive diffusivity and absorption".into(),
        ));
    }
    let lambdas = [(b[0] / d[0]).sqrt(), (b[1] / d[1]).sqrt()];
    let [l0, l1] = lambdas;
    let e0 = (-l0 * x_i).exp();
    let e1 = (-l1 * (ell0 - x_i)).exp();
    let m = Matrix4::new(
        e0,
        1.0,
        0.0,
        0.0, //
        0.0,
        0.0,
        1.0,
        e1, //
        1.0,
        e0,
        -e1,
        -1.0, //
        d[0] * l0,
        -d[0] * l0 * e0,
        -d[1] * l1 * e1,
        d[1] * l1,
    );
    let rhs = Vector4::new(segments.n_left, segments.n_right, 0.0, 0.0);
    let sol = m.lu().solve(&rhs).ok_or_else(|| {
        Error::SolverFailure("singular interface system for the closed-form nutrients".into())
    })?;
    Ok(ExponentialProfile {
        segments,
        lambdas,
        shifted: [sol[0], sol[1], sol[2], sol[3]],
    })
}

pub fn solve_nutrients_closed_form(
    config: &TwoSegmentConfig,
    elastic: &ElasticSolution,
) -> Result<ExponentialProfile> {
    solve_exponential(NutrientSegments::from_solution(config, elastic))
}

/// Means of the closed-form profile over both image segments.
pub fn segment_averages(profile: &ExponentialProfile) -> (f64, f64) {
    profile.segment_averages()
}

/// Determinant of the scaled interface matrix in factored form,
/// `A = D1 lambda1 / (D0 lambda0)`.
pub fn interface_determinant(x_i: f64, ell0: f64, lambdas: [f64; 2], flux_ratio: f64) -> f64 {
    let [l0, l1] = lambdas;
    let a = flux_ratio;
    (-ell0 * l1 - x_i * (l0 + l1)).exp()
        * ((1.0 + a) * ((2.0 * x_i * l0 + 2.0 * ell0 * l1).exp() - (2.0 * x_i * l1).exp())
            + (a - 1.0) * ((2.0 * x_i * (l0 + l1)).exp() - (2.0 * ell0 * l1).exp()))
}

/// One refinement level of [`oracle_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub refine: usize,
    pub stress_error: f64,
    pub nutrient_error: f64,
}

/// Error table of the general pipeline against the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub rows: Vec<OracleRow>,
    /// Observed order between consecutive rows.
    pub orders: Vec<f64>,
}

/// Run the grid-based pipeline on the two-cell grid at each refinement
/// and measure its distance to the closed form.
pub fn oracle_compare(config: &TwoSegmentConfig, refines: &[usize]) -> Result<OracleComparison> {
    config.validate()?;
    let elastic = solve_elastic(config)?;
    let exact = solve_nutrients_closed_form(config, &elastic)?;

    let grid = Arc::new(two_segment_grid(config.length, config.interface, 1)?);
    let model = EnergyModel::new(config.base, grid.clone(), config.kappa.to_vec())?;
    let growth = GrowthField::new(grid.clone(), config.growth.to_vec())?;
    let state = solve_stress(
        &model,
        &growth,
        config.ell0,
        DEFAULT_RESIDUAL_TOL * config.ell0,
    )?;
    let params = NutrientParams::new(
        config.d0.to_vec(),
        config.beta0.to_vec(),
        config.n_left,
        config.n_right,
    )?;
    let stress_error = (state.stress() - elastic.stress).abs();

    let mut rows = Vec::with_capacity(refines.len());
    for &refine in refines {
        let sol = solve_nutrients(&params, &state, refine)?;
        let nutrient_error = sol
            .x_nodes()
            .iter()
            .zip(sol.n())
            .map(|(&x, &n)| (n - exact.eval(x)).abs())
            .fold(0.0, f64::max);
        rows.push(OracleRow {
            refine,
            stress_error,
            nutrient_error,
        });
    }
    let orders = rows
        .windows(2)
        .map(|w| {
            (w[0].nutrient_error / w[1].nutrient_error).ln()
                / (w[1].refine as f64 / w[0].refine as f64).ln()
        })
        .collect();
    Ok(OracleComparison { rows, orders })
}
