//! Stored energy densities `W(X, p) = kappa(X) * W0(p)`, their derivatives
//! and the inverse constitutive map `pi0(X, S) = (dW/dp)^{-1}(S)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::MaterialGrid;
use crate::roots::newton_bisect;

/// Default relative tolerance for [`EnergyModel::inverse_stress`].
pub const DEFAULT_INVERSE_TOL: f64 = 1e-12;

const MAX_NEWTON: usize = 100;
const MAX_BRACKET_DOUBLINGS: usize = 200;

/// Base energy shape `W0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseEnergy {
    /// `W0(p) = (p - 1)^2 / 2`. A local model: finite energy as `p -> 0`,
    /// and the stress range is bounded below by `-kappa`.
    Quadratic,
    /// `W0(p) = (p - 1/p)^2`. Blows up as `p -> 0` and grows
    /// superlinearly as `p -> infinity`.
    Mooney,
}

impl BaseEnergy {
    pub fn w0(self, p: f64) -> f64 {
        match self {
            BaseEnergy::Quadratic => 0.5 * (p - 1.0).powi(2),
            BaseEnergy::Mooney => (p - 1.0 / p).powi(2),
        }
    }

    pub fn w0_p(self, p: f64) -> f64 {
        match self {
            BaseEnergy::Quadratic => p - 1.0,
            BaseEnergy::Mooney => 2.0 * (p - p.powi(-3)),
        }
    }

    pub fn w0_pp(self, p: f64) -> f64 {
        match self {
            BaseEnergy::Quadratic => 1.0,
            BaseEnergy::Mooney => 2.0 + 6.0 * p.powi(-4),
        }
    }

    /// Whether the energy is coercive on all of `(0, inf)` so that every
    /// stress has a stretch.
    pub fn is_global(self) -> bool {
        matches!(self, BaseEnergy::Mooney)
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseEnergy::Quadratic => "quadratic",
            BaseEnergy::Mooney => "mooney",
        }
    }
}

/// Stretch interval `[p0, p1]` containing `pi0(X, S)` for a range of
/// stresses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StretchBounds {
    pub p0: f64,
    pub p1: f64,
}

impl StretchBounds {
    pub fn contains(&self, p: f64, rel_tol: f64) -> bool {
        p >= self.p0 * (1.0 - rel_tol) && p <= self.p1 * (1.0 + rel_tol)
    }
}

/// Heterogeneous hyperelastic material on a [`MaterialGrid`].
#[derive(Debug, Clone)]
pub struct EnergyModel {
    base: BaseEnergy,
    grid: Arc<MaterialGrid>,
    kappa: Vec<f64>,
}

fn check_stretch(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStretch(p))
    }
}

impl EnergyModel {
    pub fn new(base: BaseEnergy, grid: Arc<MaterialGrid>, kappa: Vec<f64>) -> Result<Self> {
        if kappa.len() != grid.cell_count() {
            return Err(Error::IncompatibleGrids(format!(
                "{} moduli for {} cells",
                kappa.len(),
                grid.cell_count()
            )));
        }
        if let Some(k) = kappa.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "moduli must be positive, got {k}"
            )));
        }
        Ok(Self { base, grid, kappa })
    }

    pub fn homogeneous(base: BaseEnergy, grid: Arc<MaterialGrid>, kappa: f64) -> Result<Self> {
        let n = grid.cell_count();
        Self::new(base, grid, vec![kappa; n])
    }

    pub fn base(&self) -> BaseEnergy {
        self.base
    }

    pub fn grid(&self) -> &Arc<MaterialGrid> {
        &self.grid
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    fn kappa_at(&self, x: f64) -> Result<f64> {
        Ok(self.kappa[self.grid.locate(x)?])
    }

    pub fn eval_w(&self, x: f64, p: f64) -> Result<f64> {
        check_stretch(p)?;
        Ok(self.kappa_at(x)? * self.base.w0(p))
    }

    pub fn eval_wp(&self, x: f64, p: f64) -> Result<f64> {
        check_stretch(p)?;
        Ok(self.kappa_at(x)? * self.base.w0_p(p))
    }

    pub fn eval_wpp(&self, x: f64, p: f64) -> Result<f64> {
        check_stretch(p)?;
        Ok(self.kappa_at(x)? * self.base.w0_pp(p))
    }

    /// Stress `dW/dp` in a given cell.
    pub fn wp_cell(&self, cell: usize, p: f64) -> f64 {
        self.kappa[cell] * self.base.w0_p(p)
    }

    pub fn wpp_cell(&self, cell: usize, p: f64) -> f64 {
        self.kappa[cell] * self.base.w0_pp(p)
    }

    /// Infimum of admissible stresses; `-inf` for globally coercive energies.
    pub fn stress_lower_limit(&self) -> f64 {
        match self.base {
            BaseEnergy::Quadratic => -self.kappa.iter().copied().fold(f64::INFINITY, f64::min),
            BaseEnergy::Mooney => f64::NEG_INFINITY,
        }
    }

    pub fn inverse_stress(&self, x: f64, stress: f64, tol: f64) -> Result<f64> {
        let cell = self.grid.locate(x)?;
        self.inverse_stress_cell(cell, stress, tol)
    }

    /// `pi0` in one cell: the stretch whose stress equals `stress`.
    pub fn inverse_stress_cell(&self, cell: usize, stress: f64, tol: f64) -> Result<f64> {
        inverse_with_modulus(self.base, self.kappa[cell], stress, tol)
    }

    /// Stretch interval covering `pi0(X, S)` for all `X` and all
    /// `S in [sigma0, sigma1]`, by monotonicity of `pi0` in `S`.
    pub fn stretch_bounds(&self, sigma0: f64, sigma1: f64) -> Result<StretchBounds> {
        if !(sigma0 <= sigma1) {
            return Err(Error::InvalidArgument(format!(
                "stress interval [{sigma0}, {sigma1}] is empty"
            )));
        }
        let low = sigma0.min(0.0);
        let high = sigma1.max(0.0);
        let mut moduli = self.kappa.clone();
        moduli.sort_by(f64::total_cmp);
        moduli.dedup();
        let mut p0 = f64::INFINITY;
        let mut p1 = f64::NEG_INFINITY;
        for &k in &moduli {
            // a quadratic cell cannot carry stress at or below -kappa; the
            // stretch there is only bounded by zero
            let lower = if self.base == BaseEnergy::Quadratic && low <= -k {
                0.0
            } else {
                inverse_with_modulus(self.base, k, low, DEFAULT_INVERSE_TOL)?
            };
            p0 = p0.min(lower);
            p1 = p1.max(inverse_with_modulus(
                self.base,
                k,
                high,
                DEFAULT_INVERSE_TOL,
            )?);
        }
        Ok(StretchBounds { p0, p1 })
    }
}

/// Solve `kappa * W0'(p) = stress` for `p > 0`.
pub fn inverse_with_modulus(base: BaseEnergy, kappa: f64, stress: f64, tol: f64) -> Result<f64> {
    if !stress.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "stress {stress} is not finite"
        )));
    }
    if stress == 0.0 {
        return Ok(1.0);
    }
    match base {
        BaseEnergy::Quadratic => {
            if stress <= -kappa {
                return Err(Error::StressOutOfModelRange {
                    stress,
                    limit: -kappa,
                });
            }
            Ok(stress / kappa + 1.0)
        }
        BaseEnergy::Mooney => {
            let f = |p: f64| kappa * base.w0_p(p) - stress;
            let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
            let mut doublings = 0;
            if stress > 0.0 {
                while f(hi) < 0.0 {
                    lo = hi;
                    hi *= 2.0;
                    doublings += 1;
                    if doublings > MAX_BRACKET_DOUBLINGS {
                        return Err(Error::NoConvergence(format!(
                            "no stretch bracket for stress {stress}"
                        )));
                    }
                }
            } else {
                while f(lo) > 0.0 {
                    hi = lo;
                    lo *= 0.5;
                    doublings += 1;
                    if doublings > MAX_BRACKET_DOUBLINGS {
                        return Err(Error::NoConvergence(format!(
                            "no stretch bracket for stress {stress}"
                        )));
                    }
                }
            }
            if f(lo) == 0.0 {
                return Ok(lo);
            }
            if f(hi) == 0.0 {
                return Ok(hi);
            }
            let abs_tol = tol * (1.0 + stress.abs());
            let root = newton_bisect(
                |p| Ok((f(p), kappa * base.w0_pp(p))),
                lo,
                hi,
                0.5 * (lo + hi),
                abs_tol,
                MAX_NEWTON,
            )?;
            Ok(root.x)
        }
    }
}
