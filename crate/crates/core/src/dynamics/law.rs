use serde::Serialize;

use crate::error::{Error, Result};

/// Which couplings enter the growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    /// `gamma G`
    Pure,
    /// `gamma mu(S) G`
    Stress,
    /// `gamma mu(S) eta(N) G`
    Full,
}

/// Stress response `mu(S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StressResponse {
    /// `a atan(S - b) + c`; `b` is the homeostatic stress.
    Arctan { a: f64, b: f64, c: f64 },
    /// `S^2`. Unbounded; only useful to see the assumption checker flag it.
    Square,
}

impl StressResponse {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            StressResponse::Arctan { a, b, c } => a * (s - b).atan() + c,
            StressResponse::Square => s * s,
        }
    }

    /// Closed range `[inf mu, sup mu]`, or `None` when unbounded.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            StressResponse::Arctan { a, c, .. } => {
                let half = a * std::f64::consts::FRAC_PI_2;
                Some((c - half, c + half))
            }
            StressResponse::Square => None,
        }
    }
}

/// Nutrient response `eta(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NutrientResponse {
    Identity,
    /// `max(N - critical, 0) + floor`: no growth drive below the critical
    /// level (necrotic core when `floor = 0`).
    Clamp {
        critical: f64,
        floor: f64,
    },
    /// `floor + (ceiling - floor) * min(N / saturation, 1)`.
    Saturating {
        saturation: f64,
        floor: f64,
        ceiling: f64,
    },
}

impl NutrientResponse {
    pub fn eval(&self, n: f64) -> f64 {
        match *self {
            NutrientResponse::Identity => n,
            NutrientResponse::Clamp { critical, floor } => (n - critical).max(0.0) + floor,
            NutrientResponse::Saturating {
                saturation,
                floor,
                ceiling,
            } => floor + (ceiling - floor) * (n / saturation).clamp(0.0, 1.0),
        }
    }

    /// Range of `eta` on `[0, n_max]`; every variant is nondecreasing.
    pub fn bounds(&self, n_max: f64) -> (f64, f64) {
        (self.eval(0.0), self.eval(n_max))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            NutrientResponse::Identity => Ok(()),
            NutrientResponse::Clamp { critical, floor } => {
                if critical >= 0.0 && floor >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(
                        "clamp response needs critical >= 0 and floor >= 0".into(),
                    ))
                }
            }
            NutrientResponse::Saturating {
                saturation,
                floor,
                ceiling,
            } => {
                if saturation > 0.0 && floor >= 0.0 && ceiling >= floor {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(
                        "saturating response needs saturation > 0 and 0 <= floor <= ceiling".into(),
                    ))
                }
            }
        }
    }
}

/// Where the nutrient level driving each cell is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NutrientSampling {
    /// `N` at the cell midpoint.
    Midpoint,
    /// Mean of `n` over the image of the cell's material segment.
    Segment,
}

/// Growth law `G_dot = gamma(X) mu(S) eta(N) G` with couplings switched
/// on by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthLaw {
    pub kind: LawKind,
    /// One rate per cell.
    pub gamma: Vec<f64>,
    pub mu: StressResponse,
    pub eta: NutrientResponse,
    pub sampling: NutrientSampling,
}

impl GrowthLaw {
    pub fn pure(gamma: Vec<f64>) -> Result<Self> {
        Self::new(
            LawKind::Pure,
            gamma,
            StressResponse::Arctan {
                a: 0.0,
                b: 0.0,
                c: 1.0,
            },
            NutrientResponse::Identity,
            NutrientSampling::Midpoint,
        )
    }

    pub fn new(
        kind: LawKind,
        gamma: Vec<f64>,
        mu: StressResponse,
        eta: NutrientResponse,
        sampling: NutrientSampling,
    ) -> Result<Self> {
        if gamma.is_empty() || gamma.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidArgument(
                "growth rates gamma must be positive".into(),
            ));
        }
        if let StressResponse::Arctan { a, b, c } = mu {
            if !(a >= 0.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
                return Err(Error::InvalidArgument(
                    "stress response needs a >= 0 and finite b, c".into(),
                ));
            }
        }
        eta.validate()?;
        Ok(Self {
            kind,
            gamma,
            mu,
            eta,
            sampling,
        })
    }

    pub fn uses_stress(&self) -> bool {
        self.kind != LawKind::Pure
    }

    pub fn uses_nutrients(&self) -> bool {
        self.kind == LawKind::Full
    }

    fn mu_factor(&self, s: f64) -> f64 {
        if self.uses_stress() {
            self.mu.eval(s)
        } else {
            1.0
        }
    }

    fn eta_factor(&self, n: f64) -> f64 {
        if self.uses_nutrients() {
            self.eta.eval(n)
        } else {
            1.0
        }
    }

    /// Local rate `gamma mu(S) eta(N) G` for a given rate constant.
    pub fn local_rate(&self, gamma: f64, g: f64, s: f64, n: f64) -> f64 {
        gamma * self.mu_factor(s) * self.eta_factor(n) * g
    }

    /// Rate in one cell.
    pub fn rate(&self, cell: usize, g: f64, s: f64, n: f64) -> f64 {
        self.local_rate(self.gamma[cell], g, s, n)
    }

    pub fn gamma_range(&self) -> (f64, f64) {
        self.gamma
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
                (lo.min(g), hi.max(g))
            })
    }

    /// Bounds of the `mu` factor actually used (1 when stress is off).
    pub fn mu_range(&self) -> Option<(f64, f64)> {
        if self.uses_stress() {
            self.mu.bounds()
        } else {
            Some((1.0, 1.0))
        }
    }

    /// Bounds of the `eta` factor on `[0, n_max]` (1 when nutrients are off).
    pub fn eta_range(&self, n_max: f64) -> (f64, f64) {
        if self.uses_nutrients() {
            self.eta.bounds(n_max)
        } else {
            (1.0, 1.0)
        }
    }

    /// Extremes of `gamma mu eta` over the declared factor ranges. The
    /// product is multilinear, so they are attained at corners.
    pub fn factor_extremes(&self, n_max: f64) -> Option<(f64, f64)> {
        let (g0, g1) = self.gamma_range();
        let (m0, m1) = self.mu_range()?;
        let (e0, e1) = self.eta_range(n_max);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for g in [g0, g1] {
            for m in [m0, m1] {
                for e in [e0, e1] {
                    let v = g * m * e;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        Some((lo, hi))
    }
}
