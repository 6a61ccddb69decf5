use serde::Serialize;

use super::law::GrowthLaw;
use crate::fields::GrowthField;

/// Exponential sub- and supersolutions `G0 exp(c0 t) < G < G0 exp(c1 t)`
/// built from the comparison laws `(min - 1) G` and `(max + 1) G`, where
/// `min`/`max` bound `gamma mu eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub c0: f64,
    pub c1: f64,
}

/// Result of checking one state against the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EnvelopeCheck {
    Pass,
    Fail {
        cell: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        matches!(self, EnvelopeCheck::Pass)
    }
}

impl Envelope {
    /// Envelope for `law` with nutrient levels in `[0, n_max]`; `None` when
    /// the stress response is unbounded.
    pub fn for_law(law: &GrowthLaw, n_max: f64) -> Option<Self> {
        let (lo, hi) = law.factor_extremes(n_max)?;
        Some(Self {
            c0: lo - 1.0,
            c1: hi + 1.0,
        })
    }

    pub fn lower(&self, t: f64) -> f64 {
        (self.c0 * t).exp()
    }

    pub fn upper(&self, t: f64) -> f64 {
        (self.c1 * t).exp()
    }

    /// Default slack `1e-8 exp(c1 t)`.
    pub fn default_slack(&self, t: f64) -> f64 {
        1e-8 * self.upper(t)
    }

    /// Check `G` at time `t` against the envelope started from `initial`.
    pub fn check(
        &self,
        g: &GrowthField,
        initial: &[f64],
        t: f64,
        slack: Option<f64>,
    ) -> EnvelopeCheck {
        let slack = slack.unwrap_or_else(|| self.default_slack(t));
        let (lo, hi) = (self.lower(t), self.upper(t));
        for (cell, (&v, &g0)) in g.values().iter().zip(initial).enumerate() {
            let lower = g0 * lo - slack;
            let upper = g0 * hi + slack;
            if !(v > lower && v < upper) {
                return EnvelopeCheck::Fail {
                    cell,
                    value: v,
                    lower,
                    upper,
                };
            }
        }
        EnvelopeCheck::Pass
    }
}

/// Standalone check with `G(0) = 1`.
pub fn envelope_check(
    g: &GrowthField,
    env: &Envelope,
    t: f64,
    slack: Option<f64>,
) -> EnvelopeCheck {
    let ones = vec![1.0; g.values().len()];
    env.check(g, &ones, t, slack)
}
