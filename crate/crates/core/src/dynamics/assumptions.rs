use serde::Serialize;

use super::envelope::Envelope;
use super::law::GrowthLaw;
use crate::error::{Error, Result};

/// Sampling box `[G0, G1] x [S0, S1] x [N0, N1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBox {
    pub growth: (f64, f64),
    pub stress: (f64, f64),
    pub nutrient: (f64, f64),
}

impl SampleBox {
    fn validate(&self) -> Result<()> {
        let ok = self.growth.0 > 0.0
            && self.growth.0 <= self.growth.1
            && self.stress.0 <= self.stress.1
            && self.nutrient.0 >= 0.0
            && self.nutrient.0 <= self.nutrient.1
            && [self.growth, self.stress, self.nutrient]
                .iter()
                .all(|(a, b)| a.is_finite() && b.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "ill-ordered sampling box {self:?}"
            )))
        }
    }
}

/// Empirical evidence for boundedness, Lipschitz continuity and the strict
/// comparison bounds of a growth law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub samples_per_axis: usize,
    /// `max |rate|` over the lattice.
    pub max_abs_rate: f64,
    /// Largest difference quotient along the G, S and N axes.
    pub lipschitz: [f64; 3],
    /// Whether the law declares bounded couplings.
    pub bounded: bool,
    pub envelope: Option<Envelope>,
    /// `Some(true)` when the comparison bounds hold strictly at every
    /// lattice point; `None` when no envelope exists.
    pub comparison_holds: Option<bool>,
    pub comparison_violations: usize,
}

fn lattice(range: (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Sample the law on a regular lattice over `sample_box` for every distinct
/// rate constant; `n_max` sets the nutrient range used for the envelope.
pub fn check_assumptions(
    law: &GrowthLaw,
    sample_box: &SampleBox,
    samples: usize,
    n_max: f64,
) -> Result<AssumptionReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "need at least two samples per axis".into(),
        ));
    }
    sample_box.validate()?;
    let gs = lattice(sample_box.growth, samples);
    let ss = lattice(sample_box.stress, samples);
    let ns = lattice(sample_box.nutrient, samples);
    let envelope = Envelope::for_law(law, n_max);

    let mut gammas = law.gamma.clone();
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();

    let mut max_abs: f64 = 0.0;
    let mut lip = [0.0_f64; 3];
    let mut violations = 0;
    let quotient = |a: f64, b: f64, h: f64| if h > 0.0 { (a - b).abs() / h } else { 0.0 };
    for &gamma in &gammas {
        let rate = |i: usize, j: usize, k: usize| law.local_rate(gamma, gs[i], ss[j], ns[k]);
        for i in 0..samples {
            for j in 0..samples {
                for k in 0..samples {
                    let v = rate(i, j, k);
                    max_abs = max_abs.max(v.abs());
                    if i > 0 {
                        lip[0] = lip[0].max(quotient(v, rate(i - 1, j, k), gs[i] - gs[i - 1]));
                    }
                    if j > 0 {
                        lip[1] = lip[1].max(quotient(v, rate(i, j - 1, k), ss[j] - ss[j - 1]));
                    }
                    if k > 0 {
                        lip[2] = lip[2].max(quotient(v, rate(i, j, k - 1), ns[k] - ns[k - 1]));
                    }
                    if let Some(env) = envelope {
                        let g = gs[i];
                        if !(env.c0 * g < v && v < env.c1 * g) {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(AssumptionReport {
        samples_per_axis: samples,
        max_abs_rate: max_abs,
        lipschitz: lip,
        bounded: envelope.is_some(),
        envelope,
        comparison_holds: envelope.map(|_| violations == 0),
        comparison_violations: violations,
    })
}
