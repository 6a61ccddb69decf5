//! Empirical Lipschitz ratios of the stress and nutrient maps over a ball
//! of growth fields, plus the a-priori bound checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{check_assumptions, AssumptionReport, GrowthSystem, SampleBox};
use crate::elastostatics::equilibrium_bounds;
use crate::error::Result;
use crate::fields::{sup_distance, GrowthBounds, GrowthField};
use crate::nutrients::{pull_back, transformed_coefficients};

/// Summary of a set of ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSummary {
    pub count: usize,
    pub max: Option<f64>,
    pub median: Option<f64>,
    pub all_finite: bool,
    /// `max <= 10 * median`.
    pub stable: Option<bool>,
}

impl RatioSummary {
    pub fn of(ratios: &[f64]) -> Self {
        let all_finite = ratios.iter().all(|r| r.is_finite());
        let mut sorted = ratios.to_vec();
        sorted.sort_by(f64::total_cmp);
        let max = sorted.last().copied();
        let median = (!sorted.is_empty()).then(|| {
            let n = sorted.len();
            if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            }
        });
        let stable = match (max, median) {
            (Some(mx), Some(md)) => Some(all_finite && mx <= 10.0 * md),
            _ => None,
        };
        Self {
            count: ratios.len(),
            max,
            median,
            all_finite,
            stable,
        }
    }
}

/// Results of the bound checks on every sampled field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundChecks {
    pub gamma0: f64,
    pub gamma1: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub p0: f64,
    pub p1: f64,
    pub fields_checked: usize,
    pub stress_within: bool,
    pub stretch_within: bool,
    /// `None` without nutrient data.
    pub coefficients_within: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub seed: u64,
    pub pairs: usize,
    pub radius: f64,
    /// Set when the ball is a single point so no ratio is defined.
    pub degenerate_ball: bool,
    /// Pairs skipped because both fields coincided.
    pub skipped_pairs: usize,
    pub stress_ratios: Vec<f64>,
    pub nutrient_ratios: Vec<f64>,
    pub stress_summary: RatioSummary,
    pub nutrient_summary: RatioSummary,
    pub bounds: BoundChecks,
    pub assumptions: AssumptionReport,
}

/// Reference points where `N` is compared: material nodes and cell midpoints.
fn probe_points(g: &GrowthField) -> Vec<f64> {
    let grid = g.grid();
    let mut pts = grid.nodes().to_vec();
    pts.extend((0..grid.cell_count()).map(|c| grid.midpoint(c)));
    pts
}

const BOUND_SLACK: f64 = 1e-12;

/// Draw `pairs` random pairs from `ball` and record
/// `|S(G1) - S(G2)| / |G1 - G2|` and `|N(G1) - N(G2)| / |G1 - G2|`.
pub fn lipschitz_probe(
    system: &GrowthSystem,
    ball: &GrowthBounds,
    pairs: usize,
    seed: u64,
    samples_per_axis: usize,
) -> Result<ProbeReport> {
    let ((sigma0, sigma1), stretch) = equilibrium_bounds(&system.model, ball, system.ell0)?;
    let coeff_bounds = system.nutrients.as_ref().map(|p| {
        let (dmin, dmax) = p.d0_range();
        let (bmin, bmax) = p.beta0_range();
        (
            (stretch.p0 * dmin, stretch.p1 * dmax),
            (bmin / stretch.p1, bmax / stretch.p0),
        )
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stress_ratios = Vec::with_capacity(pairs);
    let mut nutrient_ratios = Vec::with_capacity(pairs);
    let mut skipped = 0;
    let mut checked = 0;
    let mut stress_within = true;
    let mut stretch_within = true;
    let mut coefficients_within = coeff_bounds.map(|_| true);

    let mut evaluate = |g: &GrowthField| -> Result<(f64, Option<Vec<f64>>)> {
        let state = system.equilibrium(g)?;
        checked += 1;
        let s = state.stress();
        let tol = BOUND_SLACK * (1.0 + s.abs());
        stress_within &= s >= sigma0 - tol && s <= sigma1 + tol;
        stretch_within &= state
            .stretch()
            .iter()
            .all(|&p| stretch.contains(p, BOUND_SLACK));
        let n = match (&system.nutrients, coeff_bounds) {
            (Some(params), Some(((d_lo, d_hi), (b_lo, b_hi)))) => {
                let c = transformed_coefficients(params, &state)?;
                let inside = |v: f64, lo: f64, hi: f64| {
                    v >= lo * (1.0 - BOUND_SLACK) && v <= hi * (1.0 + BOUND_SLACK)
                };
                let ok = c.diffusivity.iter().all(|&d| inside(d, d_lo, d_hi))
                    && c.absorption.iter().all(|&b| inside(b, b_lo, b_hi));
                if let Some(flag) = coefficients_within.as_mut() {
                    *flag &= ok;
                }
                let sol = system.nutrients(&state)?.expect("nutrient data present");
                Some(pull_back(&sol, &state, &probe_points(g))?)
            }
            _ => None,
        };
        Ok((s, n))
    };

    for _ in 0..pairs {
        let a = ball.sample(&mut rng);
        let b = ball.sample(&mut rng);
        let dist = sup_distance(&a, &b)?;
        if dist == 0.0 {
            skipped += 1;
            continue;
        }
        let (sa, na) = evaluate(&a)?;
        let (sb, nb) = evaluate(&b)?;
        stress_ratios.push((sa - sb).abs() / dist);
        if let (Some(na), Some(nb)) = (na, nb) {
            let dn = na
                .iter()
                .zip(&nb)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            nutrient_ratios.push(dn / dist);
        }
    }
    if pairs == 0 || ball.radius() == 0.0 {
        // the centre still has to satisfy the bounds
        evaluate(ball.center())?;
    }

    let n_max = system.n_max();
    let sample_box = SampleBox {
        growth: (ball.gamma0(), ball.gamma1()),
        stress: (sigma0, sigma1),
        nutrient: (0.0, n_max),
    };
    let assumptions = check_assumptions(&system.law, &sample_box, samples_per_axis, n_max)?;

    Ok(ProbeReport {
        seed,
        pairs,
        radius: ball.radius(),
        degenerate_ball: ball.radius() == 0.0,
        skipped_pairs: skipped,
        stress_summary: RatioSummary::of(&stress_ratios),
        nutrient_summary: RatioSummary::of(&nutrient_ratios),
        stress_ratios,
        nutrient_ratios,
        bounds: BoundChecks {
            gamma0: ball.gamma0(),
            gamma1: ball.gamma1(),
            sigma0,
            sigma1,
            p0: stretch.p0,
            p1: stretch.p1,
            fields_checked: checked,
            stress_within,
            stretch_within,
            coefficients_within,
        },
        assumptions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_summary() {
        let s = RatioSummary::of(&[3.0, 1.0, 2.0]);
        assert_eq!(s.max, Some(3.0));
        assert_eq!(s.median, Some(2.0));
        assert_eq!(s.stable, Some(true));
        let s = RatioSummary::of(&[1.0, 1.0, 30.0, 1.0]);
        assert_eq!(s.median, Some(1.0));
        assert_eq!(s.stable, Some(false));
        let s = RatioSummary::of(&[]);
        assert_eq!((s.max, s.median, s.stable), (None, None, None));
    }
}
