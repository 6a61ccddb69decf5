use std::sync::Arc;

use morphogrow::dynamics::{GrowthLaw, GrowthSystem};
use morphogrow::elastostatics::solve_stress;
use morphogrow::energy::{BaseEnergy, EnergyModel};
use morphogrow::fields::{two_segment_grid, GrowthBounds, GrowthField};
use morphogrow::nutrients::{
    pull_back_nodes, solve_nutrients, solve_on_cells, transformed_coefficients, NutrientParams,
};
use morphogrow::probe::lipschitz_probe;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn discrete_maximum_principle(
        d in prop::collection::vec(0.05f64..20.0, 5),
        b in prop::collection::vec(0.0f64..30.0, 5),
        widths in prop::collection::vec(0.05f64..1.0, 5),
        nl in 0.0f64..3.0,
        nr in 0.0f64..3.0,
        refine in 1usize..6,
    ) {
        let mut nodes = vec![0.0];
        for w in &widths {
            nodes.push(nodes.last().unwrap() + w);
        }
        let prof = solve_on_cells(&nodes, &d, &b, nl, nr, refine).unwrap();
        prop_assert_eq!(prof.n[0], nl);
        prop_assert_eq!(*prof.n.last().unwrap(), nr);
        let top = nl.max(nr);
        for v in &prof.n {
            prop_assert!(*v >= 0.0 && *v <= top * (1.0 + 1e-14));
        }
    }

    #[test]
    fn fluxes_balance_absorption_at_every_node(
        d in prop::collection::vec(0.05f64..20.0, 4),
        b in prop::collection::vec(0.01f64..30.0, 4),
        refine in 1usize..5,
    ) {
        let nodes = [0.0, 0.3, 0.45, 1.1, 1.6];
        let prof = solve_on_cells(&nodes, &d, &b, 1.0, 0.5, refine).unwrap();
        let seg_b: Vec<f64> = b.iter().flat_map(|&v| std::iter::repeat_n(v, refine)).collect();
        let h: Vec<f64> = prof.x.windows(2).map(|w| w[1] - w[0]).collect();
        for i in 1..prof.x.len() - 1 {
            let reaction = 0.5 * (seg_b[i - 1] * h[i - 1] + seg_b[i] * h[i]) * prof.n[i];
            let balance = prof.flux[i] - prof.flux[i - 1] + reaction;
            let scale = prof.flux[i].abs() + prof.flux[i - 1].abs() + reaction.abs();
            prop_assert!(balance.abs() <= 1e-11 * scale.max(1e-12));
        }
    }

    #[test]
    fn transformed_coefficients_stay_elliptic(
        values in prop::collection::vec(0.6f64..1.4, 2),
        ell0 in 0.6f64..1.6,
    ) {
        let grid = Arc::new(two_segment_grid(1.0, 0.5, 2).unwrap());
        let model = EnergyModel::new(BaseEnergy::Mooney, grid.clone(), vec![1.0, 1.0, 2.0, 2.0]).unwrap();
        let center = GrowthField::constant(grid.clone(), 1.0).unwrap();
        let ball = GrowthBounds::new(center, 0.4).unwrap();
        let g = GrowthField::new(grid.clone(), grid.expand_segments(&values).unwrap()).unwrap();
        let params = NutrientParams::from_segments(&grid, &[1.0, 8.0], &[1.0, 8.0], 1.0, 1.0).unwrap();
        let state = solve_stress(&model, &g, ell0, 1e-12).unwrap();
        let ((_, _), p) = morphogrow::elastostatics::equilibrium_bounds(&model, &ball, ell0).unwrap();
        let c = transformed_coefficients(&params, &state).unwrap();
        let tol = 1e-12;
        for v in &c.diffusivity {
            prop_assert!(*v >= p.p0 * 1.0 * (1.0 - tol) && *v <= p.p1 * 8.0 * (1.0 + tol));
        }
        for v in &c.absorption {
            prop_assert!(*v >= 1.0 / p.p1 * (1.0 - tol) && *v <= 8.0 / p.p0 * (1.0 + tol));
        }
    }
}

#[test]
fn second_order_against_cosh_profile() {
    let exact = |x: f64| (x - 0.5).cosh() / 0.5f64.cosh();
    let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
    let errors: Vec<f64> = [4usize, 8, 16]
        .iter()
        .map(|&r| {
            let prof = solve_on_cells(&nodes, &[1.0; 4], &[1.0; 4], 1.0, 1.0, r).unwrap();
            prof.x
                .iter()
                .zip(&prof.n)
                .map(|(&x, &n)| (n - exact(x)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "observed order {order}");
    }
}

#[test]
fn pull_back_keeps_constants() {
    let grid = Arc::new(two_segment_grid(1.0, 0.4, 3).unwrap());
    let model = EnergyModel::new(
        BaseEnergy::Mooney,
        grid.clone(),
        grid.expand_segments(&[1.0, 2.0]).unwrap(),
    )
    .unwrap();
    let g = GrowthField::new(grid.clone(), grid.expand_segments(&[1.0, 3.0]).unwrap()).unwrap();
    let state = solve_stress(&model, &g, 1.3, 1e-12).unwrap();
    let params = NutrientParams::from_segments(&grid, &[1.0, 2.0], &[0.0, 0.0], 0.7, 0.7).unwrap();
    let sol = solve_nutrients(&params, &state, 4).unwrap();
    for v in pull_back_nodes(&sol, &state).unwrap() {
        assert!((v - 0.7).abs() < 1e-14);
    }
}

#[test]
fn nutrient_map_is_lipschitz_on_the_ball() {
    let grid = Arc::new(two_segment_grid(1.0, 0.8, 1).unwrap());
    let model = EnergyModel::new(BaseEnergy::Mooney, grid.clone(), vec![1.0, 2.0]).unwrap();
    let params = NutrientParams::from_segments(&grid, &[1.0, 8.0], &[1.0, 8.0], 1.0, 1.0).unwrap();
    let law = GrowthLaw::pure(vec![1.0, 1.0]).unwrap();
    let system = GrowthSystem::new(model, 1.0, Some(params), law).unwrap();
    let center = GrowthField::new(grid, vec![1.0, 5.5]).unwrap();
    let ball = GrowthBounds::new(center, 0.5).unwrap();
    let report = lipschitz_probe(&system, &ball, 60, 3, 3).unwrap();
    assert_eq!(report.nutrient_summary.stable, Some(true));
    assert_eq!(report.stress_summary.stable, Some(true));
    assert!(report.bounds.stress_within && report.bounds.stretch_within);
    assert_eq!(report.bounds.coefficients_within, Some(true));
}
