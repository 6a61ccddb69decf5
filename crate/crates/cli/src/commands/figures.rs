use morphogrow::oracle::{solve_elastic, solve_nutrients_closed_form};

use super::{two_segment, CmdError};
use crate::config::RunConfig;
use crate::output::{columns, RunDir};

/// Samples per segment of the elastic map and the nutrient profile.
const SAMPLES: usize = 100;

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| {
        if i == n {
            b
        } else {
            a + (b - a) * i as f64 / n as f64
        }
    })
}

pub fn run(cfg: &RunConfig, out: &mut RunDir) -> Result<(), CmdError> {
    let problem = two_segment(cfg)?;
    let solver = |e: morphogrow::Error| CmdError::Solver(e.to_string());
    let elastic = solve_elastic(&problem).map_err(solver)?;

    let [g0, g1] = problem.growth;
    let xi = problem.interface;
    let steps = [(0.0, g0), (xi, g0), (xi, g1), (problem.length, g1)];
    out.write("fig1_growth.dat", &columns(("X", "G"), steps))?;

    // affine on each piece; the knots are hit exactly
    let left = linspace(0.0, elastic.z_i, SAMPLES).map(|z| (z, elastic.phi(z)));
    let right = linspace(elastic.z_i, elastic.g_l, SAMPLES)
        .skip(1)
        .map(|z| (z, elastic.phi(z)));
    let mut phi: Vec<(f64, f64)> = left.chain(right).collect();
    phi[0].1 = 0.0;
    phi[SAMPLES].1 = elastic.x_i;
    phi[2 * SAMPLES].1 = problem.ell0;
    out.write("fig1_phi.dat", &columns(("z", "phi"), phi))?;

    let profile = solve_nutrients_closed_form(&problem, &elastic).map_err(solver)?;
    let left = linspace(0.0, elastic.x_i, SAMPLES);
    let right = linspace(elastic.x_i, problem.ell0, SAMPLES).skip(1);
    let n = left.chain(right).map(|x| (x, profile.eval(x)));
    out.write("fig2_nutrient.dat", &columns(("x", "n"), n))?;
    Ok(())
}
