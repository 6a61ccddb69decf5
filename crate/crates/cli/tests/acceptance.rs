//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use morphogrow::dynamics::{
    integrate, GrowthLaw, GrowthSystem, IntegrationOptions, LawKind, NutrientResponse,
    NutrientSampling, StressResponse,
};
use morphogrow::elastostatics::{growth_map, solve_stress};
use morphogrow::energy::{BaseEnergy, EnergyModel};
use morphogrow::fields::{two_segment_grid, uniform_grid, GrowthBounds, GrowthField};
use morphogrow::nutrients::{solve_nutrients, NutrientParams};
use morphogrow::oracle::{
    oracle_compare, solve_elastic, solve_exponential, solve_nutrients_closed_form,
    NutrientSegments, TwoSegmentConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_morphogrow");

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn figure_config(base: BaseEnergy, kappa: [f64; 2]) -> TwoSegmentConfig {
    TwoSegmentConfig {
        length: 1.0,
        interface: 0.8,
        ell0: 1.0,
        base,
        kappa,
        growth: [0.9, 5.5],
        d0: [1.0, 8.0],
        beta0: [1.0, 8.0],
        n_left: 1.0,
        n_right: 1.0,
    }
}

fn landmarks() -> Check {
    let grid = Arc::new(two_segment_grid(1.0, 0.8, 4).map_err(|e| e.to_string())?);
    let g = GrowthField::new(grid.clone(), grid.expand_segments(&[0.9, 5.5]).unwrap()).unwrap();
    let nodes = growth_map(&g);
    let z_i = nodes[grid.interface_node().unwrap()];
    let g_l = *nodes.last().unwrap();
    ensure((z_i - 0.72).abs() <= 1e-12, format!("z_I = {z_i}"))?;
    ensure((g_l - 1.82).abs() <= 1e-12, format!("g(L0) = {g_l}"))?;
    let e =
        solve_elastic(&figure_config(BaseEnergy::Mooney, [1.0, 2.0])).map_err(|e| e.to_string())?;
    ensure(
        (e.z_i - 0.72).abs() <= 1e-12 && (e.g_l - 1.82).abs() <= 1e-12,
        "oracle landmarks",
    )?;
    Ok(format!("z_I = {z_i:.15}, g(L0) = {g_l:.15}"))
}

fn pure_growth() -> Check {
    let start = Instant::now();
    let grid = Arc::new(two_segment_grid(1.0, 0.5, 2).unwrap());
    let model = EnergyModel::homogeneous(BaseEnergy::Mooney, grid.clone(), 1.0).unwrap();
    let rates = grid.expand_segments(&[1.0, 2.0]).unwrap();
    let system = GrowthSystem::new(
        model.clone(),
        1.0,
        None,
        GrowthLaw::pure(rates.clone()).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let ones = GrowthField::constant(grid.clone(), 1.0).unwrap();
    let opts = IntegrationOptions::default();
    let traj = integrate(&system, &ones, 1.0, 1e-2, &opts).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (t, g) in traj.times.iter().zip(&traj.states) {
        for (v, r) in g.values().iter().zip(&rates) {
            let exact = (r * t).exp();
            worst = worst.max((v - exact).abs() / exact);
        }
    }
    ensure(worst < 1e-8, format!("relative error {worst:e}"))?;

    let flat = GrowthSystem::new(model, 1.0, None, GrowthLaw::pure(vec![2.0; 4]).unwrap()).unwrap();
    let err = |dt: f64| -> Result<f64, String> {
        let t = integrate(&flat, &ones, 0.5, dt, &opts).map_err(|e| e.to_string())?;
        Ok((t.last_state().unwrap().values()[0] - 1f64.exp()).abs())
    };
    let order = (err(0.1)? / err(0.05)?).log2();
    ensure((order - 4.0).abs() <= 0.2, format!("order {order}"))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "max rel error {worst:.2e}, RK4 order {order:.3}, {elapsed:.3} s"
    ))
}

fn stress_closed_form() -> Check {
    let grid = Arc::new(uniform_grid(1.0, 5).unwrap());
    let model = EnergyModel::homogeneous(BaseEnergy::Quadratic, grid.clone(), 1.0).unwrap();
    let two = GrowthField::constant(grid.clone(), 2.0).unwrap();
    let s2 = solve_stress(&model, &two, 1.0, 1e-13)
        .map_err(|e| e.to_string())?
        .stress();
    ensure((s2 + 0.5).abs() <= 1e-10, format!("G=2: S = {s2}"))?;
    let one = GrowthField::constant(grid, 1.0).unwrap();
    let s1 = solve_stress(&model, &one, 1.0, 1e-13).unwrap().stress();
    ensure(s1.abs() <= 1e-12, format!("G=1: S = {s1}"))?;

    // hand elimination: B0 z_I + B1 (g_L - z_I) = ell0 and k0 (B0 - 1) = k1 (B1 - 1)
    let (k0, k1, z_i, g_l) = (1.0, 2.0, 0.72, 1.82);
    let b0 = (1.0 - (1.0 - k0 / k1) * (g_l - z_i)) / (z_i + k0 / k1 * (g_l - z_i));
    let hand_s = k0 * (b0 - 1.0);
    let hand_x = b0 * z_i;

    let grid = Arc::new(two_segment_grid(1.0, 0.8, 3).unwrap());
    let model = EnergyModel::new(
        BaseEnergy::Quadratic,
        grid.clone(),
        grid.expand_segments(&[k0, k1]).unwrap(),
    )
    .unwrap();
    let g = GrowthField::new(grid.clone(), grid.expand_segments(&[0.9, 5.5]).unwrap()).unwrap();
    let st = solve_stress(&model, &g, 1.0, 1e-13).map_err(|e| e.to_string())?;
    let x_i = st.interface_image(0.8).map_err(|e| e.to_string())?;
    for (name, got, want) in [
        ("S", st.stress(), hand_s),
        ("x_I", x_i, hand_x),
        ("S reference", st.stress(), -0.64567),
        ("x_I reference", x_i, 0.25512),
    ] {
        ensure(
            (got - want).abs() <= 1e-5,
            format!("{name}: {got} vs {want}"),
        )?;
    }
    let oracle = solve_elastic(&figure_config(BaseEnergy::Quadratic, [k0, k1])).unwrap();
    ensure((oracle.stress - hand_s).abs() <= 1e-12, "oracle stress")?;
    Ok(format!(
        "S(G=2) = {s2}, S = {:.6}, x_I = {x_i:.6}",
        st.stress()
    ))
}

fn euler_lagrange() -> Check {
    let start = Instant::now();
    let grid = Arc::new(uniform_grid(1.0, 16).unwrap());
    let kappa: Vec<f64> = (0..16).map(|c| 0.5 + 0.2 * c as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_dev: f64 = 0.0;
    let mut worst_bc: f64 = 0.0;
    let mut redrawn = 0;
    for i in 0..500 {
        let base = if i % 2 == 0 {
            BaseEnergy::Mooney
        } else {
            BaseEnergy::Quadratic
        };
        let model = EnergyModel::new(base, grid.clone(), kappa.clone()).unwrap();
        let (g, ell0) = loop {
            let ell0 = rng.gen_range(0.5..2.0);
            let center = GrowthField::constant(grid.clone(), rng.gen_range(0.8..3.0)).unwrap();
            let g = GrowthBounds::new(center, 0.6).unwrap().sample(&mut rng);
            // a quadratic body cannot shrink the softest cells below zero
            // length, so the plates may not be closer than what the
            // stiffer cells still occupy at stress -kappa_min
            let floor: f64 = g
                .values()
                .iter()
                .zip(&kappa)
                .map(|(gv, k)| (1.0 - kappa[0] / k) * gv / 16.0)
                .sum();
            if base == BaseEnergy::Mooney || ell0 > floor {
                break (g, ell0);
            }
            redrawn += 1;
        };
        let st = match solve_stress(&model, &g, ell0, 1e-12 * ell0) {
            Ok(st) => st,
            Err(e) => return Err(format!("sample {i}: {e}")),
        };
        worst_dev = worst_dev.max(st.stress_deviation(&model));
        worst_bc = worst_bc.max(st.boundary_error() / ell0);
    }
    ensure(worst_dev <= 1e-9, format!("stress deviation {worst_dev:e}"))?;
    ensure(worst_bc <= 1e-10, format!("boundary error {worst_bc:e}"))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 10.0, format!("took {elapsed:.2} s"))?;
    Ok(format!(
        "500 fields ({redrawn} inadmissible redrawn), max |Wp - S| {worst_dev:.1e}, max |y(L0)-ell0|/ell0 {worst_bc:.1e}"
    ))
}

fn nutrient_oracle() -> Check {
    let config = figure_config(BaseEnergy::Mooney, [1.0, 2.0]);
    let table = oracle_compare(&config, &[4, 8, 16, 32]).map_err(|e| e.to_string())?;
    ensure(
        table
            .rows
            .windows(2)
            .all(|w| w[1].nutrient_error < w[0].nutrient_error),
        "errors not decreasing",
    )?;
    let min_order = table.orders.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(min_order >= 1.9, format!("order {min_order}"))?;
    let elastic = solve_elastic(&config).unwrap();
    let profile = solve_nutrients_closed_form(&config, &elastic).unwrap();
    let c = profile.coefficients();
    ensure(
        (c[0] + c[1] - config.n_left).abs() <= 1e-12,
        "c0+ + c0- != nL",
    )?;

    // caption coefficients and exponents against the caption inputs
    let caption = NutrientSegments {
        x_i: 0.538,
        ell0: 1.0,
        stretch: [0.72, 0.41],
        d0: [1.0, 8.0],
        beta0: [1.0, 8.0],
        n_left: 1.0,
        n_right: 1.0,
    };
    let ours = solve_exponential(caption).map_err(|e| e.to_string())?;
    let quoted = |x: f64| {
        if x <= 0.538 {
            0.0885 * (1.3368 * x).exp() + 0.9114 * (-1.3368 * x).exp()
        } else {
            0.082 * (2.3839 * x).exp() + 1.1884 * (-2.3839 * x).exp()
        }
    };
    let worst = (0..=200)
        .map(|i| i as f64 / 200.0)
        .map(|x| (ours.eval(x) - quoted(x)).abs() / quoted(x))
        .fold(0.0, f64::max);
    ensure(worst <= 0.05, format!("caption deviation {worst}"))?;
    Ok(format!(
        "orders {:?}, caption deviation {:.1}%",
        table
            .orders
            .iter()
            .map(|o| (o * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>(),
        100.0 * worst
    ))
}

fn maximum_principle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_low: f64 = 0.0;
    let mut worst_high: f64 = 0.0;
    for i in 0..200 {
        let grid =
            Arc::new(two_segment_grid(1.0, rng.gen_range(0.1..0.9), rng.gen_range(1..5)).unwrap());
        let kappa = [rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)];
        let model = EnergyModel::new(
            BaseEnergy::Mooney,
            grid.clone(),
            grid.expand_segments(&kappa).unwrap(),
        )
        .unwrap();
        let values: Vec<f64> = (0..grid.cell_count())
            .map(|_| rng.gen_range(0.3..4.0))
            .collect();
        let g = GrowthField::new(grid.clone(), values).unwrap();
        let st = solve_stress(&model, &g, rng.gen_range(0.5..2.0), 1e-12)
            .map_err(|e| format!("config {i}: {e}"))?;
        let (nl, nr) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let params = NutrientParams::from_segments(
            &grid,
            &[rng.gen_range(0.05..10.0), rng.gen_range(0.05..10.0)],
            &[rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0)],
            nl,
            nr,
        )
        .unwrap();
        let sol = solve_nutrients(&params, &st, rng.gen_range(1..9)).map_err(|e| e.to_string())?;
        let top = nl.max(nr);
        for &n in sol.n() {
            worst_low = worst_low.max(-n);
            worst_high = worst_high.max(n - top);
        }
    }
    ensure(worst_low <= 1e-12, format!("undershoot {worst_low:e}"))?;
    ensure(worst_high <= 1e-12, format!("overshoot {worst_high:e}"))?;
    Ok(format!(
        "200 configs, undershoot {worst_low:.1e}, overshoot {worst_high:.1e}"
    ))
}

fn envelope_invariance(tmp: &Path) -> Check {
    let grid = Arc::new(two_segment_grid(1.0, 0.8, 4).unwrap());
    let model = EnergyModel::new(
        BaseEnergy::Mooney,
        grid.clone(),
        grid.expand_segments(&[1.0, 2.0]).unwrap(),
    )
    .unwrap();
    let params = NutrientParams::from_segments(&grid, &[1.0, 8.0], &[1.0, 8.0], 1.0, 1.0).unwrap();
    let law = GrowthLaw::new(
        LawKind::Full,
        grid.expand_segments(&[1.0, 1.5]).unwrap(),
        StressResponse::Arctan {
            a: 0.5,
            b: 0.0,
            c: 1.0,
        },
        NutrientResponse::Clamp {
            critical: 0.2,
            floor: 0.1,
        },
        NutrientSampling::Midpoint,
    )
    .unwrap();
    let system = GrowthSystem::new(model, 1.0, Some(params), law).unwrap();
    let env = system.envelope().ok_or("no envelope for a bounded law")?;
    let ones = GrowthField::constant(grid, 1.0).unwrap();
    let traj = integrate(&system, &ones, 2.0, 0.01, &IntegrationOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(traj.times.len() == 201, "expected every step recorded")?;
    for (t, g) in traj.times.iter().zip(&traj.states) {
        let slack = env.default_slack(*t);
        for &v in g.values() {
            ensure(
                v > env.lower(*t) - slack && v < env.upper(*t) + slack,
                format!("G = {v} outside envelope at t = {t}"),
            )?;
        }
    }

    let text = fs::read_to_string(configs().join("full.cfg")).map_err(|e| e.to_string())?
        + "integration.inject_fault_at = 1.0\n";
    let cfg = tmp.join("fault.cfg");
    fs::write(&cfg, text).unwrap();
    let out = Command::new(BIN)
        .args(["simulate", cfg.to_str().unwrap(), "--out"])
        .arg(tmp.join("fault"))
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.code() == Some(4),
        format!("fault exit code {:?}", out.status.code()),
    )?;
    Ok(format!(
        "201 steps inside (c0, c1) = ({:.4}, {:.4}); injected fault exits 4",
        env.c0, env.c1
    ))
}

fn lipschitz(tmp: &Path) -> Check {
    let start = Instant::now();
    let out = tmp.join("probe");
    let o = Command::new(BIN)
        .args([
            "probe",
            configs().join("fig1.cfg").to_str().unwrap(),
            "--out",
        ])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        o.status.success(),
        String::from_utf8_lossy(&o.stderr).to_string(),
    )?;
    let p: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("probe.json")).unwrap()).unwrap();
    ensure(
        p["bounds"]["gamma0"] == 0.5 && p["bounds"]["gamma1"] == 6.0,
        "ball is not [0.5, 6]",
    )?;
    let mut parts = Vec::new();
    for key in ["stress_ratios", "nutrient_ratios"] {
        let mut r: Vec<f64> = p[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap_or(f64::NAN))
            .collect();
        ensure(r.len() == 100, format!("{key}: {} ratios", r.len()))?;
        ensure(
            r.iter().all(|x| x.is_finite()),
            format!("{key}: non-finite ratio"),
        )?;
        r.sort_by(f64::total_cmp);
        let median = r[r.len() / 2];
        let max = r[r.len() - 1];
        ensure(
            max <= 10.0 * median,
            format!("{key}: max {max} vs median {median}"),
        )?;
        parts.push(format!("{key} max/median {:.2}", max / median));
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 60.0, format!("took {elapsed:.1} s"))?;
    Ok(parts.join(", "))
}

/// Files of an output directory, with the manifest's elapsed time removed.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let name = e.file_name().into_string().unwrap();
            let mut bytes = fs::read(e.path()).unwrap();
            if name == "manifest.json" {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v.as_object_mut().unwrap().remove("wall_clock_seconds");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn determinism(tmp: &Path) -> Check {
    let mut compared = 0;
    for (cmd, cfg) in [
        ("simulate", "full.cfg"),
        ("probe", "fig1.cfg"),
        ("oracle-compare", "fig1.cfg"),
        ("figures", "fig1.cfg"),
    ] {
        let mut snaps = Vec::new();
        for run in ["a", "b"] {
            let out = tmp.join(format!("det_{cmd}_{run}"));
            let o = Command::new(BIN)
                .args([
                    cmd,
                    configs().join(cfg).to_str().unwrap(),
                    "--seed",
                    "11",
                    "--out",
                ])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.success(), format!("{cmd} failed"))?;
            snaps.push(snapshot(&out));
        }
        ensure(snaps[0] == snaps[1], format!("{cmd} outputs differ"))?;
        compared += snaps[0].len();
    }
    Ok(format!("{compared} files byte-identical across reruns"))
}

fn main() {
    let tmp = TempDir::new().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        ("growth-map landmarks", Box::new(landmarks)),
        ("pure-growth exactness and RK4 order", Box::new(pure_growth)),
        ("stress closed form", Box::new(stress_closed_form)),
        ("Euler-Lagrange invariant", Box::new(euler_lagrange)),
        ("nutrient oracle equivalence", Box::new(nutrient_oracle)),
        (
            "maximum principle and nonnegativity",
            Box::new(maximum_principle),
        ),
        (
            "envelope invariance",
            Box::new(|| envelope_invariance(tmp.path())),
        ),
        ("Lipschitz probes", Box::new(|| lipschitz(tmp.path()))),
        ("determinism", Box::new(|| determinism(tmp.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
