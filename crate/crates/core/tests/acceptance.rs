//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thermoyield::lorenz::{build_curve, thermomajorizes};
use thermoyield::model::{single_molecule_initial, single_molecule_model, PhotoswitchParams};
use thermoyield::modes::{Block, CoherentBlockState};
use thermoyield::sweep::{
    advantage_map, default_gap_grid, default_p_grid, fit_ridge, gap_sweep, ridge_extract, RidgePoint,
};
use thermoyield::thermo::{gibbs_state, partition_function, EnergySpectrum, PopulationVector, ThermalContext};
use thermoyield::yields::{
    brute_force_yield, max_subset_mass, qy_any, qy_both, qy_single, two_molecule_setup, BruteForce,
    YieldDefinition,
};

type Outcome = Result<String, String>;

fn beta1() -> ThermalContext {
    ThermalContext::new(1.0).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(x: f64, target: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure(
        (x - target).abs() <= tol,
        format!("{what} = {x:.6}, expected {target} ± {tol}"),
    )
}

// Best of several timed runs, to keep scheduler noise out of the budget.
fn fastest<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..runs {
        let t = Instant::now();
        let v = f();
        best = best.min(t.elapsed());
        out = Some(v);
    }
    (out.unwrap(), best)
}

fn random_population(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn ac1() -> Outcome {
    let params = PhotoswitchParams::rhodopsin(0.7, 0.02).unwrap();
    let (r, t) = fastest(20, || qy_both(&params, beta1()).unwrap());
    within(r.value, 0.274, 0.005, "qy_both")?;
    ensure(t < Duration::from_millis(1), format!("took {t:?}"))?;
    Ok(format!("qy_both = {:.4} in {t:?}", r.value))
}

fn ac2() -> Outcome {
    let params = PhotoswitchParams::rhodopsin(0.7, 0.2).unwrap();
    let (r, t) = fastest(20, || qy_both(&params, beta1()).unwrap());
    ensure(r.value >= 0.39, format!("qy_both = {} < 0.39", r.value))?;
    within(r.value, 0.4069, 0.005, "qy_both")?;
    ensure(t < Duration::from_millis(1), format!("analytic took {t:?}"))?;

    let resolution = 0.01;
    let (spectrum, initial, _) = two_molecule_setup(&params, beta1()).unwrap();
    let start = Instant::now();
    let oracle = BruteForce::new(resolution)
        .unwrap()
        .with_symmetry(true)
        .run(&initial, &spectrum, beta1(), YieldDefinition::Both.subset())
        .map_err(|e| format!("oracle failed: {e}"))?;
    let oracle_time = start.elapsed();
    ensure(
        oracle.value <= r.value + 1e-9,
        format!("oracle {} above analytic {}", oracle.value, r.value),
    )?;
    within(oracle.value, r.value, resolution, "oracle value")?;
    Ok(format!(
        "qy_both = {:.4} in {t:?}; symmetric oracle at {resolution} = {:.4} in {oracle_time:.1?}",
        r.value, oracle.value
    ))
}

fn ac3() -> Outcome {
    let mut values = Vec::new();
    for lam in [0.02, 0.2] {
        let r = qy_any(&PhotoswitchParams::rhodopsin(0.7, lam).unwrap(), beta1()).unwrap();
        ensure(r.value >= 0.81, format!("qy_any(lambda={lam}) = {} < 0.81", r.value))?;
        within(r.value, 0.830, 0.005, &format!("qy_any(lambda={lam})"))?;
        values.push(r.value);
    }
    ensure(
        (values[0] - values[1]).abs() <= 1e-12,
        format!("lambda changes qy_any: {values:?}"),
    )?;
    Ok(format!("qy_any = {:.4} at both coherences", values[0]))
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let resolution = 0.01;
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let d = rng.gen_range(3..=4);
        let energies: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..2.0)).collect();
        let spectrum = EnergySpectrum::from_energies(&energies).unwrap();
        let ctx = ThermalContext::new(rng.gen_range(0.5..=2.0)).unwrap();
        let initial = PopulationVector::new(random_population(&mut rng, d)).unwrap();
        let size = rng.gen_range(1..d);
        let mut subset: Vec<usize> = (0..d).collect();
        for k in 0..d {
            let swap = rng.gen_range(k..d);
            subset.swap(k, swap);
        }
        subset.truncate(size);

        let curve = build_curve(&initial, &spectrum, ctx).unwrap();
        let exact = max_subset_mass(&curve, &spectrum, ctx, &subset).unwrap();
        let brute = brute_force_yield(&initial, &spectrum, ctx, &subset, resolution)
            .map_err(|e| format!("case {case}: oracle failed: {e}"))?;
        let gap = exact.value - brute.value;
        ensure(
            gap >= -1e-9 && gap <= resolution * d as f64,
            format!("case {case}: analytic {} vs oracle {}", exact.value, brute.value),
        )?;
        worst = worst.max(gap);
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), format!("took {t:?}"))?;
    Ok(format!("50 instances, largest gap {worst:.4}, {t:.2?}"))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    let mut gibbs_cases = 0;
    for case in 0..100 {
        let d = rng.gen_range(2..=9);
        let energies: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..5.0)).collect();
        let spectrum = EnergySpectrum::from_energies(&energies).unwrap();
        let ctx = ThermalContext::new(rng.gen_range(0.1..5.0)).unwrap();
        let g = gibbs_state(&spectrum, ctx);
        // every tenth case is the Gibbs state itself
        let probs = if case % 10 == 0 {
            gibbs_cases += 1;
            g.as_slice().to_vec()
        } else {
            random_population(&mut rng, d)
        };
        let is_gibbs = probs.iter().zip(g.as_slice()).all(|(a, b)| (a - b).abs() <= 1e-9);
        let state = PopulationVector::new(probs).unwrap();
        let sc = build_curve(&state, &spectrum, ctx).unwrap();
        let gc = build_curve(&g, &spectrum, ctx).unwrap();
        ensure(thermomajorizes(&sc, &gc).unwrap(), format!("case {case}: state does not reach Gibbs"))?;
        ensure(
            thermomajorizes(&gc, &sc).unwrap() == is_gibbs,
            format!("case {case}: Gibbs reverse check wrong (is_gibbs = {is_gibbs})"),
        )?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!("100 states ({gibbs_cases} Gibbs), {t:.2?}"))
}

fn ac6() -> Outcome {
    let lams: Vec<f64> = (0..=7).map(|k| k as f64 * 0.05).collect();
    let mut prev: Option<(f64, f64, thermoyield::LorenzCurve)> = None;
    for &lam in &lams {
        let params = PhotoswitchParams::rhodopsin(0.7, lam).unwrap();
        let both = qy_both(&params, beta1()).unwrap().value;
        let any = qy_any(&params, beta1()).unwrap().value;
        let (_, _, curve) = two_molecule_setup(&params, beta1()).unwrap();
        if let Some((pb, pa, pc)) = &prev {
            ensure(both >= pb - 1e-12, format!("qy_both drops at lambda={lam}"))?;
            ensure(any >= pa - 1e-12, format!("qy_any drops at lambda={lam}"))?;
            ensure(
                thermomajorizes(&curve, pc).unwrap(),
                format!("curve at lambda={lam} does not majorize its predecessor"),
            )?;
        }
        prev = Some((both, any, curve));
    }
    Ok(format!("{} coherence levels in order", lams.len()))
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spectrum = EnergySpectrum::from_energies(&[0.0, 1.0, 1.0]).unwrap();
    for case in 0..1000 {
        let probs = random_population(&mut rng, 3);
        let (a, b) = (probs[1], probs[2]);
        let lam = Complex64::from_polar(
            (a * b).sqrt() * rng.gen_range(0.0..=1.0),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let state = CoherentBlockState::new(
            spectrum.clone(),
            PopulationVector::new(probs.clone()).unwrap(),
            vec![Block::new(1, 2, lam)],
        )
        .map_err(|e| format!("case {case}: {e}"))?;
        let (v, _) = state.diagonalize_blocks().map_err(|e| format!("case {case}: {e}"))?;
        let before: f64 = probs.iter().sum();
        ensure(
            (v.total() - before).abs() <= 1e-12,
            format!("case {case}: total {} vs {before}", v.total()),
        )?;
        ensure(
            v.get(1) + v.get(2) == a + b,
            format!("case {case}: block mass {} vs {}", v.get(1) + v.get(2), a + b),
        )?;
        ensure(v.get(0) == probs[0], format!("case {case}: untouched level changed"))?;
    }
    Ok("1000 blocks conserve mass".into())
}

fn ac8() -> Outcome {
    let e1 = 2.48;
    let grid = default_gap_grid();
    let start = Instant::now();
    let rows = gap_sweep(e1, 0.7, 0.2, 0.02, &grid, beta1()).unwrap();
    let t = start.elapsed();
    for r in &rows {
        ensure(
            r.qy_any_hi >= r.qy_both_hi - 1e-12 && r.qy_any_lo >= r.qy_both_lo - 1e-12,
            format!("any < both at {}", r.beta_delta_e),
        )?;
    }
    for w in rows.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pairs = [
            (a.qy_any_hi, b.qy_any_hi),
            (a.qy_any_lo, b.qy_any_lo),
            (a.qy_both_hi, b.qy_both_hi),
            (a.qy_both_lo, b.qy_both_lo),
            (a.qy_single, b.qy_single),
        ];
        ensure(
            pairs.iter().all(|(x, y)| y <= &(x + 1e-12)),
            format!("a yield rises between {} and {}", a.beta_delta_e, b.beta_delta_e),
        )?;
    }
    // Thermal floor: Gibbs mass of the trans levels, which itself goes to 0.
    let floor = |gap: f64| {
        let params = PhotoswitchParams::new(e1, gap, 0.7, 0.2).unwrap();
        let (spectrum, _, _) = two_molecule_setup(&params, beta1()).unwrap();
        gibbs_state(&spectrum, beta1()).mass(YieldDefinition::Any.subset())
    };
    let tail: Vec<_> = rows.iter().filter(|r| r.beta_delta_e >= 2.0 * e1 - 1e-9).collect();
    ensure(tail.len() >= 2, "grid does not extend past 2 E1")?;
    let excess: Vec<f64> = tail.iter().map(|r| r.qy_any_hi - floor(r.beta_delta_e)).collect();
    ensure(excess.iter().all(|&e| e >= -1e-12), "qy_any below its thermal floor")?;
    ensure(
        excess.windows(2).all(|w| w[1] < w[0]),
        "qy_any does not approach its thermal floor past 2 E1",
    )?;
    let (first, last) = (tail[0], tail[tail.len() - 1]);
    let decay = (-(last.beta_delta_e - first.beta_delta_e)).exp();
    ensure(
        last.qy_any_hi <= first.qy_any_hi * decay * (1.0 + 1e-9),
        format!(
            "qy_any decays slower than exp: {} -> {}",
            first.qy_any_hi, last.qy_any_hi
        ),
    )?;
    let above: Vec<f64> = rows
        .iter()
        .filter(|r| r.qy_any_hi >= r.qy_single)
        .map(|r| r.beta_delta_e)
        .collect();
    ensure(!above.is_empty(), "high-coherence qy_any never reaches qy_single")?;
    ensure(t < Duration::from_secs(5), format!("took {t:?}"))?;
    Ok(format!(
        "{} rows; qy_any_hi >= qy_single on [{}, {}]; {t:.2?}",
        rows.len(),
        above[0],
        above[above.len() - 1]
    ))
}

fn ac9() -> Outcome {
    let map = advantage_map(2.48, &default_p_grid(), &default_gap_grid(), beta1()).unwrap();
    let points = ridge_extract(&map).unwrap();
    let fit = fit_ridge(&points).unwrap();
    ensure(
        (0.01..=0.05).contains(&fit.p0),
        format!("map ridge p0 = {} outside [0.01, 0.05]", fit.p0),
    )?;
    let synthetic: Vec<RidgePoint> = (1..=20)
        .map(|k| {
            let g = k as f64 * 0.2;
            RidgePoint {
                beta_delta_e: g,
                p: 0.025 * g.exp_m1(),
            }
        })
        .collect();
    let exact = fit_ridge(&synthetic).unwrap();
    within(exact.p0, 0.025, 1e-9, "synthetic p0")?;
    Ok(format!(
        "map p0 = {:.4} over {} ridge points; synthetic p0 = {}",
        fit.p0,
        points.len(),
        exact.p0
    ))
}

fn ac10() -> Outcome {
    let spectrum = single_molecule_model(2.48, 1.39).unwrap();
    let initial = single_molecule_initial(0.7).unwrap();
    let curve = build_curve(&initial, &spectrum, beta1()).unwrap();
    let want = [(0.0, 0.0), (0.0838, 0.7), (1.0838, 1.0), (1.3329, 1.0)];
    ensure(curve.knots().len() == want.len(), format!("{} knots", curve.knots().len()))?;
    for (k, (x, y)) in curve.knots().iter().zip(want) {
        within(k.x, x, 1e-3, "knot x")?;
        within(k.y, y, 1e-3, "knot y")?;
    }
    within(partition_function(&spectrum, beta1()), 1.3329, 1e-3, "Z")?;
    let r = qy_single(2.48, 1.39, 0.7, beta1()).unwrap();
    within(r.value, 0.7496, 0.005, "qy_single")?;
    Ok(format!("knots match; qy_single = {:.4}", r.value))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("low-coherence qy_both", ac1),
        ("high-coherence qy_both vs oracle", ac2),
        ("qy_any at both coherences", ac3),
        ("oracle equivalence", ac4),
        ("Gibbs minimality", ac5),
        ("coherence monotonicity", ac6),
        ("block diagonalization conserves mass", ac7),
        ("gap sweep shape", ac8),
        ("ridge fit", ac9),
        ("single-molecule Lorenz curve", ac10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
