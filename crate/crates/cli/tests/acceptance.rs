//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use packet_purity::oracle::{
    auto_l_max, epsilon_sq_quadrature, mc_overlap_i2_i3, mc_shell_purity, mc_stream, overlap_i1,
    shell_purity, shell_sector_decompose, RadialGridSpec,
};
use packet_purity::{
    epsilon_sq, purity, purity_narrow, CollisionConfig, PhaseShiftModel, ScatteredWave,
};
use packet_purity_cli::commands::shell_purity_rows;
use packet_purity_cli::config::RunConfig;
use packet_purity_cli::validate::{expansion_slope, random_draws, SHELL_SIGMAS};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hard_sphere_cfg() -> (CollisionConfig, PhaseShiftModel) {
    (
        CollisionConfig::new(0.01, 1.0, 10.0, 0.0).unwrap(),
        PhaseShiftModel::hard_sphere(1.0).unwrap(),
    )
}

fn no_scattering() -> Outcome {
    let cfg = CollisionConfig::new(0.01, 1.0, 10.0, 0.0).unwrap();
    let model = PhaseShiftModel::no_interaction();
    let report = purity(&cfg, &model).map_err(|e| e.to_string())?;
    let quad = epsilon_sq_quadrature(&cfg, &model).map_err(|e| e.to_string())?;
    let analytic_gap = (1.0 - report.purity).abs();
    let quad_gap = (2.0 * quad).abs();
    ensure(
        report.epsilon_sq == 0.0 && analytic_gap < 1e-14 && quad_gap < 1e-12,
        format!("|1-P| analytic {analytic_gap:e}, quadrature {quad_gap:e}"),
    )
}

fn exact_taylor_norm() -> Outcome {
    let (cfg, model) = hard_sphere_cfg();
    let a = epsilon_sq(&cfg, &model).unwrap();
    let q = epsilon_sq_quadrature(&cfg, &model).unwrap();
    let rel = ((a - q) / q).abs();
    ensure(rel <= 1e-6, format!("eps^2 {a:e} vs quadrature {q:e}, rel {rel:e}"))
}

fn resonant_norm() -> Outcome {
    // depth tuned so that theta(k0) = -3 pi / 2, where sin^2 theta = 1
    let model = PhaseShiftModel::square_well(13.154867385883, 5.0).unwrap();
    let cfg = CollisionConfig::new(0.01, 1.0, 10.0, 0.0).unwrap();
    let sin2 = model.theta(1.0).unwrap().sin().powi(2);
    let a = epsilon_sq(&cfg, &model).unwrap();
    let q = epsilon_sq_quadrature(&cfg, &model).unwrap();
    let narrow = purity_narrow(&cfg, &model).unwrap().epsilon_sq;
    let rel16 = ((a - q) / q).abs();
    let rel18 = ((narrow - q) / q).abs();
    ensure(
        (sin2 - 1.0).abs() < 1e-9 && rel16 <= 1e-2 && rel18 > rel16,
        format!("sin^2 theta {sin2:.12}, closed form rel {rel16:e}, narrow limit rel {rel18:e}"),
    )
}

fn overlap_i1_value() -> Outcome {
    let (cfg, model) = hard_sphere_cfg();
    let i1 = overlap_i1(&cfg, &model).unwrap();
    let target = 0.5 * 0.01f64.powi(2);
    let rel = ((i1 - target) / target).abs();
    ensure(rel <= 0.05, format!("I1 {i1:e} vs {target:e}, rel {rel:e}"))
}

fn overlap_i2_i3_values() -> Outcome {
    let (cfg, model) = hard_sphere_cfg();
    let run = RunConfig::default();
    let (i2, i3) = mc_overlap_i2_i3(&cfg, &model, run.samples, run.seed).unwrap();
    let target = 2.0 * 0.01f64.powi(2) / 3.0;
    let (z2, z3) = (i2.z_score(target), i3.z_score(target));
    let (r2, r3) = (i2.relative_stderr(), i3.relative_stderr());
    ensure(
        z2.abs() <= 3.0 && z3.abs() <= 3.0 && r2 <= 0.05 && r3 <= 0.05,
        format!(
            "{} samples: I2 {:e} (z {z2:.2}, rel err {r2:.1e}), I3 {:e} (z {z3:.2}, rel err {r3:.1e})",
            run.samples, i2.mean, i3.mean
        ),
    )
}

fn expansion_validity() -> Outcome {
    let mut worst_slope = f64::INFINITY;
    let mut worst_residual = 0.0f64;
    for seed in 0..5 {
        let (slope, residual) = expansion_slope(&mut mc_stream(seed, 1 << 40)).unwrap();
        worst_slope = worst_slope.min(slope);
        worst_residual = worst_residual.max(residual);
    }
    ensure(
        worst_slope >= 2.7 && worst_residual <= 1e-5,
        format!("5 random states: min slope {worst_slope:.3}, max residual at eps=1e-2 {worst_residual:e}"),
    )
}

fn bracket_bound() -> Outcome {
    let d = random_draws(&mut mc_stream(7, 1 << 41), 1000).unwrap();
    ensure(d.bound_violations == 0, format!("1000 draws, {} violations", d.bound_violations))
}

fn unitarity() -> Outcome {
    let d = random_draws(&mut mc_stream(8, 1 << 41), 1000).unwrap();
    ensure(
        d.modulus_violations == 0 && d.unitarity_error <= 1e-12,
        format!(
            "1000 draws, |f0| > 1/k {} times, max |Im f0 - k|f0|^2| k = {:e}",
            d.modulus_violations, d.unitarity_error
        ),
    )
}

fn shell_scaling() -> Outcome {
    let run = RunConfig::default();
    let sigmas: Vec<f64> = SHELL_SIGMAS.iter().map(|f| f * run.k0).collect();
    let (_, slope) = shell_purity_rows(&run, &sigmas, &RadialGridSpec::default()).map_err(|e| e.to_string())?;

    let model = run.phase_model().unwrap();
    let coarse = run.collision().unwrap().with_sigma0(0.25).unwrap();
    let d = shell_sector_decompose(&coarse, &model, auto_l_max(&coarse), &RadialGridSpec::default()).unwrap();
    let sector = shell_purity(&d);
    let mc = mc_shell_purity(&coarse, &model, run.samples, run.seed).unwrap();
    let z = mc.z_score(sector);
    ensure(
        (slope - 2.0).abs() <= 0.15 && z.abs() <= 3.0,
        format!("slope {slope:.4}; sigma0 = 0.25: sectors {sector:.6e}, 12-d MC {:.6e} (z {z:.2})", mc.mean),
    )
}

fn time_invariance() -> Outcome {
    let (cfg, model) = hard_sphere_cfg();
    let later = cfg.with_t(1e3).unwrap();
    let same = purity(&cfg, &model).unwrap() == purity(&later, &model).unwrap()
        && purity_narrow(&cfg, &model).unwrap() == purity_narrow(&later, &model).unwrap();
    let wave = ScatteredWave::new(cfg, model).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let k = 0.95 + 0.0025 * i as f64;
        let a0 = wave.amplitude(k, 0.0).unwrap().norm();
        let a1 = wave.amplitude(k, 1e3).unwrap().norm();
        worst = worst.max(((a1 - a0) / a0).abs());
    }
    ensure(
        same && worst <= 1e-12,
        format!("reports identical: {same}, max relative change of |amplitude| {worst:e}"),
    )
}

fn spreading_suppression() -> Outcome {
    let (cfg, model) = hard_sphere_cfg();
    let r0s = [0.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0, 12800.0];
    let norms: Vec<f64> = r0s
        .iter()
        .map(|&r| epsilon_sq(&cfg.with_r0(r).unwrap(), &model).unwrap())
        .collect();
    let decreasing = norms.windows(2).all(|w| w[1] < w[0]);
    ensure(
        decreasing,
        format!("eps^2 from {:e} at r0 = 0 to {:e} at r0 = 12800", norms[0], norms[9]),
    )
}

fn validate_report(threads: usize) -> (Vec<u8>, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_packet-purity"))
        .args(["validate", "--suite", "quick", "--seed", "42"])
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("spawn packet-purity");
    assert!(out.status.code().is_some());
    (out.stdout, start.elapsed())
}

fn determinism() -> Outcome {
    let (first, t1) = validate_report(1);
    let (second, t2) = validate_report(1);
    let (threaded, t4) = validate_report(4);
    let slowest = t2.max(t4);
    ensure(
        !first.is_empty() && first == second && first == threaded && slowest < 2 * t1,
        format!(
            "{} bytes; repeat identical: {}, 4 threads identical: {}; runs {:.1}s, {:.1}s, {:.1}s",
            first.len(),
            first == second,
            first == threaded,
            t1.as_secs_f64(),
            t2.as_secs_f64(),
            t4.as_secs_f64()
        ),
    )
}

fn main() -> std::process::ExitCode {
    let criteria = [
        Criterion { id: 1, name: "no-scattering identity", budget: Duration::from_secs(1), run: no_scattering },
        Criterion { id: 2, name: "closed-form norm, hard sphere", budget: Duration::from_secs(1), run: exact_taylor_norm },
        Criterion { id: 3, name: "closed-form norm, resonant square well", budget: Duration::from_secs(10), run: resonant_norm },
        Criterion { id: 4, name: "I1 flat limit", budget: Duration::from_secs(10), run: overlap_i1_value },
        Criterion { id: 5, name: "I2, I3 flat limit", budget: Duration::from_secs(300), run: overlap_i2_i3_values },
        Criterion { id: 6, name: "expansion validity", budget: Duration::from_secs(10), run: expansion_validity },
        Criterion { id: 7, name: "bracket bound", budget: Duration::from_secs(10), run: bracket_bound },
        Criterion { id: 8, name: "unitarity", budget: Duration::from_secs(1), run: unitarity },
        Criterion { id: 9, name: "shell purity scaling", budget: Duration::from_secs(600), run: shell_scaling },
        Criterion { id: 10, name: "time invariance", budget: Duration::from_secs(1), run: time_invariance },
        Criterion { id: 11, name: "spreading suppression", budget: Duration::from_secs(1), run: spreading_suppression },
        Criterion { id: 12, name: "determinism", budget: Duration::from_secs(600), run: determinism },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= c.budget, d),
            Err(d) => (false, d),
        };
        println!(
            "{} criterion {:2} {}: {} [{:.2}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if !ok {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
