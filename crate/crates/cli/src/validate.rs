//! Oracle comparisons behind `validate`.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use packet_purity::oracle::{
    auto_l_max, epsilon_sq_quadrature_with, expansion_check, mc_overlap_i2_i3, mc_shell_norm,
    mc_shell_purity, mc_stream, overlap_i1_with, random_rotation, shell_purity,
    shell_sector_decompose, shell_sector_decompose_in_frame, McStream, RadialGridSpec,
};
use packet_purity::{
    epsilon_sq, purity, purity_narrow, CollisionConfig, Complex64, PhaseShiftModel,
};
use rand::Rng;

use crate::commands::{log_log_slope, shell_purity_rows};
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::render::{self, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(format!("unknown suite `{s}` (expected quick or full)")),
        }
    }
}

/// How `measured` is compared with `target` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `|measured - target| <= tolerance * |target|`
    Relative,
    /// `|measured - target| <= tolerance`
    Absolute,
    /// `measured >= target`
    AtLeast,
    /// `measured <= target`
    AtMost,
}

impl Rule {
    fn as_str(&self) -> &'static str {
        match self {
            Self::Relative => "relative",
            Self::Absolute => "absolute",
            Self::AtLeast => "at_least",
            Self::AtMost => "at_most",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub rule: Rule,
}

impl Check {
    fn new(name: &'static str, measured: f64, target: f64, tolerance: f64, rule: Rule) -> Self {
        Self {
            name,
            measured,
            target,
            tolerance,
            rule,
        }
    }

    pub fn passed(&self) -> bool {
        let (m, t, tol) = (self.measured, self.target, self.tolerance);
        if !m.is_finite() {
            return false;
        }
        match self.rule {
            Rule::Relative => (m - t).abs() <= tol * t.abs(),
            Rule::Absolute => (m - t).abs() <= tol,
            Rule::AtLeast => m >= t,
            Rule::AtMost => m <= t,
        }
    }

    fn record(&self) -> Record {
        vec![
            ("check", self.name.into()),
            ("measured", self.measured.into()),
            ("target", self.target.into()),
            ("tolerance", self.tolerance.into()),
            ("rule", self.rule.as_str().into()),
            ("status", if self.passed() { "PASS" } else { "FAIL" }.into()),
        ]
    }
}

pub const CHECK_COLUMNS: [&str; 6] = ["check", "measured", "target", "tolerance", "rule", "status"];

/// Sigma0 values, in units of `k0`, of the shell-purity scaling check.
pub const SHELL_SIGMAS: [f64; 3] = [0.02, 0.04, 0.08];

/// Runs the suite and returns the checks in a fixed order.
pub fn run_suite(run: &RunConfig, suite: Suite) -> Result<Vec<Check>, CliError> {
    let cfg = run.collision()?;
    let model = run.phase_model()?;
    let (s, k0) = (cfg.sigma0(), cfg.k0());
    let mut checks = Vec::new();

    let analytic = epsilon_sq(&cfg, &model)?;
    let quad = epsilon_sq_quadrature_with(&cfg, &model, run.quad_n)?;
    // the expansion is exact for a linear phase
    let exact_taylor = model.theta_derivs(k0)?.second == 0.0;
    checks.push(Check::new(
        "epsilon_sq_vs_quadrature",
        analytic,
        quad,
        if exact_taylor { 1e-6 } else { 1e-2 },
        Rule::Relative,
    ));

    let i1 = overlap_i1_with(&cfg, &model, run.quad_n, run.quad_n)?;
    checks.push(Check::new("i1_flat_limit", i1, s * s / (2.0 * k0 * k0), 0.05, Rule::Relative));

    let (i2, i3) = mc_overlap_i2_i3(&cfg, &model, run.samples, run.seed)?;
    let flat = 2.0 * s * s / (3.0 * k0 * k0);
    checks.push(Check::new("i2_flat_limit_z", i2.z_score(flat), 0.0, 3.0, Rule::Absolute));
    checks.push(Check::new("i2_relative_stderr", i2.relative_stderr(), 0.05, 0.0, Rule::AtMost));
    checks.push(Check::new("i3_flat_limit_z", i3.z_score(flat), 0.0, 3.0, Rule::Absolute));
    checks.push(Check::new("i3_relative_stderr", i3.relative_stderr(), 0.05, 0.0, Rule::AtMost));
    let combined = (i2.stderr.powi(2) + i3.stderr.powi(2)).sqrt();
    checks.push(Check::new(
        "i2_i3_symmetry_z",
        (i2.mean - i3.mean) / combined,
        0.0,
        3.0,
        Rule::Absolute,
    ));

    let (slope, residual) = expansion_slope(&mut mc_stream(run.seed, 1 << 40))?;
    checks.push(Check::new("expansion_slope", slope, 2.7, 0.0, Rule::AtLeast));
    checks.push(Check::new("expansion_residual_eps_1e-2", residual, 1e-5, 0.0, Rule::AtMost));

    let grid = match suite {
        Suite::Quick => RadialGridSpec {
            n_radial: 100,
            n_angular: 100,
            ..RadialGridSpec::default()
        },
        Suite::Full => RadialGridSpec {
            n_radial: run.quad_n,
            n_angular: run.quad_n,
            ..RadialGridSpec::default()
        },
    };
    let sigmas: Vec<f64> = SHELL_SIGMAS.iter().map(|f| f * k0).collect();
    let (_, shell_slope) = shell_purity_rows(run, &sigmas, &grid)?;
    checks.push(Check::new("shell_purity_slope", shell_slope, 2.0, 0.15, Rule::Absolute));

    if suite == Suite::Full {
        full_checks(run, &cfg, &model, &grid, &mut checks)?;
    }
    Ok(checks)
}

fn full_checks(
    run: &RunConfig,
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    grid: &RadialGridSpec,
    checks: &mut Vec<Check>,
) -> Result<(), CliError> {
    let k0 = cfg.k0();
    let rel_change = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };

    let e200 = epsilon_sq_quadrature_with(cfg, model, 200)?;
    let e400 = epsilon_sq_quadrature_with(cfg, model, 400)?;
    checks.push(Check::new("epsilon_sq_self_convergence", rel_change(e200, e400), 1e-10, 0.0, Rule::AtMost));
    let i200 = overlap_i1_with(cfg, model, 200, 200)?;
    let i400 = overlap_i1_with(cfg, model, 400, 400)?;
    checks.push(Check::new("i1_self_convergence", rel_change(i200, i400), 1e-8, 0.0, Rule::AtMost));
    let later = cfg.with_t(1e3)?;
    let i_later = overlap_i1_with(&later, model, run.quad_n, run.quad_n)?;
    let i_now = overlap_i1_with(cfg, model, run.quad_n, run.quad_n)?;
    checks.push(Check::new("i1_time_invariance", rel_change(i_later, i_now), 1e-12, 0.0, Rule::AtMost));
    let p_now = purity(cfg, model)?.purity;
    let p_later = purity(&later, model)?.purity;
    checks.push(Check::new("purity_time_invariance", (p_now - p_later).abs(), 0.0, 0.0, Rule::AtMost));

    let mut rng = mc_stream(run.seed, 1 << 41);
    let draws = random_draws(&mut rng, 1000)?;
    checks.push(Check::new("bracket_bound_violations", draws.bound_violations as f64, 0.0, 0.0, Rule::AtMost));
    checks.push(Check::new("amplitude_modulus_violations", draws.modulus_violations as f64, 0.0, 0.0, Rule::AtMost));
    checks.push(Check::new("unitarity_max_error", draws.unitarity_error, 1e-12, 0.0, Rule::AtMost));

    let mut gaps = Vec::new();
    for f in [0.04, 0.02, 0.01, 0.005] {
        let c = cfg.with_sigma0(f * k0)?;
        let full = purity(&c, model)?;
        let narrow = purity_narrow(&c, model)?;
        gaps.push((full.purity - narrow.purity).abs() / full.one_minus_purity);
    }
    let non_monotone = gaps.windows(2).filter(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less)).count();
    checks.push(Check::new("narrow_limit_non_monotone_steps", non_monotone as f64, 0.0, 0.0, Rule::AtMost));

    let mut norms = Vec::new();
    for i in 0..10 {
        norms.push(epsilon_sq(&cfg.with_r0(cfg.r0() + 50.0 * i as f64)?, model)?);
    }
    let rising = norms.windows(2).filter(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less)).count();
    checks.push(Check::new("spreading_non_decreasing_steps", rising as f64, 0.0, 0.0, Rule::AtMost));

    let mid = cfg.with_sigma0(0.05 * k0)?;
    let d = shell_sector_decompose(&mid, model, auto_l_max(&mid), grid)?;
    let norm = mc_shell_norm(&mid, model, run.samples, run.seed)?;
    checks.push(Check::new("shell_norm_mc_z", norm.z_score(d.raw_norm()), 0.0, 3.0, Rule::Absolute));
    checks.push(Check::new("shell_roundtrip_residual", d.roundtrip_residual(), 1e-10, 0.0, Rule::AtMost));

    let wide = cfg.with_sigma0(0.08 * k0)?;
    let l = auto_l_max(&wide);
    let base = shell_purity(&shell_sector_decompose(&wide, model, l, grid)?);
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let frame = random_rotation(&mut rng);
        let p = shell_purity(&shell_sector_decompose_in_frame(&wide, model, l, grid, &frame)?);
        worst = worst.max((p - base).abs());
    }
    checks.push(Check::new("shell_rotation_invariance", worst, 1e-8, 0.0, Rule::AtMost));

    let coarse = cfg.with_sigma0(0.25 * k0)?;
    let d = shell_sector_decompose(&coarse, model, auto_l_max(&coarse), grid)?;
    let mc = mc_shell_purity(&coarse, model, run.samples, run.seed)?;
    checks.push(Check::new("shell_coarse_mc_z", mc.z_score(shell_purity(&d)), 0.0, 3.0, Rule::Absolute));
    Ok(())
}

fn unit_vector(rng: &mut McStream, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Slope of the expansion residual over `eps` in {1e-1, 1e-2, 1e-3} on a
/// random 32x32 state, and the residual at `eps = 1e-2`.
pub fn expansion_slope(rng: &mut McStream) -> Result<(f64, f64), CliError> {
    let phi1 = unit_vector(rng, 32);
    let phi2 = unit_vector(rng, 32);
    let s = DMatrix::from_fn(32, 32, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let norm = s.norm();
    let s = s / Complex64::new(norm, 0.0);
    let eps = [1e-1, 1e-2, 1e-3];
    let mut residuals = Vec::new();
    for e in eps {
        residuals.push(expansion_check(&phi1, &phi2, &s, e)?.residual);
    }
    Ok((log_log_slope(&eps, &residuals), residuals[1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawSummary {
    /// Draws with `|epsilon|^2` outside `[0, 2 sigma0^2 / (k0^2 gamma^2)]`.
    pub bound_violations: usize,
    /// Draws with `|f0(k)| > 1/k`.
    pub modulus_violations: usize,
    /// Largest `|Im f0 - k |f0|^2| k`.
    pub unitarity_error: f64,
}

/// Random model, configuration and momentum draws.
pub fn random_draws(rng: &mut McStream, draws: usize) -> Result<DrawSummary, CliError> {
    let mut out = DrawSummary {
        bound_violations: 0,
        modulus_violations: 0,
        unitarity_error: 0.0,
    };
    for _ in 0..draws {
        let model = random_model(rng)?;
        let s = rng.random_range(1e-3..0.3);
        let k0 = rng.random_range(0.3..3.0);
        let r0 = rng.random_range(0.0..200.0);
        let cfg = CollisionConfig::new(s, k0, r0, 0.0)?;
        let e = epsilon_sq(&cfg, &model)?;
        let bound = 2.0 * s * s / (k0 * k0 * cfg.derived_scales().gamma_sq);
        if !(e >= 0.0 && e <= bound * (1.0 + 1e-12)) {
            out.bound_violations += 1;
        }
        let k = rng.random_range(1e-3..10.0);
        let f = model.f0(k)?;
        if f.norm() > (1.0 + 1e-12) / k {
            out.modulus_violations += 1;
        }
        out.unitarity_error = out.unitarity_error.max((f.im - k * f.norm_sqr()).abs() * k);
    }
    Ok(out)
}

pub fn random_model(rng: &mut McStream) -> Result<PhaseShiftModel, CliError> {
    Ok(match rng.random_range(0..4) {
        0 => PhaseShiftModel::hard_sphere(rng.random_range(0.01..5.0))?,
        1 => PhaseShiftModel::square_well(rng.random_range(0.0..50.0), rng.random_range(0.05..5.0))?,
        2 => PhaseShiftModel::zero_range(rng.random_range(-20.0..20.0))?,
        _ => PhaseShiftModel::breit_wigner(
            rng.random_range(0.0..5.0),
            rng.random_range(1e-2..2.0),
            rng.random_range(-PI..PI),
        )?,
    })
}

pub fn render_checks(checks: &[Check], format: OutputFormat) -> String {
    let rows: Vec<Record> = checks.iter().map(Check::record).collect();
    let mut out = render::table(&rows, &CHECK_COLUMNS, format);
    if format == OutputFormat::Text {
        let failed = checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!("\n{} checks, {} failed\n", checks.len(), failed));
    }
    out
}
