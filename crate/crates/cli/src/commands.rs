//! `purity`, `sweep` and `shell-purity`.

use packet_purity::oracle::{auto_l_max, shell_purity, shell_sector_decompose, RadialGridSpec};
use packet_purity::{purity, purity_narrow, CollisionConfig, PhaseShiftModel};

use crate::config::{OutputFormat, RunConfig, REAL_KEYS};
use crate::error::CliError;
use crate::render::{self, Record, Value};

/// Columns of the `purity` report and of every `sweep` row, in order.
pub const PURITY_COLUMNS: [&str; 22] = [
    "model",
    "sigma0",
    "k0",
    "r0",
    "t",
    "gamma_sq",
    "sigma_c",
    "t_col",
    "theta_k0",
    "theta_prime",
    "theta_double_prime",
    "cross_section_k0",
    "key_parameter",
    "epsilon_sq",
    "purity",
    "one_minus_purity",
    "purity_narrow",
    "one_minus_purity_narrow",
    "sigma0_over_k0",
    "sigma0_theta_prime",
    "sigma0_sq_theta_double_prime",
    "spreading_ratio",
];

/// Leading columns of a `sweep` row.
pub const SWEEP_PREFIX: [&str; 2] = ["sweep_axis", "sweep_value"];

/// Columns of a `shell-purity` row.
pub const SHELL_COLUMNS: [&str; 6] = [
    "sigma0",
    "sigma0_over_k0",
    "l_max",
    "shell_purity",
    "sector_norm",
    "roundtrip_residual",
];

/// Purity by the expanded norm and by the narrow-packet limit, with the
/// quantities they are built from.
pub fn purity_record(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<Record, CliError> {
    let full = purity(cfg, model)?;
    let narrow = purity_narrow(cfg, model)?;
    let scales = cfg.derived_scales();
    let d = model.theta_derivs(cfg.k0())?;
    let s0 = model.cross_section(cfg.k0())?;
    let diag = full.diagnostics;
    let values: [Value; 22] = [
        model.name().into(),
        cfg.sigma0().into(),
        cfg.k0().into(),
        cfg.r0().into(),
        cfg.t().into(),
        scales.gamma_sq.into(),
        scales.sigma_c.into(),
        scales.t_col.into(),
        d.theta.into(),
        d.first.into(),
        d.second.into(),
        s0.into(),
        (scales.sigma_c * scales.sigma_c * s0).into(),
        full.epsilon_sq.into(),
        full.purity.into(),
        full.one_minus_purity.into(),
        narrow.purity.into(),
        narrow.one_minus_purity.into(),
        diag.sigma0_over_k0.into(),
        diag.sigma0_theta_prime.into(),
        diag.sigma0_sq_theta_double_prime.into(),
        cfg.spreading_ratio().into(),
    ];
    Ok(PURITY_COLUMNS.into_iter().zip(values).collect())
}

fn model_display_name(run: &RunConfig, model: &PhaseShiftModel) -> &'static str {
    // `none` is realized by a zero scattering length
    match run.model {
        crate::config::ModelKind::None => "none",
        _ => model.name(),
    }
}

pub fn cmd_purity(run: &RunConfig) -> Result<String, CliError> {
    let cfg = run.collision()?;
    let model = run.phase_model()?;
    let mut rec = purity_record(&cfg, &model)?;
    rec[0].1 = model_display_name(run, &model).into();
    Ok(render::record(&rec, run.format.unwrap_or(OutputFormat::Text)))
}

/// Parses a comma-separated list of reals; an empty string is an empty
/// list.
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("`{s}` is not a finite number")))
        })
        .collect()
}

pub fn cmd_sweep(run: &RunConfig, axis: &str, values: &[f64]) -> Result<String, CliError> {
    if !REAL_KEYS.contains(&axis) {
        return Err(CliError::Usage(format!(
            "unknown sweep axis `{axis}` (expected one of {})",
            REAL_KEYS.join(", ")
        )));
    }
    let mut columns: Vec<&'static str> = SWEEP_PREFIX.to_vec();
    columns.extend(PURITY_COLUMNS);
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let mut point = run.clone();
        point.set(axis, &v.to_string()).map_err(CliError::Usage)?;
        let cfg = point.collision()?;
        let model = point.phase_model()?;
        let mut rec: Record = vec![("sweep_axis", axis.to_string().into()), ("sweep_value", v.into())];
        let mut body = purity_record(&cfg, &model)?;
        body[0].1 = model_display_name(&point, &model).into();
        rec.extend(body);
        rows.push(rec);
    }
    Ok(render::table(&rows, &columns, run.format.unwrap_or(OutputFormat::Csv)))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Shell purities for each `sigma0` and their log-log slope.
pub fn shell_purity_rows(
    run: &RunConfig,
    sigma0s: &[f64],
    spec: &RadialGridSpec,
) -> Result<(Vec<Record>, f64), CliError> {
    let base = run.collision()?;
    let model = run.phase_model()?;
    let mut rows = Vec::with_capacity(sigma0s.len());
    let mut purities = Vec::with_capacity(sigma0s.len());
    for &s in sigma0s {
        let cfg = base.with_sigma0(s)?;
        let l_max = run.l_max.unwrap_or_else(|| auto_l_max(&cfg));
        let d = shell_sector_decompose(&cfg, &model, l_max, spec)?;
        let p = shell_purity(&d);
        purities.push(p);
        rows.push(vec![
            ("sigma0", s.into()),
            ("sigma0_over_k0", cfg.sigma0_over_k0().into()),
            ("l_max", l_max.into()),
            ("shell_purity", p.into()),
            ("sector_norm", d.raw_norm().into()),
            ("roundtrip_residual", d.roundtrip_residual().into()),
        ]);
    }
    Ok((rows, log_log_slope(sigma0s, &purities)))
}

pub fn cmd_shell_purity(run: &RunConfig, sigma0s: &[f64]) -> Result<String, CliError> {
    if sigma0s.len() < 3 {
        return Err(CliError::Usage(format!(
            "shell-purity needs at least 3 sigma0 values, got {}",
            sigma0s.len()
        )));
    }
    let spec = RadialGridSpec {
        n_radial: run.quad_n,
        n_angular: run.quad_n,
        ..RadialGridSpec::default()
    };
    let (rows, slope) = shell_purity_rows(run, sigma0s, &spec)?;
    let format = run.format.unwrap_or(OutputFormat::Csv);
    Ok(match format {
        OutputFormat::Json => {
            let objs: Vec<String> = rows.iter().map(render::json_object).collect();
            format!("{{\"rows\": [{}], \"slope\": {}}}\n", objs.join(", "), render::real(slope))
        }
        OutputFormat::Csv => render::table(&rows, &SHELL_COLUMNS, format) + &format!("slope,{}\n", render::real(slope)),
        OutputFormat::Text => render::table(&rows, &SHELL_COLUMNS, format) + &format!("\nslope  {}\n", render::real(slope)),
    })
}
