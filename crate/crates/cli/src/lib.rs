//! Command-line front end for `packet-purity`.
//!
//! [`run`] parses arguments and produces the report text and exit status
//! without touching stdout, so it can be driven from tests.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod render;
pub mod validate;

use config::{ModelKind, OutputFormat, RunConfig};
pub use error::{CliError, EXIT_OK, EXIT_REGIME, EXIT_USAGE, EXIT_VALIDATION};
use validate::Suite;

const COLUMNS_HELP: &str = "\
Columns of `purity` and `sweep` (sweep rows start with sweep_axis, sweep_value):
  model                         phase-shift model
  sigma0, k0, r0, t             packet width, mean momentum, separation, time
  gamma_sq                      1 + (sigma0^2 r0 / 2 k0)^2
  sigma_c                       sigma0 / sqrt(gamma_sq), width at the collision
  t_col                         r0 / k0
  theta_k0                      s-wave phase shift at k0
  theta_prime                   d theta / dk at k0
  theta_double_prime            d^2 theta / dk^2 at k0
  cross_section_k0              4 pi sin^2(theta) / k0^2
  key_parameter                 sigma_c^2 times cross_section_k0
  epsilon_sq                    norm of the scattered wave
  purity, one_minus_purity      1 - 2 epsilon_sq
  purity_narrow                 narrow-packet limit 1 - sigma_c^2 S0 / pi
  one_minus_purity_narrow
  sigma0_over_k0, sigma0_theta_prime, sigma0_sq_theta_double_prime
                                expansion diagnostics, all must be small
  spreading_ratio               sigma0^2 r0 / 2 k0

Columns of `shell-purity`:
  sigma0, sigma0_over_k0, l_max, shell_purity, sector_norm, roundtrip_residual
  followed by a `slope` line: the log-log slope of shell_purity in sigma0.

Columns of `validate`:
  check, measured, target, tolerance, rule, status

Exit status: 0 ok, 1 a validation check failed, 2 usage or config error,
3 the configuration leaves the perturbative regime.";

#[derive(Debug, Parser)]
#[command(
    name = "packet-purity",
    version,
    about = "Purity loss of two gaussian wave packets after low-energy s-wave scattering",
    after_help = COLUMNS_HELP
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// `key = value` config file, applied on top of the defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// none, hard_sphere, square_well, zero_range, breit_wigner or tabulated
    #[arg(long, global = true)]
    model: Option<ModelKind>,

    /// Override one config key; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Monte Carlo samples
    #[arg(long, global = true)]
    samples: Option<u64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Quadrature nodes per dimension
    #[arg(long = "quad-n", global = true)]
    quad_n: Option<usize>,

    /// Highest partial wave of the shell decomposition (default: automatic)
    #[arg(long = "l-max", global = true)]
    l_max: Option<usize>,

    /// text, csv or json
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Write the report to PATH instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Purity after one collision
    Purity,
    /// Purity along one parameter axis (CSV by default)
    Sweep {
        /// Config key to vary, e.g. sigma0, r0, k0, b
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Compare the closed forms with the numerical oracles
    Validate {
        #[arg(long, default_value = "quick")]
        suite: Suite,
    },
    /// Shell purity from the partial-wave decomposition of the exact state
    ShellPurity {
        /// At least three comma-separated widths
        #[arg(long = "sigma0-list")]
        sigma0_list: String,
    },
}

/// Report text, where it goes, and the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub out: Option<PathBuf>,
    pub exit_code: u8,
}

impl Output {
    /// Writes the body to `out` if set; otherwise returns it for stdout.
    pub fn deliver(self) -> Result<Option<String>, CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, &self.body)
                .map(|_| None)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => Ok(Some(self.body)),
        }
    }
}

fn resolve(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut run = RunConfig::default();
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        run.apply(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), strip_prefix(&e))))?;
    }
    if let Some(m) = g.model {
        run.model = m;
    }
    for item in &g.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{item}`")))?;
        run.set(key.trim(), value).map_err(CliError::Usage)?;
    }
    if let Some(n) = g.samples {
        run.samples = n;
    }
    if let Some(s) = g.seed {
        run.seed = s;
    }
    if let Some(n) = g.quad_n {
        run.quad_n = n;
    }
    if let Some(l) = g.l_max {
        run.l_max = Some(l);
    }
    if let Some(f) = g.format {
        run.format = Some(f);
    }
    if let Some(p) = &g.out {
        run.out = Some(p.clone());
    }
    run.validate_options()?;
    Ok(run)
}

fn strip_prefix(e: &CliError) -> String {
    match e {
        CliError::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<Output, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            return Ok(Output {
                body: e.to_string(),
                out: None,
                exit_code: EXIT_OK,
            })
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg).trim_end().to_string();
            return Err(CliError::Usage(msg));
        }
    };
    let run = resolve(&cli.global)?;
    let mut exit_code = EXIT_OK;
    let body = match &cli.command {
        Command::Purity => commands::cmd_purity(&run)?,
        Command::Sweep { axis, values } => {
            commands::cmd_sweep(&run, axis, &commands::parse_list(values)?)?
        }
        Command::ShellPurity { sigma0_list } => {
            commands::cmd_shell_purity(&run, &commands::parse_list(sigma0_list)?)?
        }
        Command::Validate { suite } => {
            let checks = validate::run_suite(&run, *suite)?;
            if checks.iter().any(|c| !c.passed()) {
                exit_code = EXIT_VALIDATION;
            }
            validate::render_checks(&checks, run.format.unwrap_or(OutputFormat::Text))
        }
    };
    Ok(Output {
        body,
        out: run.out.clone(),
        exit_code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(extra: &[&str]) -> Vec<String> {
        std::iter::once("packet-purity").chain(extra.iter().copied()).map(String::from).collect()
    }

    #[test]
    fn flags_override_set_and_set_overrides_model() {
        let cli = Cli::try_parse_from(args(&[
            "purity", "--model", "square_well", "--set", "model=zero_range", "--set", "seed=3", "--seed", "9",
        ]))
        .unwrap();
        let run = resolve(&cli.global).unwrap();
        assert_eq!(run.model, ModelKind::ZeroRange);
        assert_eq!(run.seed, 9);
    }

    #[test]
    fn help_is_not_an_error() {
        let out = run(args(&["--help"])).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.body.contains("one_minus_purity_narrow"));
    }

    #[test]
    fn bad_set_is_usage_error() {
        let e = run(args(&["purity", "--set", "sigma0"])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        let e = run(args(&["purity", "--set", "nope=1"])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }
}
