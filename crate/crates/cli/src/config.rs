//! Run configuration and its flat `key = value` file format.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Every key has a default, so a file only needs the keys it changes.
//! Rendering writes every key, so `parse(render(c)) == c`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use packet_purity::{CollisionConfig, PhaseShiftModel, TabulatedPhase};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// No interaction, `theta = 0`.
    None,
    HardSphere,
    SquareWell,
    ZeroRange,
    BreitWigner,
    Tabulated,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        Self::None,
        Self::HardSphere,
        Self::SquareWell,
        Self::ZeroRange,
        Self::BreitWigner,
        Self::Tabulated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::HardSphere => "hard_sphere",
            Self::SquareWell => "square_well",
            Self::ZeroRange => "zero_range",
            Self::BreitWigner => "breit_wigner",
            Self::Tabulated => "tabulated",
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|m| m.as_str()).collect();
                format!("unknown model `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Text => "text",
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format `{s}` (expected text, csv or json)")),
        }
    }
}

/// Parameters of every model; only those of the selected model are used.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Range of the hard sphere and the square well.
    pub b: f64,
    /// Square-well depth.
    pub v0: f64,
    /// Zero-range scattering length.
    pub a: f64,
    /// Breit-Wigner resonance energy, width and background phase.
    pub er: f64,
    pub width: f64,
    pub theta_bg: f64,
    /// Two-column `k theta` file for the tabulated model.
    pub table: Option<PathBuf>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            b: 1.0,
            v0: 1.0,
            a: 1.0,
            er: 0.5,
            width: 0.1,
            theta_bg: 0.0,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sigma0: f64,
    pub k0: f64,
    pub r0: f64,
    pub t: f64,
    pub model: ModelKind,
    pub params: ModelParams,
    pub samples: u64,
    pub seed: u64,
    pub quad_n: usize,
    /// `None` picks the smallest `l_max` that resolves the shell.
    pub l_max: Option<usize>,
    /// `None` uses the command's natural format.
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma0: 0.01,
            k0: 1.0,
            r0: 10.0,
            t: 0.0,
            model: ModelKind::HardSphere,
            params: ModelParams::default(),
            samples: 1_000_000,
            seed: 42,
            quad_n: 200,
            l_max: None,
            format: None,
            out: None,
        }
    }
}

/// Keys accepted in config files and by `--set`, in rendering order.
pub const KEYS: [&str; 18] = [
    "sigma0", "k0", "r0", "t", "model", "b", "v0", "a", "er", "width", "theta_bg", "table",
    "samples", "seed", "quad_n", "l_max", "format", "out",
];

/// Keys that take a real value and can be swept.
pub const REAL_KEYS: [&str; 10] = ["sigma0", "k0", "r0", "t", "b", "v0", "a", "er", "width", "theta_bg"];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("`{key}`: cannot parse `{value}`"))
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl RunConfig {
    /// Assigns one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "sigma0" => self.sigma0 = parse_num(key, value)?,
            "k0" => self.k0 = parse_num(key, value)?,
            "r0" => self.r0 = parse_num(key, value)?,
            "t" => self.t = parse_num(key, value)?,
            "model" => self.model = value.parse()?,
            "b" => self.params.b = parse_num(key, value)?,
            "v0" => self.params.v0 = parse_num(key, value)?,
            "a" => self.params.a = parse_num(key, value)?,
            "er" => self.params.er = parse_num(key, value)?,
            "width" => self.params.width = parse_num(key, value)?,
            "theta_bg" => self.params.theta_bg = parse_num(key, value)?,
            "table" => self.params.table = optional_path(value),
            "samples" => self.samples = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "quad_n" => self.quad_n = parse_num(key, value)?,
            "l_max" => {
                self.l_max = match value {
                    "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "format" => {
                self.format = match value {
                    "auto" => None,
                    v => Some(v.parse()?),
                }
            }
            "out" => self.out = optional_path(value),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Textual value of one key, as written by [`RunConfig::render`].
    pub fn get(&self, key: &str) -> Option<String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        Some(match key {
            "sigma0" => self.sigma0.to_string(),
            "k0" => self.k0.to_string(),
            "r0" => self.r0.to_string(),
            "t" => self.t.to_string(),
            "model" => self.model.as_str().to_string(),
            "b" => self.params.b.to_string(),
            "v0" => self.params.v0.to_string(),
            "a" => self.params.a.to_string(),
            "er" => self.params.er.to_string(),
            "width" => self.params.width.to_string(),
            "theta_bg" => self.params.theta_bg.to_string(),
            "table" => path(&self.params.table),
            "samples" => self.samples.to_string(),
            "seed" => self.seed.to_string(),
            "quad_n" => self.quad_n.to_string(),
            "l_max" => self.l_max.map_or("auto".into(), |l| l.to_string()),
            "format" => self.format.map_or("auto", |f| f.as_str()).to_string(),
            "out" => path(&self.out),
            _ => return None,
        })
    }

    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    /// Applies the assignments in `text` to `self`.
    pub fn apply(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {}: expected `key = value`", idx + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("config line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = self.get(key).unwrap_or_default();
            if value.is_empty() {
                out.push_str(&format!("{key} =\n"));
            } else {
                out.push_str(&format!("{key} = {value}\n"));
            }
        }
        out
    }

    pub fn collision(&self) -> Result<CollisionConfig, CliError> {
        Ok(CollisionConfig::new(self.sigma0, self.k0, self.r0, self.t)?)
    }

    /// Builds the selected phase-shift model, loading the table if needed.
    pub fn phase_model(&self) -> Result<PhaseShiftModel, CliError> {
        let p = &self.params;
        Ok(match self.model {
            ModelKind::None => PhaseShiftModel::no_interaction(),
            ModelKind::HardSphere => PhaseShiftModel::hard_sphere(p.b)?,
            ModelKind::SquareWell => PhaseShiftModel::square_well(p.v0, p.b)?,
            ModelKind::ZeroRange => PhaseShiftModel::zero_range(p.a)?,
            ModelKind::BreitWigner => PhaseShiftModel::breit_wigner(p.er, p.width, p.theta_bg)?,
            ModelKind::Tabulated => {
                let path = p.table.as_ref().ok_or_else(|| {
                    CliError::Config("model `tabulated` needs `table = PATH`".into())
                })?;
                PhaseShiftModel::Tabulated(TabulatedPhase::load(path)?)
            }
        })
    }

    /// Checks the numeric options that the library does not validate.
    pub fn validate_options(&self) -> Result<(), CliError> {
        if self.quad_n < 8 {
            return Err(CliError::Config(format!("quad_n must be >= 8, got {}", self.quad_n)));
        }
        if let Some(l) = self.l_max {
            if l < 8 {
                return Err(CliError::Config(format!("l_max must be >= 8, got {l}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_render_and_parse() {
        let c = RunConfig::default();
        let text = c.render();
        assert!(text.contains("model = hard_sphere\n"));
        assert!(text.contains("l_max = auto\n"));
        assert!(text.contains("out =\n"));
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = RunConfig::parse("# header\n\nsigma0 = 0.02 # narrower\n  model=square_well\n").unwrap();
        assert_eq!(c.sigma0, 0.02);
        assert_eq!(c.model, ModelKind::SquareWell);
    }

    #[test]
    fn errors_name_the_line() {
        let e = RunConfig::parse("k0 = 1\nsigma0 = abc\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = RunConfig::parse("bogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("unknown key"));
        assert!(RunConfig::parse("sigma0 0.1\n").is_err());
        assert!(RunConfig::parse("model = magic\n").is_err());
    }

    #[test]
    fn every_key_round_trips_through_get() {
        let c = RunConfig::default();
        for key in KEYS {
            let mut d = RunConfig::default();
            d.set(key, &c.get(key).unwrap()).unwrap();
            assert_eq!(c, d, "{key}");
        }
    }
}
