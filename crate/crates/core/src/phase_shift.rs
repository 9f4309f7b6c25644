//! s-wave phase shifts for a family of short-range interactions.
//!
//! All models use `mu = 1`, so the collision energy is `E = k^2 / 2`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseShiftModel {
    /// Impenetrable sphere of radius `range`: `theta = -k b`.
    HardSphere { range: f64 },
    /// Attractive well `V = -depth` for `r < range`.
    SquareWell { depth: f64, range: f64 },
    /// Zero-range interaction with scattering length `a`: `theta = -atan(k a)`.
    ZeroRange { scattering_length: f64 },
    /// Isolated resonance on top of a constant background phase.
    BreitWigner {
        resonance_energy: f64,
        width: f64,
        background: f64,
    },
    /// Cubic-spline interpolation of a measured or precomputed table.
    Tabulated(TabulatedPhase),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDerivs {
    pub theta: f64,
    pub first: f64,
    pub second: f64,
}

impl PhaseShiftModel {
    pub fn hard_sphere(range: f64) -> Result<Self> {
        let m = Self::HardSphere { range };
        m.validate()?;
        Ok(m)
    }

    pub fn square_well(depth: f64, range: f64) -> Result<Self> {
        let m = Self::SquareWell { depth, range };
        m.validate()?;
        Ok(m)
    }

    pub fn zero_range(scattering_length: f64) -> Result<Self> {
        let m = Self::ZeroRange { scattering_length };
        m.validate()?;
        Ok(m)
    }

    pub fn breit_wigner(resonance_energy: f64, width: f64, background: f64) -> Result<Self> {
        let m = Self::BreitWigner {
            resonance_energy,
            width,
            background,
        };
        m.validate()?;
        Ok(m)
    }

    /// Model with identically vanishing phase shift.
    pub fn no_interaction() -> Self {
        Self::ZeroRange {
            scattering_length: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::HardSphere { range } => positive("range", range),
            Self::SquareWell { depth, range } => {
                positive("range", range)?;
                if !(depth.is_finite() && depth >= 0.0) {
                    return Err(invalid("depth", format!("must be finite and >= 0, got {depth}")));
                }
                Ok(())
            }
            Self::ZeroRange { scattering_length } => {
                if !scattering_length.is_finite() {
                    return Err(invalid("scattering_length", "must be finite"));
                }
                Ok(())
            }
            Self::BreitWigner {
                resonance_energy,
                width,
                background,
            } => {
                positive("width", width)?;
                if !(resonance_energy.is_finite() && background.is_finite()) {
                    return Err(invalid("resonance_energy", "parameters must be finite"));
                }
                Ok(())
            }
            Self::Tabulated(_) => Ok(()),
        }
    }

    /// Short human-readable model name, also used as the config selector.
    pub fn name(&self) -> &'static str {
        match self {
            Self::HardSphere { .. } => "hard_sphere",
            Self::SquareWell { .. } => "square_well",
            Self::ZeroRange { .. } => "zero_range",
            Self::BreitWigner { .. } => "breit_wigner",
            Self::Tabulated(_) => "tabulated",
        }
    }

    /// Phase shift in radians, continuous in `k`.
    pub fn theta(&self, k: f64) -> Result<f64> {
        check_k(k)?;
        Ok(match self {
            Self::HardSphere { range } => -k * range,
            Self::ZeroRange { scattering_length } => -(k * scattering_length).atan(),
            Self::SquareWell { depth, range } => square_well_theta(*depth, *range, k),
            Self::BreitWigner {
                resonance_energy,
                width,
                background,
            } => background + (0.5 * width).atan2(resonance_energy - 0.5 * k * k),
            Self::Tabulated(table) => table.eval(k)?.theta,
        })
    }

    /// `theta` and its first two derivatives in `k`.
    ///
    /// Closed forms are used where available; the square well falls back to
    /// central differences with one Richardson extrapolation.
    pub fn theta_derivs(&self, k: f64) -> Result<ThetaDerivs> {
        check_k(k)?;
        match self {
            Self::HardSphere { range } => Ok(ThetaDerivs {
                theta: -k * range,
                first: -range,
                second: 0.0,
            }),
            Self::ZeroRange { scattering_length: a } => {
                let d = 1.0 + (k * a).powi(2);
                Ok(ThetaDerivs {
                    theta: -(k * a).atan(),
                    first: -a / d,
                    second: 2.0 * k * a.powi(3) / (d * d),
                })
            }
            Self::BreitWigner {
                resonance_energy,
                width,
                background,
            } => {
                let half = 0.5 * width;
                let detune = resonance_energy - 0.5 * k * k;
                let d = detune * detune + half * half;
                Ok(ThetaDerivs {
                    theta: background + half.atan2(detune),
                    first: k * half / d,
                    second: half / d + 2.0 * k * k * half * detune / (d * d),
                })
            }
            Self::Tabulated(table) => table.eval(k),
            Self::SquareWell { .. } => self.theta_derivs_numeric(k),
        }
    }

    /// Finite-difference derivatives, available for every model.
    pub fn theta_derivs_numeric(&self, k: f64) -> Result<ThetaDerivs> {
        check_k(k)?;
        let h = (1e-4 * k).max(1e-6).min(0.5 * k);
        let theta = self.theta(k)?;
        let stencil = |h: f64| -> Result<(f64, f64)> {
            let plus = self.theta(k + h)?;
            let minus = self.theta(k - h)?;
            Ok((
                (plus - minus) / (2.0 * h),
                (plus - 2.0 * theta + minus) / (h * h),
            ))
        };
        let (d1_h, d2_h) = stencil(h)?;
        let (d1_half, d2_half) = stencil(0.5 * h)?;
        Ok(ThetaDerivs {
            theta,
            first: (4.0 * d1_half - d1_h) / 3.0,
            second: (4.0 * d2_half - d2_h) / 3.0,
        })
    }

    /// `f0(k) = (exp(2 i theta) - 1) / (2 i k)`, evaluated as
    /// `exp(i theta) sin(theta) / k`.
    pub fn f0(&self, k: f64) -> Result<Complex64> {
        let theta = self.theta(k)?;
        Ok(Complex64::from_polar(theta.sin() / k, theta))
    }

    /// `S0(k) = 4 pi |f0(k)|^2`.
    pub fn cross_section(&self, k: f64) -> Result<f64> {
        let s = self.theta(k)?.sin();
        Ok(4.0 * PI * s * s / (k * k))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(invalid("k", format!("wavenumber must be > 0, got {k}")))
    }
}

/// Square-well phase shift on the branch continuous in `k` with
/// `theta -> 0` as `k -> 0`.
///
/// Inside the well `u = sin(kappa r)`; matching at `r = b` gives
/// `tan(k b + theta) = (k / kappa) tan(kappa b)`. The angle of
/// `(kappa cos(kappa b), k sin(kappa b))` lies in the same quadrant as
/// `kappa b`, which fixes the branch without ever touching a tan pole.
fn square_well_theta(depth: f64, range: f64, k: f64) -> f64 {
    let kappa = (k * k + 2.0 * depth).sqrt();
    let x = kappa * range;
    let base = (k * x.sin()).atan2(kappa * x.cos());
    let matched = base + 2.0 * PI * ((x - base) / (2.0 * PI)).round();
    // Levinson offset: the k -> 0 limit of `matched` is the multiple of pi
    // nearest to kappa(0) b.
    let x0 = (2.0 * depth).sqrt() * range;
    let offset = PI * (x0 / PI).round();
    matched - k * range - offset
}

/// Natural cubic spline through `(k, theta)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPhase {
    k: Vec<f64>,
    theta: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl TabulatedPhase {
    pub const MIN_POINTS: usize = 4;

    pub fn new(k: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if k.len() != theta.len() {
            return Err(invalid("theta_values", "length differs from k_grid"));
        }
        if k.len() < Self::MIN_POINTS {
            return Err(invalid(
                "k_grid",
                format!("needs at least {} points, got {}", Self::MIN_POINTS, k.len()),
            ));
        }
        if k.iter().chain(&theta).any(|v| !v.is_finite()) {
            return Err(invalid("k_grid", "entries must be finite"));
        }
        if k.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("k_grid", "must be strictly ascending"));
        }
        let m = natural_second_derivatives(&k, &theta);
        Ok(Self { k, theta, m })
    }

    /// Parses `k theta` pairs, one per line; `#` starts a comment and the
    /// columns may be separated by whitespace or a comma.
    pub fn parse(text: &str) -> Result<Self> {
        let mut k = Vec::new();
        let mut theta = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::TableParse {
                    line,
                    reason: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| Error::TableParse {
                    line,
                    reason: format!("cannot parse `{s}` as a number"),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::TableParse {
                        line,
                        reason: format!("non-finite value `{s}`"),
                    })
                }
            };
            let kv = parse(fields[0])?;
            if kv <= 0.0 {
                return Err(Error::TableParse {
                    line,
                    reason: format!("wavenumber must be > 0, got {kv}"),
                });
            }
            if let Some(&prev) = k.last() {
                if kv <= prev {
                    return Err(Error::TableParse {
                        line,
                        reason: format!("wavenumber {kv} is not above the previous {prev}"),
                    });
                }
            }
            k.push(kv);
            theta.push(parse(fields[1])?);
        }
        if k.len() < Self::MIN_POINTS {
            return Err(Error::TableParse {
                line: last_line,
                reason: format!(
                    "table has {} rows, at least {} required",
                    k.len(),
                    Self::MIN_POINTS
                ),
            });
        }
        Self::new(k, theta)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k
    }

    pub fn theta_values(&self) -> &[f64] {
        &self.theta
    }

    pub fn range(&self) -> (f64, f64) {
        (self.k[0], self.k[self.k.len() - 1])
    }

    pub fn eval(&self, k: f64) -> Result<ThetaDerivs> {
        let (lo, hi) = self.range();
        if !(k >= lo && k <= hi) {
            return Err(Error::OutOfRange { k, lo, hi });
        }
        let i = match self.k.partition_point(|&x| x <= k) {
            0 => 0,
            p => (p - 1).min(self.k.len() - 2),
        };
        let h = self.k[i + 1] - self.k[i];
        let a = (self.k[i + 1] - k) / h;
        let b = (k - self.k[i]) / h;
        let (y0, y1) = (self.theta[i], self.theta[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let theta = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let first = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0
            + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let second = a * m0 + b * m1;
        Ok(ThetaDerivs {
            theta,
            first,
            second,
        })
    }
}

fn natural_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    // tridiagonal system for the interior knots, Thomas algorithm
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let lower = h0 / 6.0;
        let diag = (h0 + h1) / 3.0;
        let upper = h1 / 6.0;
        let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = diag - lower * c_prime[i - 1];
        c_prime[i] = upper / denom;
        d_prime[i] = (rhs - lower * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}
