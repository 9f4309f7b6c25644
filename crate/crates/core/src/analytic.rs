//! Closed-form scattered wave, scattered norm `|epsilon|^2` and the purity
//! laws built from them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::packet::{cm_amplitude, cm_rel, gamma_unchecked, CollisionConfig, Vec3};
use crate::phase_shift::PhaseShiftModel;

/// Largest `|epsilon|^2` for which the second-order purity expansion is
/// trusted.
pub const PERTURBATIVE_THRESHOLD: f64 = 0.1;

/// The s-wave scattered relative amplitude `epsilon * eta(k, t)`.
///
/// It is isotropic, and time enters only through the phase
/// `exp(-i k^2 t / 2)`.
#[derive(Debug, Clone)]
pub struct ScatteredWave {
    cfg: CollisionConfig,
    model: PhaseShiftModel,
    prefactor: Complex64,
}

impl ScatteredWave {
    pub fn new(cfg: CollisionConfig, model: PhaseShiftModel) -> Result<Self> {
        model.validate()?;
        let s2 = cfg.sigma0() * cfg.sigma0();
        let prefactor = Complex64::new(s2, 0.0) / Complex64::new(4.0 * cfg.k0(), -2.0 * s2 * cfg.r0());
        Ok(Self {
            cfg,
            model,
            prefactor,
        })
    }

    pub fn config(&self) -> &CollisionConfig {
        &self.cfg
    }

    pub fn model(&self) -> &PhaseShiftModel {
        &self.model
    }

    /// `sigma0^2 / (4 k0 - 2 i sigma0^2 r0)`.
    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    /// Amplitude at radial wavenumber `k` and time `t`, with the exact
    /// `theta(k)`.
    pub fn amplitude(&self, k: f64, t: f64) -> Result<Complex64> {
        let theta = self.model.theta(k)?;
        Ok(self.amplitude_with_theta(k, t, theta))
    }

    pub(crate) fn amplitude_with_theta(&self, k: f64, t: f64, theta: f64) -> Complex64 {
        let (k0, sigma0, r0) = (self.cfg.k0(), self.cfg.sigma0(), self.cfg.r0());
        // exp(2 i theta) - 1 = 2 i sin(theta) exp(i theta)
        let bracket = Complex64::from_polar(2.0 * theta.sin(), theta) * Complex64::i();
        let shell = gamma_unchecked((k - k0) * (k - k0), 2.0 / sigma0);
        let phase = Complex64::from_polar(1.0 / k, (k - k0) * r0 - 0.5 * k * k * t);
        self.prefactor * bracket * shell * phase
    }

    /// Normalized two-particle scattered state
    /// `phi_cm(K, t) eta(k, t)` with `eta = amplitude / epsilon`.
    pub fn pair_state(&self, epsilon_sq: f64) -> Result<ScatteredPair<'_>> {
        if !(epsilon_sq.is_finite() && epsilon_sq > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(ScatteredPair {
            wave: self,
            inv_epsilon: 1.0 / epsilon_sq.sqrt(),
        })
    }
}

/// Unit-norm scattered two-particle amplitude at time `cfg.t()`.
#[derive(Debug, Clone, Copy)]
pub struct ScatteredPair<'a> {
    wave: &'a ScatteredWave,
    inv_epsilon: f64,
}

impl ScatteredPair<'_> {
    pub fn eval(&self, k1: &Vec3, k2: &Vec3) -> Result<Complex64> {
        let (total, rel) = cm_rel(k1, k2);
        self.eval_cm_rel(&total, &rel)
    }

    pub fn eval_cm_rel(&self, total: &Vec3, rel: &Vec3) -> Result<Complex64> {
        let cfg = &self.wave.cfg;
        let k = rel.norm();
        if k == 0.0 {
            // measure-zero point; the amplitude stays integrable there
            return Ok(Complex64::new(0.0, 0.0));
        }
        let eta = self.wave.amplitude(k, cfg.t())? * self.inv_epsilon;
        Ok(cm_amplitude(total, cfg) * eta)
    }
}

/// Scattered norm `|epsilon|^2` from a second-order expansion of
/// `theta` about `k0`.
pub fn epsilon_sq(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<f64> {
    model.validate()?;
    let d = model.theta_derivs(cfg.k0())?;
    let (s2, k0) = (cfg.sigma0() * cfg.sigma0(), cfg.k0());
    let gamma_sq = cfg.derived_scales().gamma_sq;
    Ok(s2 / (k0 * k0 * gamma_sq) * bracket(s2, d.theta, d.first, d.second))
}

/// `1 - Re{exp(2 i theta) sqrt(2 / (2 - i s2 theta'')) exp(-s2 theta'^2 / (2 - i s2 theta''))}`,
/// which lies in `[0, 2]`.
fn bracket(s2: f64, theta: f64, first: f64, second: f64) -> f64 {
    let denom = Complex64::new(2.0, -s2 * second);
    let root = (Complex64::new(2.0, 0.0) / denom).sqrt();
    let gauss = (-(s2 * first * first) / denom).exp();
    let value = Complex64::from_polar(1.0, 2.0 * theta) * root * gauss;
    1.0 - value.re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityMethod {
    /// `P = 1 - 2 |epsilon|^2` with the expanded norm.
    Expansion,
    /// Narrow-packet limit `1 - P = sigma_c^2 S0(k0) / pi`.
    Narrow,
    /// Purely numerical estimate.
    Oracle,
}

impl PurityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Expansion => "expansion",
            Self::Narrow => "narrow_limit",
            Self::Oracle => "oracle",
        }
    }
}

/// Dimensionless quantities that control how far the expansions can be
/// trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDiagnostics {
    pub sigma0_over_k0: f64,
    pub sigma0_theta_prime: f64,
    pub sigma0_sq_theta_double_prime: f64,
    pub gamma_sq: f64,
}

impl RegimeDiagnostics {
    pub fn new(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<Self> {
        let d = model.theta_derivs(cfg.k0())?;
        let s = cfg.sigma0();
        Ok(Self {
            sigma0_over_k0: cfg.sigma0_over_k0(),
            sigma0_theta_prime: s * d.first,
            sigma0_sq_theta_double_prime: s * s * d.second,
            gamma_sq: cfg.derived_scales().gamma_sq,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityReport {
    pub purity: f64,
    pub one_minus_purity: f64,
    pub epsilon_sq: f64,
    pub diagnostics: RegimeDiagnostics,
    pub method: PurityMethod,
}

/// Purity of either particle after the collision, `P = 1 - 2 |epsilon|^2`.
///
/// Fails with [`Error::PerturbativeRegimeViolation`] when
/// `|epsilon|^2 > PERTURBATIVE_THRESHOLD`.
pub fn purity(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<PurityReport> {
    let eps2 = epsilon_sq(cfg, model)?;
    check_regime(eps2)?;
    let one_minus_purity = 2.0 * eps2;
    Ok(PurityReport {
        purity: 1.0 - one_minus_purity,
        one_minus_purity,
        epsilon_sq: eps2,
        diagnostics: RegimeDiagnostics::new(cfg, model)?,
        method: PurityMethod::Expansion,
    })
}

/// Narrow-packet limit `1 - P = 4 sigma_c^2 |f0(k0)|^2 = sigma_c^2 S0(k0) / pi`.
///
/// The validity conditions are reported in the diagnostics, not enforced.
pub fn purity_narrow(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<PurityReport> {
    model.validate()?;
    let scales = cfg.derived_scales();
    let s0 = model.cross_section(cfg.k0())?;
    let one_minus_purity = scales.sigma_c * scales.sigma_c * s0 / PI;
    Ok(PurityReport {
        purity: 1.0 - one_minus_purity,
        one_minus_purity,
        epsilon_sq: 0.5 * one_minus_purity,
        diagnostics: RegimeDiagnostics::new(cfg, model)?,
        method: PurityMethod::Narrow,
    })
}

/// Second-order purity `1 - 2 |epsilon|^2 (1 + I1 - I2 - I3)`.
pub fn purity_from_expansion(epsilon_sq: f64, i1: f64, i2: f64, i3: f64) -> Result<f64> {
    for (name, v) in [("epsilon_sq", epsilon_sq), ("i1", i1), ("i2", i2), ("i3", i3)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
        }
    }
    check_regime(epsilon_sq)?;
    Ok(1.0 - 2.0 * epsilon_sq * (1.0 + i1 - i2 - i3))
}

fn check_regime(epsilon_sq: f64) -> Result<()> {
    if epsilon_sq > PERTURBATIVE_THRESHOLD {
        Err(Error::PerturbativeRegimeViolation {
            epsilon_sq,
            threshold: PERTURBATIVE_THRESHOLD,
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(sigma0: f64, k0: f64, r0: f64) -> CollisionConfig {
        CollisionConfig::new(sigma0, k0, r0, 0.0).unwrap()
    }

    #[test]
    fn no_interaction_gives_unit_purity() {
        let c = cfg(0.05, 1.0, 10.0);
        let free = PhaseShiftModel::no_interaction();
        assert_eq!(epsilon_sq(&c, &free).unwrap(), 0.0);
        let r = purity(&c, &free).unwrap();
        assert_eq!(r.purity, 1.0);
        assert_eq!(r.one_minus_purity, 0.0);
        assert_eq!(purity_narrow(&c, &free).unwrap().one_minus_purity, 0.0);
        let wave = ScatteredWave::new(c, free).unwrap();
        for k in [0.5, 1.0, 1.3] {
            assert_eq!(wave.amplitude(k, 3.0).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn constant_phase_reduces_to_sin_squared() {
        // Breit-Wigner far from resonance with a huge width is flat only
        // approximately; a table with constant values is exactly flat.
        let k: Vec<f64> = (0..8).map(|i| 0.5 + 0.2 * i as f64).collect();
        let theta0 = 0.7;
        let table = crate::TabulatedPhase::new(k, vec![theta0; 8]).unwrap();
        let model = PhaseShiftModel::Tabulated(table);
        let c = cfg(0.02, 1.1, 30.0);
        let g2 = c.derived_scales().gamma_sq;
        let expected = 2.0 * 0.02f64.powi(2) / (1.1f64.powi(2) * g2) * theta0.sin().powi(2);
        assert_relative_eq!(epsilon_sq(&c, &model).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn unitarity_maximum_purity() {
        // theta(k0) = pi/2 with a constant table, gamma = 1
        let k: Vec<f64> = (0..6).map(|i| 0.5 + 0.25 * i as f64).collect();
        let table = crate::TabulatedPhase::new(k, vec![PI / 2.0; 6]).unwrap();
        let model = PhaseShiftModel::Tabulated(table);
        let c = cfg(0.01, 1.0, 0.0);
        let r = purity(&c, &model).unwrap();
        assert_relative_eq!(r.purity, 1.0 - 4.0 * 1e-4, max_relative = 1e-15);
    }

    #[test]
    fn narrow_limit_for_small_hard_sphere() {
        let b = 1e-3;
        let model = PhaseShiftModel::hard_sphere(b).unwrap();
        let c = cfg(0.01, 1.0, 50.0);
        let r = purity_narrow(&c, &model).unwrap();
        let sc = c.derived_scales().sigma_c;
        assert_relative_eq!(r.one_minus_purity, 4.0 * sc * sc * b * b, max_relative = 1e-6);
        assert_eq!(r.method, PurityMethod::Narrow);
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(purity_from_expansion(0.0, 0.3, 0.1, 0.2).unwrap(), 1.0);
        assert_eq!(purity_from_expansion(0.01, 0.0, 0.0, 0.0).unwrap(), 0.98);
        let (s, k) = (0.01f64, 1.0f64);
        let (i1, i2) = (s * s / (2.0 * k * k), 2.0 * s * s / (3.0 * k * k));
        let eps2 = 3e-5;
        let p = purity_from_expansion(eps2, i1, i2, i2).unwrap();
        let expected = 1.0 - 2.0 * eps2 * (1.0 - 5.0 * s * s / (6.0 * k * k));
        assert_relative_eq!(p, expected, max_relative = 1e-15);
        assert!(matches!(
            purity_from_expansion(0.2, 0.0, 0.0, 0.0),
            Err(Error::PerturbativeRegimeViolation { .. })
        ));
        assert!(purity_from_expansion(0.01, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn regime_violation_is_reported() {
        let model = PhaseShiftModel::hard_sphere(1.0).unwrap();
        let c = cfg(0.5, 1.0, 0.0);
        assert!(epsilon_sq(&c, &model).unwrap() > PERTURBATIVE_THRESHOLD);
        match purity(&c, &model) {
            Err(Error::PerturbativeRegimeViolation { threshold, .. }) => {
                assert_eq!(threshold, PERTURBATIVE_THRESHOLD)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn amplitude_modulus_ignores_time() {
        let model = PhaseShiftModel::square_well(3.0, 1.0).unwrap();
        let wave = ScatteredWave::new(cfg(0.05, 1.0, 10.0), model).unwrap();
        for k in [0.9, 1.0, 1.07] {
            let a0 = wave.amplitude(k, 0.0).unwrap().norm();
            let a1 = wave.amplitude(k, 1e3).unwrap().norm();
            assert!((a0 - a1).abs() <= 1e-12 * a0);
        }
        assert!(wave.amplitude(0.0, 0.0).is_err());
    }

    #[test]
    fn bracket_stays_in_range() {
        for &(t, d1, d2) in &[(0.3, 50.0, -200.0), (1.2, 0.0, 0.0), (PI / 2.0, 1.0, 1e4)] {
            let b = bracket(1e-2, t, d1, d2);
            assert!((0.0..=2.0).contains(&b), "{b}");
        }
    }
}
