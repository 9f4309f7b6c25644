//! Scattered norm and the overlap integrals `I1`, `I2`, `I3` between the
//! freely propagated product state and the normalized scattered state.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SMatrix};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::mc::{self, McEstimate, McStream};
use super::quadrature::GaussLegendreRule;
use crate::analytic::ScatteredWave;
use crate::error::{invalid, Error, Result};
use crate::packet::{
    free_phase, packet_one, packet_two, relative_packet, BeamGeometry, CollisionConfig, Vec3,
};
use crate::phase_shift::PhaseShiftModel;

pub const DEFAULT_QUAD_N: usize = 200;
/// Half-width of the radial integration window, in units of `sigma0`.
pub const RADIAL_HALF_WIDTH: f64 = 12.0;
pub const MIN_MC_SAMPLES: u64 = 100_000;

/// Variance inflation of the Monte Carlo proposal relative to the
/// flat-shell limit of the integrand; keeps the weight variance finite.
const PROPOSAL_INFLATION: f64 = 1.5;

fn radial_window(cfg: &CollisionConfig) -> (f64, f64) {
    let (k0, s) = (cfg.k0(), cfg.sigma0());
    ((k0 - RADIAL_HALF_WIDTH * s).max(1e-8 * k0), k0 + RADIAL_HALF_WIDTH * s)
}

/// `4 pi int k^2 |epsilon eta(k, t)|^2 dk` with the exact `theta(k)`.
pub fn epsilon_sq_quadrature(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<f64> {
    epsilon_sq_quadrature_with(cfg, model, DEFAULT_QUAD_N)
}

pub fn epsilon_sq_quadrature_with(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    n: usize,
) -> Result<f64> {
    let wave = ScatteredWave::new(*cfg, model.clone())?;
    let rule = GaussLegendreRule::new(n)?;
    let (a, b) = radial_window(cfg);
    let (ks, ws) = rule.mapped(a, b);
    let mut sum = 0.0;
    for (k, w) in ks.iter().zip(&ws) {
        sum += w * k * k * wave.amplitude(*k, cfg.t())?.norm_sqr();
    }
    Ok(4.0 * PI * sum)
}

/// `I1 = |<phi_scat | phi1 phi2>|^2`.
///
/// The center-of-mass factors coincide, so only the relative overlap is
/// integrated, in `(k, cos)` about the beam axis. The angular window is
/// trimmed to where the incident packet is non-negligible.
pub fn overlap_i1(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<f64> {
    overlap_i1_with(cfg, model, DEFAULT_QUAD_N, DEFAULT_QUAD_N)
}

pub fn overlap_i1_with(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    n_k: usize,
    n_cos: usize,
) -> Result<f64> {
    let eps2 = epsilon_sq_quadrature_with(cfg, model, n_k)?;
    if eps2 == 0.0 {
        return Ok(0.0);
    }
    let wave = ScatteredWave::new(*cfg, model.clone())?;
    let geom = BeamGeometry::default();
    let k_rule = GaussLegendreRule::new(n_k)?;
    let c_rule = GaussLegendreRule::new(n_cos)?;
    let (a, b) = radial_window(cfg);
    let (ks, wk) = k_rule.mapped(a, b);
    let s2 = cfg.sigma0() * cfg.sigma0();

    let mut overlap = Complex64::new(0.0, 0.0);
    for (k, w) in ks.iter().zip(&wk) {
        let eta = wave.amplitude(*k, cfg.t())?.conj();
        // Gamma(k, k0 z; 2/sigma0) ~ exp(-2 k k0 (1 - cos) / sigma0^2)
        let c_lo = (1.0 - 20.0 * s2 / (k * cfg.k0())).max(-1.0);
        let (cs, wc) = c_rule.mapped(c_lo, 1.0);
        let mut inner = Complex64::new(0.0, 0.0);
        for (c, wc) in cs.iter().zip(&wc) {
            let sin = (1.0 - c * c).max(0.0).sqrt();
            let kv = Vec3::new(k * sin, 0.0, k * c);
            inner += relative_packet(&kv, cfg, &geom) * *wc;
        }
        overlap += eta * inner * (w * k * k);
    }
    overlap *= 2.0 * PI / eps2.sqrt();
    Ok(overlap.norm_sqr())
}

/// Gaussian proposal over the three momenta of the `I2`/`I3` integrand,
/// matched to its modulus in the flat-shell limit.
///
/// Coordinates are offsets from the packet centers in units of `sigma0`:
/// `u`, `v` for the two integrated momenta of the same particle and `w` for
/// the shared momentum of the other particle.
struct FlatProposal {
    transverse: Matrix3<f64>,
    axial: f64,
    log_norm: f64,
}

impl FlatProposal {
    fn new() -> Self {
        // |f| ~ exp(-x^T M x) per transverse axis, exp(-|x|^2) along the beam
        let twice_m = Matrix3::new(1.5, 0.0, 0.5, 0.0, 1.5, 0.5, 0.5, 0.5, 1.0);
        let cov = twice_m.try_inverse().expect("positive definite") * PROPOSAL_INFLATION;
        let transverse = cov.cholesky().expect("positive definite").l();
        let axial = (0.5 * PROPOSAL_INFLATION).sqrt();
        let log_det = 2.0 * transverse.diagonal().iter().map(|d| d.ln()).sum::<f64>()
            + 3.0 * axial.ln();
        Self {
            transverse,
            axial,
            log_norm: -4.5 * (2.0 * PI).ln() - log_det,
        }
    }

    /// Draws `(u, v, w)` and returns them with the log density in the scaled
    /// coordinates.
    fn sample(&self, rng: &mut McStream) -> ([Vec3; 3], f64) {
        let mut z = SMatrix::<f64, 3, 3>::zeros();
        for v in z.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let mut out = [Vec3::zeros(); 3];
        // columns 0, 1: transverse axes; column 2: beam axis
        for axis in 0..2 {
            let x = self.transverse * z.column(axis);
            for (var, value) in out.iter_mut().zip(x.iter()) {
                var[axis] = *value;
            }
        }
        for (var, zi) in out.iter_mut().zip(z.column(2).iter()) {
            var[2] = self.axial * zi;
        }
        (out, self.log_norm - 0.5 * z.norm_squared())
    }
}

/// Monte Carlo estimates of `I2` and `I3`.
///
/// Each squared modulus is unfolded into a 9-D integral over
/// `(k1, k3, k2)`, e.g.
/// `I2 = int phi_scat*(k1,k2) phi1(k1) phi_scat(k3,k2) phi1*(k3)`, and
/// importance sampled from [`FlatProposal`]. `I2` draws from stream block 0
/// and `I3` from block `2^32`.
pub fn mc_overlap_i2_i3(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    n_samples: u64,
    seed: u64,
) -> Result<(McEstimate, McEstimate)> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(invalid(
            "samples",
            format!("at least {MIN_MC_SAMPLES} samples required, got {n_samples}"),
        ));
    }
    let eps2 = epsilon_sq_quadrature(cfg, model)?;
    if eps2 == 0.0 {
        let zero = McEstimate {
            mean: 0.0,
            stderr: 0.0,
            n_samples,
            seed,
        };
        return Ok((zero, zero));
    }
    let wave = ScatteredWave::new(*cfg, model.clone())?;
    let pair = wave.pair_state(eps2)?;
    let geom = BeamGeometry::default();
    let proposal = FlatProposal::new();
    let centre = cfg.k0() * geom.axis();
    let s = cfg.sigma0();
    let log_jacobian = 9.0 * s.ln();
    let t = cfg.t();

    let i2 = mc::estimate(seed, 0, n_samples, |rng| {
        let ([u, v, w], log_p) = proposal.sample(rng);
        let k1 = centre + s * u;
        let k3 = centre + s * v;
        let k2 = -centre + s * w;
        let p1 = |k: &Vec3| packet_one(k, cfg, &geom) * free_phase(k, t);
        let f = pair.eval(&k1, &k2)?.conj() * p1(&k1) * pair.eval(&k3, &k2)? * p1(&k3).conj();
        weight(f, log_p - log_jacobian, "I2 integrand")
    })?;
    let i3 = mc::estimate(seed, 1 << 32, n_samples, |rng| {
        let ([u, v, w], log_p) = proposal.sample(rng);
        let k2 = -centre + s * u;
        let k4 = -centre + s * v;
        let k1 = centre + s * w;
        let p2 = |k: &Vec3| packet_two(k, cfg, &geom) * free_phase(k, t);
        let f = pair.eval(&k1, &k2)?.conj() * p2(&k2) * pair.eval(&k1, &k4)? * p2(&k4).conj();
        weight(f, log_p - log_jacobian, "I3 integrand")
    })?;
    Ok((i2, i3))
}

fn weight(f: Complex64, log_density: f64, context: &'static str) -> Result<f64> {
    let w = f.re * (-log_density).exp();
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::NonFinite { context })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CollisionConfig {
        CollisionConfig::new(0.01, 1.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn vanishing_phase_gives_zero() {
        let free = PhaseShiftModel::no_interaction();
        assert!(epsilon_sq_quadrature(&cfg(), &free).unwrap().abs() < 1e-15);
        assert_eq!(overlap_i1(&cfg(), &free).unwrap(), 0.0);
        let (i2, i3) = mc_overlap_i2_i3(&cfg(), &free, MIN_MC_SAMPLES, 1).unwrap();
        assert_eq!((i2.mean, i2.stderr, i3.mean, i3.stderr), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn sample_budget_enforced() {
        let m = PhaseShiftModel::hard_sphere(1.0).unwrap();
        assert!(mc_overlap_i2_i3(&cfg(), &m, 1000, 1).is_err());
    }

    #[test]
    fn quadrature_self_convergence() {
        let m = PhaseShiftModel::square_well(2.0, 1.0).unwrap();
        let a = epsilon_sq_quadrature_with(&cfg(), &m, 200).unwrap();
        let b = epsilon_sq_quadrature_with(&cfg(), &m, 400).unwrap();
        assert!(((a - b) / b).abs() < 1e-10);
    }

    #[test]
    fn proposal_density_is_normalized() {
        // E_p[1/p] over a box would diverge; instead check the log density
        // against the transverse covariance determinant directly.
        let p = FlatProposal::new();
        let twice_m = Matrix3::new(1.5, 0.0, 0.5, 0.0, 1.5, 0.5, 0.5, 0.5, 1.0);
        let cov = twice_m.try_inverse().unwrap() * PROPOSAL_INFLATION;
        let log_det = 2.0 * cov.determinant().ln() + 3.0 * (0.5 * PROPOSAL_INFLATION).ln();
        let expected = -4.5 * (2.0 * PI).ln() - 0.5 * log_det;
        assert!((p.log_norm - expected).abs() < 1e-12);
    }
}
