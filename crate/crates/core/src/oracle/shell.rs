//! Purity of the normalized scattered state on its own.
//!
//! The scattered pair state `Psi(k1, k2) = phi_cm(|k1 + k2|) eta(|k1 - k2| / 2)`
//! is rotationally invariant, so it depends on directions only through
//! `cos = k1^ . k2^`. Expanding in Legendre polynomials and using the
//! addition theorem,
//!
//! `Psi = sum_l (4 pi / (2l + 1)) a_l(k1, k2) sum_m Y_lm(k1^) Y_lm*(k2^)`,
//!
//! so the reduced density matrix is block diagonal in `(l, m)` with blocks
//! independent of `m`. On a radial grid with weights `W_i = k_i^2 w_i` the
//! block coefficient matrix is
//! `B_l[i][j] = 2 pi sqrt(W_i W_j) int Psi(k_i, k_j, cos) P_l(cos) dcos`,
//! the norm is `sum_l (2l + 1) ||B_l||_F^2` and the purity
//! `sum_l (2l + 1) Tr (B_l B_l^dagger)^2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Rotation3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::grid::purity_of_weighted;
use super::mc::{self, McEstimate, McStream};
use super::overlap::epsilon_sq_quadrature_with;
use super::quadrature::{legendre_all, GaussLegendreRule};
use crate::analytic::ScatteredWave;
use crate::error::{invalid, Error, Result};
use crate::packet::{rel_cm, CollisionConfig, Vec3};
use crate::phase_shift::PhaseShiftModel;

pub const MIN_L_MAX: usize = 8;
pub const DEFAULT_L_MAX: usize = 48;
/// Largest acceptable round-trip residual, relative to the peak amplitude.
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-6;
const ROW_BLOCK: usize = 16;

/// Radial and angular quadrature sizes for the sector decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGridSpec {
    pub n_radial: usize,
    pub n_angular: usize,
    /// Half-width of the radial window about `k0`, in units of `sigma0`.
    pub half_width: f64,
}

impl Default for RadialGridSpec {
    fn default() -> Self {
        Self {
            n_radial: 200,
            n_angular: 200,
            half_width: 10.0,
        }
    }
}

impl RadialGridSpec {
    fn validate(&self) -> Result<()> {
        if self.n_radial < 2 || self.n_angular < 2 {
            return Err(invalid("radial_grid_spec", "need at least 2 nodes per axis"));
        }
        if !(self.half_width.is_finite() && self.half_width >= 10.0) {
            return Err(invalid(
                "half_width",
                "radial window must cover at least 10 sigma0 about k0",
            ));
        }
        Ok(())
    }
}

/// Range of the angle `alpha` between `k1^` and `-k2^` that is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularGrid {
    /// The whole sphere, `alpha` in `[0, pi]`.
    Full,
    /// Only `alpha` in `[0, alpha_max]`, for amplitudes peaked at
    /// back-to-back momenta.
    BackToBack { alpha_max: f64 },
}

impl AngularGrid {
    fn alpha_max(&self) -> f64 {
        match *self {
            Self::Full => PI,
            Self::BackToBack { alpha_max } => alpha_max.min(PI),
        }
    }
}

/// Smallest `l_max` that resolves the angular width of the shell state.
pub fn auto_l_max(cfg: &CollisionConfig) -> usize {
    DEFAULT_L_MAX.max((7.0 / cfg.sigma0_over_k0()).ceil() as usize)
}

#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    l_max: usize,
    k_nodes: Vec<f64>,
    k_weights: Vec<f64>,
    sectors: Vec<DMatrix<Complex64>>,
    raw_norm: f64,
    roundtrip_residual: f64,
}

impl SectorDecomposition {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Normalized coefficient matrices `B_l`, `l = 0..=l_max`.
    pub fn sectors(&self) -> &[DMatrix<Complex64>] {
        &self.sectors
    }

    pub fn k_nodes(&self) -> &[f64] {
        &self.k_nodes
    }

    /// Radial weights including the `k^2` measure.
    pub fn k_weights(&self) -> &[f64] {
        &self.k_weights
    }

    /// `sum_l (2l + 1) ||B_l||^2` of the input amplitude before
    /// normalization.
    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    /// Same sum over the stored, normalized sectors.
    pub fn norm(&self) -> f64 {
        self.sectors
            .iter()
            .enumerate()
            .map(|(l, b)| (2 * l + 1) as f64 * b.norm_squared())
            .sum()
    }

    /// Largest deviation between the input amplitude and its Legendre
    /// reconstruction at the sampled points, relative to the peak modulus.
    pub fn roundtrip_residual(&self) -> f64 {
        self.roundtrip_residual
    }

    /// `||B_l||^2` per sector, normalized.
    pub fn sector_weights(&self) -> Vec<f64> {
        self.sectors.iter().map(|b| b.norm_squared()).collect()
    }

    /// Reconstructs the input (unnormalized) amplitude at radial nodes
    /// `(i, j)` and `cos = k1^ . k2^`.
    pub fn reconstruct(&self, i: usize, j: usize, cos: f64) -> Complex64 {
        let mut p = Vec::with_capacity(self.l_max + 1);
        legendre_all(self.l_max, cos, &mut p);
        let scale = self.raw_norm.sqrt() / (self.k_weights[i] * self.k_weights[j]).sqrt();
        self.sectors
            .iter()
            .zip(&p)
            .enumerate()
            .map(|(l, (b, pl))| b[(i, j)] * ((2 * l + 1) as f64 / (4.0 * PI) * pl * scale))
            .sum()
    }
}

/// Radial grid of the scattered shell.
fn shell_radial_nodes(cfg: &CollisionConfig, spec: &RadialGridSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let (k0, s) = (cfg.k0(), cfg.sigma0());
    let lo = (k0 - spec.half_width * s).max(1e-6 * k0);
    let hi = k0 + spec.half_width * s;
    Ok(GaussLegendreRule::new(spec.n_radial)?.mapped(lo, hi))
}

/// Legendre-sector decomposition of the normalized scattered pair state.
pub fn shell_sector_decompose(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    l_max: usize,
    spec: &RadialGridSpec,
) -> Result<SectorDecomposition> {
    shell_sector_decompose_in_frame(cfg, model, l_max, spec, &Rotation3::identity())
}

/// As [`shell_sector_decompose`], with the angular quadrature directions
/// rotated by `frame`.
pub fn shell_sector_decompose_in_frame(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    l_max: usize,
    spec: &RadialGridSpec,
    frame: &Rotation3<f64>,
) -> Result<SectorDecomposition> {
    spec.validate()?;
    let eps2 = epsilon_sq_quadrature_with(cfg, model, spec.n_radial)?;
    let wave = ScatteredWave::new(*cfg, model.clone())?;
    let pair = wave.pair_state(eps2)?;
    let (nodes, weights) = shell_radial_nodes(cfg, spec)?;
    // |Psi| <= exp(-k1 k2 sin^2(alpha/2) / sigma0^2); cut where this is e^-40
    let k_min = nodes[0];
    let x = 40f64.sqrt() * cfg.sigma0() / k_min;
    let angular = if x >= 1.0 {
        AngularGrid::Full
    } else {
        AngularGrid::BackToBack {
            alpha_max: 2.0 * x.asin(),
        }
    };
    decompose_pair_amplitude(
        |k1, k2| pair.eval(k1, k2),
        &nodes,
        &weights,
        angular,
        spec.n_angular,
        l_max,
        frame,
    )
}

/// Decomposes any rotationally invariant pair amplitude given as a
/// function of the two momentum vectors.
///
/// `weights` are plain quadrature weights on `nodes`; the `k^2` measure is
/// added here.
pub fn decompose_pair_amplitude<F>(
    amplitude: F,
    nodes: &[f64],
    weights: &[f64],
    angular: AngularGrid,
    n_angular: usize,
    l_max: usize,
    frame: &Rotation3<f64>,
) -> Result<SectorDecomposition>
where
    F: Fn(&Vec3, &Vec3) -> Result<Complex64> + Sync,
{
    if l_max < MIN_L_MAX {
        return Err(invalid("l_max", format!("must be >= {MIN_L_MAX}, got {l_max}")));
    }
    if nodes.len() != weights.len() || nodes.is_empty() {
        return Err(invalid("nodes", "radial nodes and weights must match"));
    }
    let n = nodes.len();
    let k_weights: Vec<f64> = nodes.iter().zip(weights).map(|(k, w)| k * k * w).collect();

    // angle alpha between k1^ and -k2^; cos(k1^, k2^) = -cos(alpha)
    let (alphas, alpha_w) = GaussLegendreRule::new(n_angular)?.mapped(0.0, angular.alpha_max());
    let cosines: Vec<f64> = alphas.iter().map(|a| -a.cos()).collect();
    let dcos_w: Vec<f64> = alphas.iter().zip(&alpha_w).map(|(a, w)| a.sin() * w).collect();
    let mut p = Vec::new();
    let legendre: Vec<Vec<f64>> = cosines
        .iter()
        .zip(&dcos_w)
        .map(|(c, w)| {
            legendre_all(l_max, *c, &mut p);
            p.iter().map(|pl| pl * w).collect()
        })
        .collect();
    let dir1 = frame * Vec3::z();
    let dirs2: Vec<Vec3> = alphas
        .iter()
        .map(|a| frame * Vec3::new(a.sin(), 0.0, -a.cos()))
        .collect();

    let mut sectors = vec![DMatrix::<Complex64>::zeros(n, n); l_max + 1];
    // rows are computed in parallel blocks and copied out in order
    for block in (0..n).collect::<Vec<_>>().chunks(ROW_BLOCK) {
        let rows: Vec<Vec<Complex64>> = block
            .par_iter()
            .map(|&i| {
                let mut row = vec![Complex64::new(0.0, 0.0); (l_max + 1) * n];
                let mut psi = vec![Complex64::new(0.0, 0.0); alphas.len()];
                let k1 = nodes[i] * dir1;
                for j in 0..n {
                    for (v, d2) in psi.iter_mut().zip(&dirs2) {
                        *v = amplitude(&k1, &(nodes[j] * d2))?;
                    }
                    let scale = 2.0 * PI * (k_weights[i] * k_weights[j]).sqrt();
                    for (psi_a, p_a) in psi.iter().zip(&legendre) {
                        for (l, pl) in p_a.iter().enumerate() {
                            row[l * n + j] += psi_a * (pl * scale);
                        }
                    }
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        for (&i, row) in block.iter().zip(&rows) {
            for (l, b) in sectors.iter_mut().enumerate() {
                for j in 0..n {
                    b[(i, j)] = row[l * n + j];
                }
            }
        }
    }

    let raw_norm: f64 = sectors
        .iter()
        .enumerate()
        .map(|(l, b)| (2 * l + 1) as f64 * b.norm_squared())
        .sum();
    if !(raw_norm.is_finite() && raw_norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let inv = Complex64::new(1.0 / raw_norm.sqrt(), 0.0);
    for b in sectors.iter_mut() {
        *b *= inv;
    }
    let mut decomp = SectorDecomposition {
        l_max,
        k_nodes: nodes.to_vec(),
        k_weights,
        sectors,
        raw_norm,
        roundtrip_residual: 0.0,
    };
    decomp.roundtrip_residual = roundtrip_residual(&decomp, &amplitude, &alphas, frame)?;
    if decomp.roundtrip_residual > ROUNDTRIP_TOLERANCE {
        return Err(Error::InsufficientLmax {
            l_max,
            residual: decomp.roundtrip_residual,
            tolerance: ROUNDTRIP_TOLERANCE,
        });
    }
    Ok(decomp)
}

/// Compares the reconstruction with the amplitude on a subset of radial
/// pairs, at the angular nodes and halfway between them.
fn roundtrip_residual<F>(
    decomp: &SectorDecomposition,
    amplitude: &F,
    alphas: &[f64],
    frame: &Rotation3<f64>,
) -> Result<f64>
where
    F: Fn(&Vec3, &Vec3) -> Result<Complex64> + Sync,
{
    let n = decomp.k_nodes.len();
    let stride = (n / 12).max(1);
    let mut probe: Vec<f64> = alphas.to_vec();
    probe.extend(alphas.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    probe.push(PI);
    let dir1 = frame * Vec3::z();
    let pairs: Vec<(usize, usize)> = (0..n)
        .step_by(stride)
        .flat_map(|i| (0..n).step_by(stride).map(move |j| (i, j)))
        .collect();
    let results: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut worst = 0.0f64;
            let mut peak = 0.0f64;
            for a in &probe {
                let k1 = decomp.k_nodes[i] * dir1;
                let k2 = decomp.k_nodes[j] * (frame * Vec3::new(a.sin(), 0.0, -a.cos()));
                let direct = amplitude(&k1, &k2)?;
                let rebuilt = decomp.reconstruct(i, j, -a.cos());
                worst = worst.max((direct - rebuilt).norm());
                peak = peak.max(direct.norm());
            }
            Ok((worst, peak))
        })
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let peak = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(if peak > 0.0 { worst / peak } else { worst })
}

/// `sum_l (2l + 1) Tr rho_l^2` of the normalized decomposition.
pub fn shell_purity(decomp: &SectorDecomposition) -> f64 {
    decomp
        .sectors
        .par_iter()
        .enumerate()
        .map(|(l, b)| (2 * l + 1) as f64 * purity_of_weighted(b))
        .collect::<Vec<f64>>()
        .into_iter()
        .sum()
}

/// Sampler for one scattered pair: `K ~ |phi_cm|^2` and `k` on the shell,
/// radial gaussian at `k0` with the width of `|eta|^2`, isotropic direction.
struct ShellProposal {
    sigma0: f64,
    k0: f64,
    radial_sd: f64,
    radial_log_norm: f64,
}

impl ShellProposal {
    fn new(cfg: &CollisionConfig) -> Self {
        let radial_sd = 0.5 * cfg.sigma0();
        // truncation of the radial gaussian to k > 0
        let mass = 0.5 * erfc(-cfg.k0() / (radial_sd * std::f64::consts::SQRT_2));
        Self {
            sigma0: cfg.sigma0(),
            k0: cfg.k0(),
            radial_sd,
            radial_log_norm: -(radial_sd * (2.0 * PI).sqrt() * mass).ln(),
        }
    }

    /// Returns `(K, k)` and the log density.
    fn sample(&self, rng: &mut McStream) -> (Vec3, Vec3, f64) {
        let normal = |rng: &mut McStream| -> f64 { StandardNormal.sample(rng) };
        let total = Vec3::new(normal(rng), normal(rng), normal(rng)) * self.sigma0;
        let log_cm = -1.5 * (2.0 * PI * self.sigma0 * self.sigma0).ln()
            - 0.5 * total.norm_squared() / (self.sigma0 * self.sigma0);
        let r = loop {
            let r = self.k0 + self.radial_sd * normal(rng);
            if r > 0.0 {
                break r;
            }
        };
        let dir = loop {
            let v = Vec3::new(normal(rng), normal(rng), normal(rng));
            let n = v.norm();
            if n > 1e-12 {
                break v / n;
            }
        };
        let z = (r - self.k0) / self.radial_sd;
        let log_radial = self.radial_log_norm - 0.5 * z * z - (4.0 * PI * r * r).ln();
        (total, r * dir, log_cm + log_radial)
    }
}

fn shell_setup(cfg: &CollisionConfig, model: &PhaseShiftModel) -> Result<(ScatteredWave, f64)> {
    let eps2 = epsilon_sq_quadrature_with(cfg, model, 200)?;
    if eps2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((ScatteredWave::new(*cfg, model.clone())?, eps2))
}

/// Monte Carlo estimate of `int int |Psi(k1, k2)|^2`; should be 1.
pub fn mc_shell_norm(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    let (wave, eps2) = shell_setup(cfg, model)?;
    let pair = wave.pair_state(eps2)?;
    let proposal = ShellProposal::new(cfg);
    mc::estimate(seed, 2 << 32, n_samples, |rng| {
        let (total, rel, log_p) = proposal.sample(rng);
        let w = pair.eval_cm_rel(&total, &rel)?.norm_sqr() * (-log_p).exp();
        finite(w, "shell norm integrand")
    })
}

/// Direct 12-D Monte Carlo estimate of
/// `int Psi(k1,k2) Psi(k3,k4) Psi*(k1,k4) Psi*(k3,k2)`, the purity of the
/// scattered pair state.
pub fn mc_shell_purity(
    cfg: &CollisionConfig,
    model: &PhaseShiftModel,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    let (wave, eps2) = shell_setup(cfg, model)?;
    let pair = wave.pair_state(eps2)?;
    let proposal = ShellProposal::new(cfg);
    mc::estimate(seed, 3 << 32, n_samples, |rng| {
        let (ka, qa, log_pa) = proposal.sample(rng);
        let (kb, qb, log_pb) = proposal.sample(rng);
        let (k1, k2) = rel_cm(&ka, &qa);
        let (k3, k4) = rel_cm(&kb, &qb);
        let f = pair.eval(&k1, &k2)?
            * pair.eval(&k3, &k4)?
            * pair.eval(&k1, &k4)?.conj()
            * pair.eval(&k3, &k2)?.conj();
        finite(f.re * (-(log_pa + log_pb)).exp(), "shell purity integrand")
    })
}

fn finite(w: f64, context: &'static str) -> Result<f64> {
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::NonFinite { context })
    }
}

/// Uniform random rotation, used to test frame independence.
pub fn random_rotation(rng: &mut impl Rng) -> Rotation3<f64> {
    let axis = loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() > 1e-3 && v.norm() <= 1.0 {
            break v;
        }
    };
    let angle = rng.random_range(0.0..PI);
    Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> (Vec<f64>, Vec<f64>) {
        GaussLegendreRule::new(12).unwrap().mapped(0.5, 1.5)
    }

    fn radial(k: f64) -> f64 {
        (-(k - 1.0).powi(2) * 8.0).exp()
    }

    #[test]
    fn angle_independent_amplitude_is_pure_s() {
        let (x, w) = small_grid();
        let d = decompose_pair_amplitude(
            |a, b| Ok(Complex64::new(radial(a.norm()) * radial(b.norm()), 0.0)),
            &x,
            &w,
            AngularGrid::Full,
            64,
            12,
            &Rotation3::identity(),
        )
        .unwrap();
        let weights = d.sector_weights();
        assert!((weights[0] - 1.0).abs() < 1e-12);
        assert!(weights[1..].iter().all(|w| *w < 1e-12));
        // rank-1 radial product in a single sector
        assert!((shell_purity(&d) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cosine_amplitude_is_pure_p() {
        let (x, w) = small_grid();
        let d = decompose_pair_amplitude(
            |a, b| {
                let c = a.dot(b) / (a.norm() * b.norm());
                Ok(Complex64::new(0.3, -1.0) * radial(a.norm()) * radial(b.norm()) * c)
            },
            &x,
            &w,
            AngularGrid::Full,
            64,
            12,
            &Rotation3::identity(),
        )
        .unwrap();
        let weights = d.sector_weights();
        assert!((3.0 * weights[1] - 1.0).abs() < 1e-12);
        for (l, w) in weights.iter().enumerate() {
            if l != 1 {
                assert!(*w < 1e-12, "sector {l}: {w}");
            }
        }
        // Y_1m Y_1m* sum: three equal Schmidt blocks -> purity 1/3
        assert!((shell_purity(&d) - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn insufficient_l_max_reported() {
        let (x, w) = small_grid();
        let err = decompose_pair_amplitude(
            |a, b| {
                let c = a.dot(b) / (a.norm() * b.norm());
                Ok(Complex64::new((-(40.0 * (1.0 + c))).exp(), 0.0))
            },
            &x,
            &w,
            AngularGrid::Full,
            64,
            8,
            &Rotation3::identity(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientLmax { l_max: 8, .. }));
    }

    #[test]
    fn l_max_floor_enforced() {
        let (x, w) = small_grid();
        let r = decompose_pair_amplitude(
            |_, _| Ok(Complex64::new(1.0, 0.0)),
            &x,
            &w,
            AngularGrid::Full,
            16,
            4,
            &Rotation3::identity(),
        );
        assert!(r.is_err());
    }
}
