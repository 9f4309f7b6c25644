//! Collision parameters, gaussian packets and center-of-mass / relative
//! coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Physical parameters of the collision, in units with `hbar = mu = 1`.
///
/// `r0` is the scalar that appears in the outgoing-wave phase
/// `exp(i (k - k0) r0)`: the relative coordinate starts at `-r0` along the
/// beam axis and moves toward the origin with mean momentum `k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionConfig {
    sigma0: f64,
    k0: f64,
    r0: f64,
    t: f64,
}

impl CollisionConfig {
    pub fn new(sigma0: f64, k0: f64, r0: f64, t: f64) -> Result<Self> {
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(invalid("sigma0", format!("must be finite and > 0, got {sigma0}")));
        }
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(invalid("k0", format!("must be finite and > 0, got {k0}")));
        }
        if !(r0.is_finite() && r0 >= 0.0) {
            return Err(invalid("r0", format!("must be finite and >= 0, got {r0}")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
        }
        Ok(Self { sigma0, k0, r0, t })
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_sigma0(&self, sigma0: f64) -> Result<Self> {
        Self::new(sigma0, self.k0, self.r0, self.t)
    }

    pub fn with_k0(&self, k0: f64) -> Result<Self> {
        Self::new(self.sigma0, k0, self.r0, self.t)
    }

    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        Self::new(self.sigma0, self.k0, r0, self.t)
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.sigma0, self.k0, self.r0, t)
    }

    /// Momentum width relative to the mean momentum.
    pub fn sigma0_over_k0(&self) -> f64 {
        self.sigma0 / self.k0
    }

    /// `sigma0^2 r0 / (2 k0)`, the square root of `gamma^2 - 1`.
    pub fn spreading_ratio(&self) -> f64 {
        self.sigma0 * self.sigma0 * self.r0 / (2.0 * self.k0)
    }

    pub fn derived_scales(&self) -> DerivedScales {
        derived_scales(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Growth factor of the spatial packet width at the collision time.
    pub gamma_sq: f64,
    /// Momentum width at the collision time, `sigma0 / gamma`.
    pub sigma_c: f64,
    /// Collision time `r0 / k0`.
    pub t_col: f64,
}

pub fn derived_scales(cfg: &CollisionConfig) -> DerivedScales {
    let s = cfg.spreading_ratio();
    let gamma_sq = 1.0 + s * s;
    DerivedScales {
        gamma_sq,
        sigma_c: cfg.sigma0 / gamma_sq.sqrt(),
        t_col: cfg.r0 / cfg.k0,
    }
}

/// Beam axis and sign conventions of the head-on collision.
///
/// Particle 1 starts at `-r0/2 * axis` with mean momentum `+k0 * axis`,
/// particle 2 at `+r0/2 * axis` with mean momentum `-k0 * axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    axis: Vec3,
}

impl Default for BeamGeometry {
    fn default() -> Self {
        Self { axis: Vec3::z() }
    }
}

impl BeamGeometry {
    pub fn new(axis: Vec3) -> Result<Self> {
        let n = axis.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("axis", "must be a finite nonzero vector"));
        }
        Ok(Self { axis: axis / n })
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    /// Mean momentum of particle 1 (particle 2 carries the opposite).
    pub fn mean_momentum(&self, cfg: &CollisionConfig) -> Vec3 {
        cfg.k0 * self.axis
    }

    /// Vector `r0` in the single-particle phases `exp(-+ i (k -+ k0) . r0 / 2)`.
    /// It points against the beam so that the packets approach each other.
    pub fn separation(&self, cfg: &CollisionConfig) -> Vec3 {
        -cfg.r0 * self.axis
    }
}

/// Normalized gaussian `(c^2 / 2 pi)^(3/4) exp(-c^2 (a - b)^2 / 4)` with
/// inverse width `c`.
pub fn gaussian_gamma(a: &Vec3, b: &Vec3, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid("c", format!("inverse width must be > 0, got {c}")));
    }
    Ok(gamma_unchecked((a - b).norm_squared(), c))
}

/// `Gamma` as a function of the squared distance from its peak.
pub(crate) fn gamma_unchecked(dist_sq: f64, c: f64) -> f64 {
    let c2 = c * c;
    (c2 / (2.0 * PI)).powf(0.75) * (-0.25 * c2 * dist_sq).exp()
}

/// Total and relative momenta `(k1 + k2, (k1 - k2) / 2)`.
pub fn cm_rel(k1: &Vec3, k2: &Vec3) -> (Vec3, Vec3) {
    (k1 + k2, 0.5 * (k1 - k2))
}

/// Inverse of [`cm_rel`].
pub fn rel_cm(total: &Vec3, rel: &Vec3) -> (Vec3, Vec3) {
    (0.5 * total + rel, 0.5 * total - rel)
}

/// Packet of particle 1 at `t = 0`.
pub fn packet_one(k1: &Vec3, cfg: &CollisionConfig, geom: &BeamGeometry) -> Complex64 {
    let c = std::f64::consts::SQRT_2 / cfg.sigma0;
    let d = k1 - geom.mean_momentum(cfg);
    let phase = -0.5 * d.dot(&geom.separation(cfg));
    Complex64::from_polar(gamma_unchecked(d.norm_squared(), c), phase)
}

/// Packet of particle 2 at `t = 0`.
pub fn packet_two(k2: &Vec3, cfg: &CollisionConfig, geom: &BeamGeometry) -> Complex64 {
    let c = std::f64::consts::SQRT_2 / cfg.sigma0;
    let d = k2 + geom.mean_momentum(cfg);
    let phase = 0.5 * d.dot(&geom.separation(cfg));
    Complex64::from_polar(gamma_unchecked(d.norm_squared(), c), phase)
}

/// Free single-particle phase `exp(-i k^2 t / 4)`.
pub fn free_phase(k: &Vec3, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -0.25 * k.norm_squared() * t)
}

/// Initial product state `phi1(k1) phi2(k2)`.
pub fn initial_amplitude(
    k1: &Vec3,
    k2: &Vec3,
    cfg: &CollisionConfig,
    geom: &BeamGeometry,
) -> Complex64 {
    packet_one(k1, cfg, geom) * packet_two(k2, cfg, geom)
}

/// Freely propagated product state at time `cfg.t()`.
pub fn free_amplitude(
    k1: &Vec3,
    k2: &Vec3,
    cfg: &CollisionConfig,
    geom: &BeamGeometry,
) -> Complex64 {
    initial_amplitude(k1, k2, cfg, geom) * free_phase(k1, cfg.t) * free_phase(k2, cfg.t)
}

/// Center-of-mass factor `Gamma(K, 0; 1/sigma0) exp(-i K^2 t / 8)`.
pub fn cm_amplitude(total: &Vec3, cfg: &CollisionConfig) -> Complex64 {
    let k2 = total.norm_squared();
    Complex64::from_polar(
        gamma_unchecked(k2, 1.0 / cfg.sigma0),
        -0.125 * k2 * cfg.t,
    )
}

/// Freely propagated relative packet
/// `Gamma(k, k0 axis; 2/sigma0) exp(-i (k - k0 axis) . r0) exp(-i k^2 t / 2)`.
pub fn relative_packet(rel: &Vec3, cfg: &CollisionConfig, geom: &BeamGeometry) -> Complex64 {
    let d = rel - geom.mean_momentum(cfg);
    let phase = -d.dot(&geom.separation(cfg)) - 0.5 * rel.norm_squared() * cfg.t;
    Complex64::from_polar(gamma_unchecked(d.norm_squared(), 2.0 / cfg.sigma0), phase)
}
