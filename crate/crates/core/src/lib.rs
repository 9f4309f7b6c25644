//! Loss of purity generated by a head-on, low-energy s-wave collision of two
//! gaussian wave packets in three dimensions.
//!
//! Units are fixed to `hbar = mu = 1` (`mu` the reduced mass), so each
//! particle has mass 2 and a free single-particle plane wave picks up the
//! phase `exp(-i k^2 t / 4)`.
//!
//! * [`packet`]: configuration, gaussian packets and coordinate transforms.
//! * [`phase_shift`]: s-wave phase-shift models, amplitude and cross section.
//! * [`analytic`]: closed-form scattered wave, scattered norm and purity laws.
//! * [`oracle`]: independent quadrature, Monte Carlo and exact-grid checks.

pub mod analytic;
pub mod error;
pub mod oracle;
pub mod packet;
pub mod phase_shift;

pub use analytic::{
    epsilon_sq, purity, purity_from_expansion, purity_narrow, PurityMethod, PurityReport,
    RegimeDiagnostics, ScatteredWave, PERTURBATIVE_THRESHOLD,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use packet::{BeamGeometry, CollisionConfig, DerivedScales, Vec3};
pub use phase_shift::{PhaseShiftModel, TabulatedPhase, ThetaDerivs};
