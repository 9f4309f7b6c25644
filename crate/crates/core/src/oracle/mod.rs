//! Numerical checks that do not share code paths with [`crate::analytic`]:
//! Gauss-Legendre quadrature of the scattered norm and of the overlap
//! integrals, importance-sampled Monte Carlo, exact purities of small grid
//! states, and a Legendre-sector purity of the scattered shell.

pub mod grid;
pub mod mc;
pub mod overlap;
pub mod quadrature;
pub mod shell;

pub use grid::{expansion_check, grid_purity_exact, ExpansionResidual, GridState};
pub use mc::{mc_stream, McEstimate, McStream};
pub use overlap::{
    epsilon_sq_quadrature, epsilon_sq_quadrature_with, mc_overlap_i2_i3, overlap_i1,
    overlap_i1_with,
};
pub use quadrature::GaussLegendreRule;
pub use shell::{
    auto_l_max, decompose_pair_amplitude, mc_shell_norm, mc_shell_purity, random_rotation,
    shell_purity, shell_sector_decompose, shell_sector_decompose_in_frame, AngularGrid,
    RadialGridSpec, SectorDecomposition,
};
