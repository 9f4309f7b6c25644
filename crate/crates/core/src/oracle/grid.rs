//! Exact purities of two-particle states on finite single-particle bases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::analytic::purity_from_expansion;
use crate::error::{invalid, Error, Result};

/// A two-particle amplitude `psi[(i, j)]` with quadrature weights for the
/// index of each particle.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    psi: DMatrix<Complex64>,
    weights1: DVector<f64>,
    weights2: DVector<f64>,
}

impl GridState {
    pub fn new(
        psi: DMatrix<Complex64>,
        weights1: DVector<f64>,
        weights2: DVector<f64>,
    ) -> Result<Self> {
        if weights1.len() != psi.nrows() || weights2.len() != psi.ncols() {
            return Err(invalid("weights", "length does not match the amplitude shape"));
        }
        if weights1.iter().chain(weights2.iter()).any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("weights", "must be finite and > 0"));
        }
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("psi", "entries must be finite"));
        }
        let state = Self {
            psi,
            weights1,
            weights2,
        };
        if state.norm_sqr() == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(state)
    }

    /// Unit weights on both particles.
    pub fn uniform(psi: DMatrix<Complex64>) -> Result<Self> {
        let (n1, n2) = psi.shape();
        Self::new(psi, DVector::from_element(n1, 1.0), DVector::from_element(n2, 1.0))
    }

    pub fn psi(&self) -> &DMatrix<Complex64> {
        &self.psi
    }

    pub fn weights1(&self) -> &DVector<f64> {
        &self.weights1
    }

    pub fn weights2(&self) -> &DVector<f64> {
        &self.weights2
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.psi.ncols() {
            for i in 0..self.psi.nrows() {
                s += self.psi[(i, j)].norm_sqr() * self.weights1[i] * self.weights2[j];
            }
        }
        s
    }

    /// Amplitude rescaled by `sqrt(w1_i w2_j)`, so the weights become an
    /// orthonormal-basis inner product.
    fn weighted(&self) -> DMatrix<Complex64> {
        let mut b = self.psi.clone();
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                b[(i, j)] *= (self.weights1[i] * self.weights2[j]).sqrt();
            }
        }
        b
    }
}

/// `Tr rho1^2` for the normalized state, with `rho1 = Tr_2 |psi><psi|`.
pub fn grid_purity_exact(state: &GridState) -> Result<f64> {
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(purity_of_weighted(&state.weighted()) / (norm * norm))
}

/// `||B^dagger B||_F^2 = Tr (B B^dagger)^2` for an unnormalized coefficient
/// matrix; the smaller Gram matrix is formed.
pub(crate) fn purity_of_weighted(b: &DMatrix<Complex64>) -> f64 {
    let gram = if b.nrows() <= b.ncols() {
        b * b.adjoint()
    } else {
        b.adjoint() * b
    };
    gram.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResidual {
    pub p_exact: f64,
    pub p_formula: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `|p_exact - p_formula|`
    pub residual: f64,
    /// `residual / eps^3`
    pub ratio_to_eps_cubed: f64,
}

const UNIT_TOLERANCE: f64 = 1e-10;

/// Compares the exact purity of `(phi1 phi2 + eps phi_s) / sqrt(N)` with the
/// second-order expansion whose overlaps are computed as discrete inner
/// products.
pub fn expansion_check(
    phi1: &DVector<Complex64>,
    phi2: &DVector<Complex64>,
    phi_s: &DMatrix<Complex64>,
    eps: f64,
) -> Result<ExpansionResidual> {
    if phi_s.shape() != (phi1.len(), phi2.len()) {
        return Err(invalid("phi_s", "shape must be (len(phi1), len(phi2))"));
    }
    for (name, n) in [
        ("phi1", phi1.norm_squared()),
        ("phi2", phi2.norm_squared()),
        ("phi_s", phi_s.norm_squared()),
    ] {
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(invalid(name, format!("must have unit norm, got {n}")));
        }
    }
    if !(0.0..=0.2).contains(&eps) {
        return Err(invalid("eps", format!("must lie in [0, 0.2], got {eps}")));
    }

    let product = phi1 * phi2.transpose();
    let psi = &product + phi_s * Complex64::new(eps, 0.0);
    let p_exact = grid_purity_exact(&GridState::uniform(psi)?)?;

    let i1 = phi_s.iter().zip(product.iter()).map(|(s, a)| s.conj() * a).sum::<Complex64>().norm_sqr();
    // project particle 1 onto phi1, particle 2 onto phi2
    let i2 = (phi_s.adjoint() * phi1).norm_squared();
    let i3 = (phi_s.conjugate() * phi2).norm_squared();
    let p_formula = purity_from_expansion(eps * eps, i1, i2, i3)?;
    let residual = (p_exact - p_formula).abs();
    Ok(ExpansionResidual {
        p_exact,
        p_formula,
        i1,
        i2,
        i3,
        residual,
        ratio_to_eps_cubed: if eps > 0.0 { residual / eps.powi(3) } else { 0.0 },
    })
}
