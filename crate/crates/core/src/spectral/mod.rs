//! Diagonalization of sector Jacobi operators and the resulting spectral data.

mod tridiagonal;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use tridiagonal::{eigenvalues_bisection, eigenvalues_tridiagonal, sturm_count};

use crate::error::{Error, Result};
use crate::fock_sector::SectorIndex;
use crate::hamiltonian::{gauge_real, jacobi_operator, JacobiOperator, ModelSpec};
use crate::polynomials::recurrence_eval_at_eigenvalue;

/// Relative eigenvalue gap below which the spectrum is declared degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// Spectral decomposition of one sector.
///
/// `coeffs[(n, l)]` holds `P_n(E_l)` in the real gauge; the polynomial of
/// the complex operator is `exp(i gauge[n]) coeffs[(n, l)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub coeffs: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub gauge: Vec<f64>,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn coeff(&self, n: usize, l: usize) -> Complex64 {
        Complex64::from_polar(self.coeffs[(n, l)], self.gauge[n])
    }

    /// Orthonormal eigenvectors as columns, in the original gauge.
    pub fn eigenvectors(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |n, l| self.coeff(n, l) * self.weights[l].sqrt())
    }

    /// `sum_l E_l w_l P_n(E_l) conj(P_m(E_l))`, which rebuilds the operator.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |n, m| {
            (0..d)
                .map(|l| self.coeff(n, l) * self.coeff(m, l).conj() * (self.eigenvalues[l] * self.weights[l]))
                .sum()
        })
    }
}

/// Spectral data of an arbitrary Jacobi operator.
pub fn decompose_jacobi(j: &JacobiOperator) -> Result<SpectralData> {
    let real = gauge_real(j);
    if let Some(n) = real.offdiag.iter().position(|&b| b == 0.0) {
        return Err(Error::VanishingCoupling(n));
    }
    let eigenvalues = eigenvalues_tridiagonal(&real.diag, &real.offdiag)?;
    let scale = j.norm_bound().max(f64::MIN_POSITIVE);
    for (i, w) in eigenvalues.windows(2).enumerate() {
        if w[1] - w[0] < DEGENERACY_GAP * scale {
            return Err(Error::DegenerateSpectrum { i, j: i + 1, ei: w[0], ej: w[1] });
        }
    }
    let d = eigenvalues.len();
    let mut coeffs = DMatrix::zeros(d, d);
    let mut weights = Vec::with_capacity(d);
    for (l, &e) in eigenvalues.iter().enumerate() {
        let p = recurrence_eval_at_eigenvalue(&real.diag, &real.offdiag, e)?;
        let norm2: f64 = p.iter().map(|x| x * x).sum();
        for (n, v) in p.into_iter().enumerate() {
            coeffs[(n, l)] = v;
        }
        weights.push(1.0 / norm2);
    }
    Ok(SpectralData { eigenvalues, coeffs, weights, gauge: real.chi })
}

pub fn spectral_decomposition(model: &ModelSpec, mu: &SectorIndex) -> Result<SpectralData> {
    decompose_jacobi(&jacobi_operator(model, mu)?)
}

/// `max_{n,m} |sum_l conj(P_n(E_l)) P_m(E_l) w_l - delta_{nm}|`.
pub fn verify_orthonormality(s: &SpectralData) -> f64 {
    let d = s.dim();
    let mut worst = 0.0_f64;
    for n in 0..d {
        for m in 0..d {
            let sum: f64 = (0..d).map(|l| s.coeffs[(n, l)] * s.coeffs[(m, l)] * s.weights[l]).sum();
            let target = if n == m { 1.0 } else { 0.0 };
            worst = worst.max((sum - target).abs());
        }
    }
    worst
}

/// `max_{l,k} |w_l sum_n conj(P_n(E_l)) P_n(E_k) - delta_{lk}|`, the
/// orthogonality of the `sqrt(w)`-scaled coefficient matrix across eigenvalues.
pub fn verify_dual_orthogonality(s: &SpectralData) -> f64 {
    let d = s.dim();
    let mut worst = 0.0_f64;
    for l in 0..d {
        for k in 0..d {
            let sum: f64 = (0..d).map(|n| s.coeffs[(n, l)] * s.coeffs[(n, k)]).sum();
            let scaled = sum * (s.weights[l] * s.weights[k]).sqrt();
            let target = if l == k { 1.0 } else { 0.0 };
            worst = worst.max((scaled - target).abs());
        }
    }
    worst
}
