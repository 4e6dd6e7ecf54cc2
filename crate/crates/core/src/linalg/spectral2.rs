//! Closed-form spectral decomposition of 2×2 Hermitian matrices.
//!
//! A Hermitian 2×2 matrix is p·I + q·X + r·Y + s·Z with real coefficients;
//! its eigenvalues are p ∓ |(q,r,s)| and the eigenprojectors are
//! (I ∓ n·σ)/2 with n the unit Bloch vector. Working in this parametrization
//! keeps every quantity exact up to a single square root and avoids
//! eigenvector phase gauge entirely: consumers only ever see projectors.

use super::{ComplexMatrix, DEGENERACY_TOL, ONE_C, ZERO_C};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Eigenvalues and eigenprojectors of a 2×2 Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition2 {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub projector_min: ComplexMatrix,
    pub projector_max: ComplexMatrix,
}

impl SpectralDecomposition2 {
    /// Spectral gap Δ = λ_max − λ_min ≥ 0.
    pub fn gap(&self) -> f64 {
        self.lambda_max - self.lambda_min
    }

    /// λ_min Π_min + λ_max Π_max.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.projector_min
            .scale(Complex64::new(self.lambda_min, 0.0))
            .add(&self.projector_max.scale(Complex64::new(self.lambda_max, 0.0)))
    }
}

/// Real Pauli coefficients [p, q, r, s] of a Hermitian 2×2 matrix
/// M = p·I + q·X + r·Y + s·Z. Checks Hermiticity first.
pub fn pauli_vector(m: &ComplexMatrix) -> Result<[f64; 4]> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2x2, got {}x{}", m.rows(), m.cols())));
    }
    let h = m.symmetrized_hermitian()?;
    Ok(pauli_vector_unchecked(&h))
}

pub(crate) fn pauli_vector_unchecked(h: &ComplexMatrix) -> [f64; 4] {
    let p = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let s = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let q = 0.5 * (h[(0, 1)].re + h[(1, 0)].re);
    let r = 0.5 * (h[(1, 0)].im - h[(0, 1)].im);
    [p, q, r, s]
}

/// M = p·I + q·X + r·Y + s·Z from real coefficients.
pub fn matrix_from_pauli_vector([p, q, r, s]: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(p + s, 0.0), Complex64::new(q, -r)],
        vec![Complex64::new(q, r), Complex64::new(p - s, 0.0)],
    ])
}

/// Spectral decomposition of a 2×2 Hermitian matrix.
///
/// Degenerate spectra (gap < 1e-12) get the canonical resolution
/// Π_min = |1><1|, Π_max = |0><0| so output is deterministic.
pub fn spectral_decompose_2x2(m: &ComplexMatrix) -> Result<SpectralDecomposition2> {
    let [p, q, r, s] = pauli_vector(m)?;
    let g = (q * q + r * r + s * s).sqrt();
    let lambda_min = p - g;
    let lambda_max = p + g;
    if 2.0 * g < DEGENERACY_TOL {
        let mut pmin = ComplexMatrix::zeros(2, 2);
        pmin[(1, 1)] = ONE_C;
        let mut pmax = ComplexMatrix::zeros(2, 2);
        pmax[(0, 0)] = ONE_C;
        return Ok(SpectralDecomposition2 { lambda_min, lambda_max, projector_min: pmin, projector_max: pmax });
    }
    let (nq, nr, ns) = (q / g, r / g, s / g);
    // Π_max = (I + n·σ)/2, Π_min = (I − n·σ)/2.
    let pmax = ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.5 * (1.0 + ns), 0.0), Complex64::new(0.5 * nq, -0.5 * nr)],
        vec![Complex64::new(0.5 * nq, 0.5 * nr), Complex64::new(0.5 * (1.0 - ns), 0.0)],
    ]);
    let pmin = ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.5 * (1.0 - ns), 0.0), Complex64::new(-0.5 * nq, 0.5 * nr)],
        vec![Complex64::new(-0.5 * nq, -0.5 * nr), Complex64::new(0.5 * (1.0 + ns), 0.0)],
    ]);
    debug_assert!(pmax.add(&pmin).sub(&ComplexMatrix::identity(2)).max_abs() < 1e-14);
    let _ = ZERO_C;
    Ok(SpectralDecomposition2 { lambda_min, lambda_max, projector_min: pmin, projector_max: pmax })
}

/// Spectral gap λ_max − λ_min of a 2×2 Hermitian matrix.
pub fn spectral_gap_2x2(m: &ComplexMatrix) -> Result<f64> {
    let [_, q, r, s] = pauli_vector(m)?;
    Ok(2.0 * (q * q + r * r + s * s).sqrt())
}
