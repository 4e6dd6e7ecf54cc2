//! Pauli-basis machinery for 2-local terms.
//!
//! A two-qubit Hermitian term h on qubits (s, r) expands about either qubit
//! as h = Σ_α A^(α) ⊗ σ^(α), with the four Hermitian components A^(α) acting
//! on the chosen qubit and the Pauli basis on its partner. The components are
//! recovered by A^(α) = ½ Tr_partner[(I ⊗ σ^(α)) h]. Gap classification of
//! these components drives the snap/pinch staging of the rounding algorithm.
//!
//! Layout convention used everywhere: in a 4×4 term matrix the *lower* qubit
//! index is the left tensor factor.

use crate::error::{Error, Result};
use crate::linalg::{commutator, operator_norm, partial_trace, spectral_gap_2x2, ComplexMatrix, Keep, ONE_C};
use num_complex::Complex64;

/// Single-qubit Pauli basis index: 0 = I, 1 = X, 2 = Y, 3 = Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

pub const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl Pauli {
    pub fn from_index(alpha: usize) -> Result<Self> {
        match alpha {
            0 => Ok(Pauli::I),
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            _ => Err(Error::InvalidPauliIndex(alpha)),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The standard 2×2 matrix σ^(α).
    pub fn matrix(self) -> ComplexMatrix {
        let c = Complex64::new;
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]),
            Pauli::Y => ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]),
            Pauli::Z => ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]),
        }
    }
}

/// σ^(α) by index, erroring on out-of-range α.
pub fn pauli_basis(alpha: usize) -> Result<ComplexMatrix> {
    Ok(Pauli::from_index(alpha)?.matrix())
}

/// Which of a 2-local term's support qubits a decomposition is taken about.
/// `Lower` is the left tensor factor of the 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Lower => Side::Upper,
            Side::Upper => Side::Lower,
        }
    }
}

/// Local Pauli decomposition of a 2-local term about one of its qubits.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub about_qubit: u32,
    pub partner_qubit: u32,
    /// Components A^(0..3) acting on `about_qubit`; σ^(α) sits on the partner.
    pub components: [ComplexMatrix; 4],
}

impl LocalDecomposition {
    /// Σ_α A^(α) ⊗ σ^(α), ordered by actual qubit positions.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4, 4);
        for (alpha, comp) in self.components.iter().enumerate() {
            let sigma = PAULIS[alpha].matrix();
            let contrib = if self.about_qubit < self.partner_qubit {
                comp.kron(&sigma)
            } else {
                sigma.kron(comp)
            };
            out.add_assign(&contrib);
        }
        out
    }
}

/// Components of a Hermitian 4×4 term about one side,
/// A^(α) = ½ Tr_partner[(I ⊗ σ^(α)) · term].
pub fn decompose_about(term: &ComplexMatrix, about: Side) -> Result<[ComplexMatrix; 4]> {
    if term.rows() != 4 || term.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "expected 4x4 term, got {}x{}",
            term.rows(),
            term.cols()
        )));
    }
    let h = term.symmetrized_hermitian()?;
    let ident = ComplexMatrix::identity(2);
    let half = Complex64::new(0.5, 0.0);
    let mut out: [ComplexMatrix; 4] = std::array::from_fn(|_| ComplexMatrix::zeros(2, 2));
    for alpha in 0..4 {
        let sigma = PAULIS[alpha].matrix();
        let (weighted, keep) = match about {
            Side::Lower => (ident.kron(&sigma).mul(&h), Keep::First),
            Side::Upper => (sigma.kron(&ident).mul(&h), Keep::Second),
        };
        out[alpha] = partial_trace(&weighted, 2, 2, keep)?.scale(half);
    }
    Ok(out)
}

/// Spectral gap λ_max − λ_min of a 2×2 Hermitian matrix.
pub fn spectral_gap(h: &ComplexMatrix) -> Result<f64> {
    spectral_gap_2x2(h)
}

/// Witness of a gapped decomposition: the maximizing component index and its gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWitness {
    pub alpha: usize,
    pub gap: f64,
}

/// Whether some component of the decomposition about `about` has spectral
/// gap ≥ eta. The witness maximizes the gap; ties go to the smallest α.
/// Comparison is exact (≥ eta, no slack): the thresholds η are themselves
/// derived quantities and slack would double-count tolerance.
pub fn is_gapped(term: &ComplexMatrix, about: Side, eta: f64) -> Result<(bool, Option<GapWitness>)> {
    let components = decompose_about(term, about)?;
    gapped_witness(&components, eta)
}

/// Gap check over an explicit component list (shared with 1-local staging).
pub fn gapped_witness(components: &[ComplexMatrix], eta: f64) -> Result<(bool, Option<GapWitness>)> {
    let mut best: Option<GapWitness> = None;
    for (alpha, comp) in components.iter().enumerate() {
        let gap = spectral_gap(comp)?;
        if best.map_or(true, |b| gap > b.gap) {
            best = Some(GapWitness { alpha, gap });
        }
    }
    match best {
        Some(w) if w.gap >= eta => Ok((true, Some(w))),
        _ => Ok((false, None)),
    }
}

/// Max over α, β of ||[A^(α), B^(β)]|| for the shared-qubit components of two
/// 2-local terms overlapping in exactly one qubit. The propagation theorem
/// guarantees this never exceeds ||[h1, h2]|| on the joint space.
pub fn propagation_check(
    term1: &ComplexMatrix,
    support1: (u32, u32),
    term2: &ComplexMatrix,
    support2: (u32, u32),
    shared: u32,
) -> Result<f64> {
    let s1 = [support1.0, support1.1];
    let s2 = [support2.0, support2.1];
    let overlap: Vec<u32> = s1.iter().copied().filter(|q| s2.contains(q)).collect();
    if overlap.len() != 1 || overlap[0] != shared || support1.0 == support1.1 || support2.0 == support2.1 {
        return Err(Error::DimensionMismatch(format!(
            "supports {s1:?} and {s2:?} must overlap in exactly the shared qubit {shared}"
        )));
    }
    let side = |sup: [u32; 2]| if sup[0] == shared { Side::Lower } else { Side::Upper };
    let a = decompose_about(term1, side(s1))?;
    let b = decompose_about(term2, side(s2))?;
    let mut worst = 0.0f64;
    for ai in &a {
        for bj in &b {
            worst = worst.max(operator_norm(&commutator(ai, bj)?)?);
        }
    }
    let _ = ONE_C;
    Ok(worst)
}
