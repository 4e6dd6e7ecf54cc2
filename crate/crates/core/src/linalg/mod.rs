//! Dense complex linear algebra, exact at machine precision for matrices up
//! to 2^12 × 2^12.
//!
//! This module is both the workhorse for the 2×2/4×4 arithmetic inside the
//! rounding core and the brute-force oracle used by the verification layer.
//! Everything is deterministic: no threading, no platform-dependent BLAS, the
//! same input bytes always produce the same output bytes.

mod eigen;
mod expm;
mod lanczos;
mod spectral2;

pub use eigen::hermitian_eig;
pub use expm::matrix_exponential;
pub use lanczos::{extremal_eigenvalues_iter, ground_energy_iter};
pub use spectral2::{
    matrix_from_pauli_vector, pauli_vector, spectral_decompose_2x2, spectral_gap_2x2,
    SpectralDecomposition2,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Index, IndexMut};

/// Absolute entrywise tolerance for accepting a matrix as Hermitian.
/// Inputs that pass are symmetrized to (M + M†)/2 so the rest of the code
/// can assume exact Hermiticity.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Spectral gaps below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Hard cap on dense work: 12 qubits, i.e. 4096-dimensional matrices.
pub const MAX_QUBITS: u32 = 12;

/// Square (or rectangular) complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

pub const ZERO_C: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE_C: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I_C: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO_C; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE_C;
        }
        m
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)))
        }
    }

    pub fn require_dense_cap(&self) -> Result<()> {
        if self.rows > (1usize << MAX_QUBITS) {
            return Err(Error::DimensionCap { dim: self.rows, max_qubits: MAX_QUBITS });
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Matrix product, cache-friendly ikj loop.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let arow = self.row(i);
            let orow = &mut out.data[i * m..(i + 1) * m];
            for (l, &a_il) in arow.iter().enumerate().take(k) {
                if a_il == ZERO_C {
                    continue;
                }
                let brow = &other.data[l * m..(l + 1) * m];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a_il * b;
                }
            }
        }
        out
    }

    /// Kronecker product, `self` as the left factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO_C {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum (the induced 1-norm).
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += self[(i, j)].norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, max |M[i][j] - conj(M[j][i])|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// Check Hermiticity against `HERMITICITY_TOL` and return (M + M†)/2.
    pub fn symmetrized_hermitian(&self) -> Result<Self> {
        self.require_square()?;
        let dev = self.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev, tol: HERMITICITY_TOL });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5))
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Commutator [A, B] = AB - BA.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square()?;
    b.require_square()?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {}x{} with {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.mul(b).sub(&b.mul(a)))
}

/// Operator norm (largest singular value).
///
/// Hermitian inputs take the direct route max |eig(M)|; general inputs go
/// through the Hermitian eigensolve of M†M. Exact at these sizes.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    m.require_square()?;
    if m.rows() == 0 {
        return Ok(0.0);
    }
    if m.rows() == 1 {
        return Ok(m[(0, 0)].norm());
    }
    if m.is_hermitian(HERMITICITY_TOL) {
        if m.rows() == 2 {
            let [p, q, r, s] = pauli_vector(m)?;
            let g = (q * q + r * r + s * s).sqrt();
            return Ok((p + g).abs().max((p - g).abs()));
        }
        let (vals, _) = hermitian_eig(m, false)?;
        return Ok(vals.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())));
    }
    let gram = m.dagger().mul(m);
    let (vals, _) = hermitian_eig(&gram, false)?;
    Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Trace norm (sum of singular values). For Hermitian inputs this is the sum
/// of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    m.require_square()?;
    if m.is_hermitian(HERMITICITY_TOL) {
        let (vals, _) = hermitian_eig(m, false)?;
        return Ok(vals.iter().map(|v| v.abs()).sum());
    }
    let gram = m.dagger().mul(m);
    let (vals, _) = hermitian_eig(&gram, false)?;
    Ok(vals.iter().map(|v| v.max(0.0).sqrt()).sum())
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of a matrix on a d1·d2-dimensional product space.
pub fn partial_trace(m: &ComplexMatrix, d1: usize, d2: usize, keep: Keep) -> Result<ComplexMatrix> {
    m.require_square()?;
    if m.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "cannot factor dimension {} as {} x {}",
            m.rows(),
            d1,
            d2
        )));
    }
    match keep {
        Keep::First => {
            let mut out = ComplexMatrix::zeros(d1, d1);
            for i in 0..d1 {
                for j in 0..d1 {
                    let mut s = ZERO_C;
                    for k in 0..d2 {
                        s += m[(i * d2 + k, j * d2 + k)];
                    }
                    out[(i, j)] = s;
                }
            }
            Ok(out)
        }
        Keep::Second => {
            let mut out = ComplexMatrix::zeros(d2, d2);
            for k in 0..d2 {
                for l in 0..d2 {
                    let mut s = ZERO_C;
                    for i in 0..d1 {
                        s += m[(i * d2 + k, i * d2 + l)];
                    }
                    out[(k, l)] = s;
                }
            }
            Ok(out)
        }
    }
}

fn check_support(support: &[u32], n: u32) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::DimensionCap { dim: 1usize << n.min(40), max_qubits: MAX_QUBITS });
    }
    for (idx, &q) in support.iter().enumerate() {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
        if support[..idx].contains(&q) {
            return Err(Error::DimensionMismatch(format!("support index {q} repeated")));
        }
    }
    Ok(())
}

/// Bit position of qubit `q` within an n-qubit basis index. Qubit 0 is the
/// leftmost (most significant) tensor factor.
#[inline]
fn bit_of(q: u32, n: u32) -> u32 {
    n - 1 - q
}

/// Embed a 2^k-dimensional operator acting on `support` into the full
/// 2^n-dimensional space, identity on all other qubits, accumulating into
/// `out` with weight `w`.
pub fn embed_add(
    out: &mut ComplexMatrix,
    local: &ComplexMatrix,
    support: &[u32],
    n: u32,
    w: Complex64,
) -> Result<()> {
    check_support(support, n)?;
    let k = support.len();
    let ldim = 1usize << k;
    if local.rows() != ldim || local.cols() != ldim {
        return Err(Error::DimensionMismatch(format!(
            "local operator is {}x{}, expected {}x{} for |support| = {}",
            local.rows(),
            local.cols(),
            ldim,
            ldim,
            k
        )));
    }
    let dim = 1usize << n;
    if out.rows() != dim {
        return Err(Error::DimensionMismatch("output dimension mismatch".into()));
    }
    // Local index bit l (0 = most significant local factor) sits on qubit support[l].
    let scatter = |li: usize| -> usize {
        let mut x = 0usize;
        for (l, &q) in support.iter().enumerate() {
            if (li >> (k - 1 - l)) & 1 == 1 {
                x |= 1 << bit_of(q, n);
            }
        }
        x
    };
    let support_mask: usize = support.iter().map(|&q| 1usize << bit_of(q, n)).sum();
    let scattered: Vec<usize> = (0..ldim).map(scatter).collect();
    for rest in 0..dim {
        if rest & support_mask != 0 {
            continue;
        }
        for (li, &si) in scattered.iter().enumerate() {
            let r = rest | si;
            for (lj, &sj) in scattered.iter().enumerate() {
                let v = local[(li, lj)];
                if v != ZERO_C {
                    out[(r, rest | sj)] += w * v;
                }
            }
        }
    }
    Ok(())
}

/// Embed a local operator, returning the fresh 2^n-dimensional matrix.
pub fn embed_on_qubits(local: &ComplexMatrix, support: &[u32], n: u32) -> Result<ComplexMatrix> {
    check_support(support, n)?;
    let mut out = ComplexMatrix::zeros(1 << n, 1 << n);
    embed_add(&mut out, local, support, n, ONE_C)?;
    Ok(out)
}

/// In-place left multiplication `target <- embed(gate) * target` without
/// materializing the embedded operator. O(4^n · 2^k) instead of O(8^n).
pub fn apply_local_left(
    gate: &ComplexMatrix,
    support: &[u32],
    n: u32,
    target: &mut ComplexMatrix,
) -> Result<()> {
    check_support(support, n)?;
    let k = support.len();
    let ldim = 1usize << k;
    if gate.rows() != ldim || gate.cols() != ldim {
        return Err(Error::DimensionMismatch("gate dimension does not match support".into()));
    }
    let dim = 1usize << n;
    if target.rows() != dim {
        return Err(Error::DimensionMismatch("target dimension mismatch".into()));
    }
    let scatter = |li: usize| -> usize {
        let mut x = 0usize;
        for (l, &q) in support.iter().enumerate() {
            if (li >> (k - 1 - l)) & 1 == 1 {
                x |= 1 << bit_of(q, n);
            }
        }
        x
    };
    let support_mask: usize = support.iter().map(|&q| 1usize << bit_of(q, n)).sum();
    let scattered: Vec<usize> = (0..ldim).map(scatter).collect();
    let mut tmp = vec![ZERO_C; ldim * dim];
    for rest in 0..dim {
        if rest & support_mask != 0 {
            continue;
        }
        tmp.iter_mut().for_each(|z| *z = ZERO_C);
        for li in 0..ldim {
            let trow = &mut tmp[li * dim..(li + 1) * dim];
            for (lj, &sj) in scattered.iter().enumerate() {
                let g = gate[(li, lj)];
                if g == ZERO_C {
                    continue;
                }
                let src = (rest | sj) * dim;
                let srow = &target.data[src..src + dim];
                for (t, &s) in trow.iter_mut().zip(srow) {
                    *t += g * s;
                }
            }
        }
        for (li, &si) in scattered.iter().enumerate() {
            let dst = (rest | si) * dim;
            target.data[dst..dst + dim].copy_from_slice(&tmp[li * dim..(li + 1) * dim]);
        }
    }
    Ok(())
}
