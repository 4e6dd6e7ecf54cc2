//! Iterative extremal eigensolver (Lanczos with full reorthogonalization).
//!
//! This is the second, independent route to extremal eigenvalues demanded by
//! the verification layer: it shares no code with the direct Householder/QL
//! solver. Extremal eigenvalues of the Lanczos tridiagonal are extracted by
//! Sturm-sequence bisection rather than QL iteration, keeping the two paths
//! algorithmically disjoint.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Extremal (smallest, largest) eigenvalues of a Hermitian matrix via
/// Lanczos iteration, converged to ~1e-11 absolute on unit-scale inputs.
pub fn extremal_eigenvalues_iter(m: &ComplexMatrix) -> Result<(f64, f64)> {
    m.require_square()?;
    m.require_dense_cap()?;
    let h = m.symmetrized_hermitian()?;
    let n = h.rows();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    if n == 1 {
        let v = h[(0, 0)].re;
        return Ok((v, v));
    }
    let scale = h.one_norm().max(1.0);
    let tol = 1e-12 * scale;

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = deterministic_unit_vector(n);
    let max_steps = n.min(400);
    let mut prev = (f64::INFINITY, f64::NEG_INFINITY);
    let mut stable = 0;
    let mut result = prev;

    for step in 0..max_steps {
        basis.push(v.clone());
        let mut w = h.matvec(&v);
        if step > 0 {
            let b = betas[step - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[step - 1]) {
                *wi -= b * pi;
            }
        }
        let alpha: f64 = v.iter().zip(&w).map(|(vi, wi)| (vi.conj() * wi).re).sum();
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        // Full reorthogonalization, twice for safety.
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&w).map(|(bi, wi)| bi.conj() * wi).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= overlap * bi;
                }
            }
        }
        alphas.push(alpha);
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        let k = alphas.len();
        if k >= 2 || beta <= tol {
            let lo = tridiag_extremal(&alphas, &betas, Extremal::Smallest);
            let hi = tridiag_extremal(&alphas, &betas, Extremal::Largest);
            result = (lo, hi);
            if (lo - prev.0).abs() <= tol && (hi - prev.1).abs() <= tol {
                stable += 1;
                if stable >= 3 {
                    return Ok(result);
                }
            } else {
                stable = 0;
            }
            prev = (lo, hi);
        }
        if beta <= tol {
            // Invariant subspace captured; with a dense start vector this is
            // the full relevant spectrum.
            return Ok(result);
        }
        betas.push(beta);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / beta;
        }
    }
    if result.0.is_finite() {
        Ok(result)
    } else {
        Err(Error::NoConvergence("lanczos produced no estimate".into()))
    }
}

/// Smallest eigenvalue only.
pub fn ground_energy_iter(m: &ComplexMatrix) -> Result<f64> {
    Ok(extremal_eigenvalues_iter(m)?.0)
}

enum Extremal {
    Smallest,
    Largest,
}

/// Extremal eigenvalue of a symmetric tridiagonal (alphas, betas) by
/// bisection on the Sturm count.
fn tridiag_extremal(alphas: &[f64], betas: &[f64], which: Extremal) -> f64 {
    let k = alphas.len();
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let left = if i > 0 { betas[i - 1].abs() } else { 0.0 };
        let right = if i < k - 1 { betas[i].abs() } else { 0.0 };
        lo = lo.min(alphas[i] - left - right);
        hi = hi.max(alphas[i] + left + right);
    }
    if k == 1 {
        return alphas[0];
    }
    let target = match which {
        Extremal::Smallest => 1usize,
        Extremal::Largest => k,
    };
    let (mut a, mut b) = (lo - 1e-12, hi + 1e-12);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if sturm_count_below(alphas, betas, mid) >= target {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Number of eigenvalues of the tridiagonal strictly below x.
fn sturm_count_below(alphas: &[f64], betas: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = alphas[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..alphas.len() {
        let b2 = betas[i - 1] * betas[i - 1];
        let denom = if q.abs() < 1e-300 { 1e-300f64.copysign(if q == 0.0 { 1.0 } else { q }) } else { q };
        q = alphas[i] - x - b2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Deterministic dense start vector (splitmix64-driven), normalized.
fn deterministic_unit_vector(n: usize) -> Vec<Complex64> {
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            let re = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            let im = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(re + 0.1, im)
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}
