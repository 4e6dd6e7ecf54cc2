//! Direct dense Hermitian eigensolver.
//!
//! Householder reduction of a complex Hermitian matrix to real symmetric
//! tridiagonal form, followed by implicit-shift QL iteration (the classic
//! EISPACK tql2 scheme). Eigenvalues come back ascending; eigenvectors are
//! optional since several callers (ground energies, operator norms) only
//! need the spectrum.

use super::{ComplexMatrix, ONE_C, ZERO_C};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns ascending eigenvalues and, when `want_vectors` is set, a matrix
/// whose j-th column is the eigenvector for the j-th eigenvalue.
/// The input is checked against the Hermiticity tolerance and symmetrized.
pub fn hermitian_eig(m: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    m.require_square()?;
    m.require_dense_cap()?;
    let h = m.symmetrized_hermitian()?;
    let n = h.rows();
    if n == 0 {
        return Ok((vec![], if want_vectors { Some(ComplexMatrix::zeros(0, 0)) } else { None }));
    }
    if n == 1 {
        let vecs = want_vectors.then(|| ComplexMatrix::identity(1));
        return Ok((vec![h[(0, 0)].re], vecs));
    }

    let mut a: Vec<Complex64> = h.data().to_vec();
    let mut q = want_vectors.then(|| ComplexMatrix::identity(n));

    // Householder reduction to Hermitian tridiagonal form.
    let at = |a: &[Complex64], i: usize, j: usize| a[i * n + j];
    for k in 0..n.saturating_sub(2) {
        let xnorm_sq: f64 = (k + 1..n).map(|i| at(&a, i, k).norm_sqr()).sum();
        let xnorm = xnorm_sq.sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = at(&a, k + 1, k);
        let phase = if x0.norm() == 0.0 { ONE_C } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, u = v / |v|
        let mut u: Vec<Complex64> = (k + 1..n).map(|i| at(&a, i, k)).collect();
        u[0] -= alpha;
        let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if unorm < 1e-300 {
            continue;
        }
        for z in u.iter_mut() {
            *z /= unorm;
        }
        let m_sub = n - (k + 1);
        // p = A_sub u
        let mut p = vec![ZERO_C; m_sub];
        for i in 0..m_sub {
            let row = &a[(k + 1 + i) * n + (k + 1)..(k + 1 + i) * n + n];
            p[i] = row.iter().zip(&u).map(|(aij, uj)| aij * uj).sum();
        }
        let kappa: Complex64 = u.iter().zip(&p).map(|(ui, pi)| ui.conj() * pi).sum();
        // w = 2p - 2(u†p)u;  A_sub <- A_sub - u w† - w u†
        let w: Vec<Complex64> = p.iter().zip(&u).map(|(pi, ui)| 2.0 * pi - 2.0 * kappa * ui).collect();
        for i in 0..m_sub {
            let (ui, wi) = (u[i], w[i]);
            let row = &mut a[(k + 1 + i) * n + (k + 1)..(k + 1 + i) * n + n];
            for j in 0..m_sub {
                row[j] -= ui * w[j].conj() + wi * u[j].conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + (k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[i * n + k] = ZERO_C;
            a[k * n + i] = ZERO_C;
        }
        if let Some(qm) = q.as_mut() {
            // Q <- Q (I - 2 u u†), columns k+1..n
            for i in 0..n {
                let dot: Complex64 = (0..m_sub).map(|j| qm[(i, k + 1 + j)] * u[j]).sum();
                for j in 0..m_sub {
                    let upd = 2.0 * dot * u[j].conj();
                    qm[(i, k + 1 + j)] -= upd;
                }
            }
        }
    }

    // Phase-rotate so the subdiagonal is real and nonnegative.
    let mut d: Vec<f64> = (0..n).map(|i| at(&a, i, i).re).collect();
    let mut e: Vec<f64> = vec![0.0; n];
    let mut t = vec![ONE_C; n];
    for k in 0..n - 1 {
        let beta = at(&a, k + 1, k);
        let mag = beta.norm();
        e[k] = mag;
        let ph = if mag == 0.0 { ONE_C } else { beta / mag };
        t[k + 1] = ph.conj() * t[k];
    }
    if let Some(qm) = q.as_mut() {
        // Eigenvectors of A are Q diag(conj(t)) times those of the real tridiagonal.
        for j in 0..n {
            let tc = t[j].conj();
            for i in 0..n {
                qm[(i, j)] *= tc;
            }
        }
    }

    tql2(&mut d, &mut e, q.as_mut())?;

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let q_sorted = q.map(|qm| ComplexMatrix::from_fn(n, n, |i, j| qm[(i, order[j])]));
    Ok((sorted, q_sorted))
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
/// EISPACK tql2 lineage. `d` holds the diagonal, `e[i]` couples i and i+1.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() < 1e-300 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(format!("QL stalled at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    let rows = zm.rows();
                    for k in 0..rows {
                        let f = zm[(k, i + 1)];
                        zm[(k, i + 1)] = s * zm[(k, i)] + c * f;
                        zm[(k, i)] = c * zm[(k, i)] - s * f;
                    }
                }
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
