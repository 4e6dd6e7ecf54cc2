//! Matrix exponential.
//!
//! Hermitian inputs go through the eigendecomposition (stable for large
//! ||scale·M|| and exactly unitary for imaginary scale up to rounding);
//! general inputs use the [13/13] Padé approximant with scaling and
//! squaring (Higham 2005 coefficients).

use super::{eigen::hermitian_eig, ComplexMatrix, HERMITICITY_TOL, ONE_C, ZERO_C};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// exp(scale · M).
pub fn matrix_exponential(m: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    m.require_square()?;
    m.require_dense_cap()?;
    let n = m.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if m.is_hermitian(HERMITICITY_TOL) {
        let (vals, vecs) = hermitian_eig(m, true)?;
        let v = vecs.expect("vectors requested");
        let vd = v.dagger();
        let mut core = ComplexMatrix::zeros(n, n);
        for (i, &lambda) in vals.iter().enumerate() {
            core[(i, i)] = (scale * lambda).exp();
        }
        return Ok(v.mul(&core).mul(&vd));
    }
    expm_pade(&m.scale(scale))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn expm_pade(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let norm = a.one_norm();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(Complex64::new(0.5f64.powi(s), 0.0));

    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let ident = ComplexMatrix::identity(n);
    let real = |x: f64| Complex64::new(x, 0.0);

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let mut inner = a6.scale(real(PADE13[13]));
    inner.add_assign(&a4.scale(real(PADE13[11])));
    inner.add_assign(&a2.scale(real(PADE13[9])));
    let mut u = a6.mul(&inner);
    u.add_assign(&a6.scale(real(PADE13[7])));
    u.add_assign(&a4.scale(real(PADE13[5])));
    u.add_assign(&a2.scale(real(PADE13[3])));
    u.add_assign(&ident.scale(real(PADE13[1])));
    let u = a.mul(&u);

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut inner = a6.scale(real(PADE13[12]));
    inner.add_assign(&a4.scale(real(PADE13[10])));
    inner.add_assign(&a2.scale(real(PADE13[8])));
    let mut v = a6.mul(&inner);
    v.add_assign(&a6.scale(real(PADE13[6])));
    v.add_assign(&a4.scale(real(PADE13[4])));
    v.add_assign(&a2.scale(real(PADE13[2])));
    v.add_assign(&ident.scale(real(PADE13[0])));

    // Solve (V - U) X = (V + U).
    let p = v.add(&u);
    let q = v.sub(&u);
    let mut x = lu_solve(&q, &p)?;
    for _ in 0..s {
        x = x.mul(&x);
    }
    Ok(x)
}

#[cfg(test)]
pub(crate) fn expm_pade_for_tests(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    expm_pade(a)
}

/// Solve A X = B by LU with partial pivoting.
fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let mut lu: Vec<Complex64> = a.data().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut pivot = k;
        let mut best = lu[k * n + k].norm();
        for i in k + 1..n {
            let mag = lu[i * n + k].norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        if best < 1e-300 {
            return Err(Error::NoConvergence("singular Padé denominator".into()));
        }
        if pivot != k {
            for j in 0..n {
                lu.swap(k * n + j, pivot * n + j);
            }
            perm.swap(k, pivot);
        }
        let pk = lu[k * n + k];
        for i in k + 1..n {
            let f = lu[i * n + k] / pk;
            lu[i * n + k] = f;
            if f != ZERO_C {
                for j in k + 1..n {
                    let upd = f * lu[k * n + j];
                    lu[i * n + j] -= upd;
                }
            }
        }
    }
    let mut x = ComplexMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        // Forward substitution on permuted rows.
        let mut y = vec![ZERO_C; n];
        for i in 0..n {
            let mut s = b[(perm[i], c)];
            for j in 0..i {
                s -= lu[i * n + j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= lu[i * n + j] * x[(j, c)];
            }
            x[(i, c)] = s / lu[i * n + i];
        }
    }
    let _ = ONE_C;
    Ok(x)
}
