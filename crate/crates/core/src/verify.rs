//! Independent verification oracles.
//!
//! Everything here is computed exclusively from the (input, output) pair of
//! Hamiltonians, never read back from a RoundingReport, so the audit is an
//! independent check of the rounding module rather than a restatement of it.
//! Ground energies are cross-checked between the direct Householder/QL
//! eigensolver and the Lanczos/Sturm iterative solver before being reported.

use crate::error::{Error, Result};
use crate::linalg::{ground_energy_iter, hermitian_eig, operator_norm, MAX_QUBITS};
use crate::model::{commutator_profile, pairwise_commutator_norm, Hamiltonian};
use crate::rounding::{RoundingReport, BOUND_SLACK, COMMUTE_TOL, ROUNDING_CONSTANT};
use serde::{Deserialize, Serialize};

/// Absolute agreement demanded between the two eigensolvers on λ_min.
pub const ENERGY_TOL: f64 = 1e-8;

pub const FORMAT_VERIFY: &str = "acham-verify-v1";

/// Oracle-side audit record (`acham-verify-v1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub format: String,
    /// Max residual commutator is within COMMUTE_TOL.
    pub commuting: bool,
    pub max_residual: f64,
    /// Re-derived ||ĥ_I − h_I|| per term, dense and exact.
    pub per_term_distances: Vec<f64>,
    /// ||Ĥ − H||: dense when n ≤ 12, else the per-term sum (an upper bound).
    pub global_distance: f64,
    /// Whether `global_distance` is the exact dense value.
    pub global_distance_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_energy_input: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_energy_output: Option<f64>,
    /// Bound on |λ_min(H) − λ_min(Ĥ)|, equal to the global distance.
    pub energy_shift_bound: f64,
    pub passed: bool,
    /// Violated bounds, one entry each; empty iff `passed`.
    pub failures: Vec<String>,
}

/// Max over overlapping pairs of ||[h_I, h_J]|| compared against `tol`.
pub fn verify_commuting(h: &Hamiltonian, tol: f64) -> Result<(bool, f64)> {
    let mut max_residual = 0.0f64;
    for (a, b) in h.overlapping_pairs() {
        let r = pairwise_commutator_norm(&h.terms()[a], &h.terms()[b])?;
        max_residual = max_residual.max(r);
    }
    Ok((max_residual <= tol, max_residual))
}

fn require_same_structure(h: &Hamiltonian, hhat: &Hamiltonian) -> Result<()> {
    if h.n() != hhat.n() || h.term_count() != hhat.term_count() {
        return Err(Error::DimensionMismatch(format!(
            "structure mismatch: {} qubits / {} terms vs {} qubits / {} terms",
            h.n(),
            h.term_count(),
            hhat.n(),
            hhat.term_count()
        )));
    }
    for (a, b) in h.terms().iter().zip(hhat.terms()) {
        if a.support() != b.support() {
            return Err(Error::DimensionMismatch(format!(
                "structure mismatch: support {:?} vs {:?}",
                a.support(),
                b.support()
            )));
        }
    }
    Ok(())
}

/// Exact per-term distances ||ĥ_I − h_I||, dense at ≤ 4×4.
pub fn per_term_distances(h: &Hamiltonian, hhat: &Hamiltonian) -> Result<Vec<f64>> {
    require_same_structure(h, hhat)?;
    h.terms()
        .iter()
        .zip(hhat.terms())
        .map(|(a, b)| operator_norm(&b.matrix().sub(&a.matrix())))
        .collect()
}

/// ||H − Ĥ||: exact dense embedding when n ≤ 12, otherwise the sum of
/// per-term distances (an upper bound, flagged by the second return).
pub fn global_distance(h: &Hamiltonian, hhat: &Hamiltonian) -> Result<(f64, bool)> {
    require_same_structure(h, hhat)?;
    if h.n() <= MAX_QUBITS {
        let diff = h.dense_matrix()?.sub(&hhat.dense_matrix()?);
        Ok((operator_norm(&diff)?, true))
    } else {
        Ok((per_term_distances(h, hhat)?.iter().sum(), false))
    }
}

/// λ_min of the dense embedding, cross-checked between the direct and the
/// iterative eigensolver to 1e-8 before being reported.
pub fn ground_energy(h: &Hamiltonian) -> Result<f64> {
    let dense = h.dense_matrix()?;
    let (vals, _) = hermitian_eig(&dense, false)?;
    let direct = vals.first().copied().unwrap_or(0.0);
    let iterative = ground_energy_iter(&dense)?;
    if (direct - iterative).abs() > ENERGY_TOL {
        return Err(Error::Audit(format!(
            "eigensolver cross-check failed: direct {direct} vs iterative {iterative}"
        )));
    }
    Ok(direct)
}

/// Full bound audit of a rounding run against the (H, Ĥ) pair, optionally
/// cross-checking the recorded numbers in a RoundingReport.
///
/// All quantities are re-derived from the Hamiltonians; any violated bound
/// becomes an entry in `failures` (structural problems are hard errors).
pub fn audit_bounds(
    h: &Hamiltonian,
    hhat: &Hamiltonian,
    report: Option<&RoundingReport>,
) -> Result<VerificationReport> {
    require_same_structure(h, hhat)?;
    let mut failures = Vec::new();

    let eps = match report {
        Some(r) => r.eps,
        None => commutator_profile(h)?.epsilon,
    };
    if let Some(r) = report {
        let realized = commutator_profile(h)?.epsilon;
        if realized > r.eps + BOUND_SLACK {
            failures.push(format!(
                "promise violated: realized epsilon {realized:.3e} exceeds reported {:.3e}",
                r.eps
            ));
        }
    }

    let (commuting, max_residual) = verify_commuting(hhat, COMMUTE_TOL)?;
    if !commuting {
        failures.push(format!(
            "commuting audit: max residual {max_residual:.3e} exceeds {COMMUTE_TOL:.0e}"
        ));
    }

    let distances = per_term_distances(h, hhat)?;
    let per_term_cap = ROUNDING_CONSTANT * eps.powf(1.0 / 6.0);
    for (i, &d) in distances.iter().enumerate() {
        if d > per_term_cap + BOUND_SLACK {
            failures.push(format!(
                "per-term bound: term {i} moved {d:.6e} > 216 eps^(1/6) = {per_term_cap:.6e}"
            ));
        }
        if hhat.terms()[i].norm() > h.terms()[i].norm() + per_term_cap + BOUND_SLACK {
            failures.push(format!("norm growth: term {i} grew beyond the rounding distance"));
        }
    }

    let (gdist, exact) = global_distance(h, hhat)?;
    let global_cap = ROUNDING_CONSTANT * h.term_count() as f64 * eps.powf(1.0 / 6.0);
    if gdist > global_cap + BOUND_SLACK {
        failures.push(format!(
            "global bound: ||H - Hhat|| = {gdist:.6e} > 216 m eps^(1/6) = {global_cap:.6e}"
        ));
    }
    if exact {
        let tri: f64 = distances.iter().sum();
        if gdist > tri + BOUND_SLACK {
            failures.push(format!(
                "triangle consistency: dense distance {gdist:.6e} exceeds per-term sum {tri:.6e}"
            ));
        }
    }

    if let Some(r) = report {
        if r.per_term.len() != distances.len() {
            failures.push("report term count mismatch".into());
        } else {
            for (i, (pt, &d)) in r.per_term.iter().zip(&distances).enumerate() {
                if (pt.distance_to_input - d).abs() > BOUND_SLACK {
                    failures.push(format!(
                        "report mismatch: term {i} recorded {:.6e}, re-derived {d:.6e}",
                        pt.distance_to_input
                    ));
                }
            }
        }
        if (r.max_residual_commutator - max_residual).abs() > BOUND_SLACK {
            failures.push(format!(
                "report mismatch: residual recorded {:.3e}, re-derived {max_residual:.3e}",
                r.max_residual_commutator
            ));
        }
        if (r.global_distance_bound - global_cap).abs() > 1e-6 * global_cap.max(1.0) {
            failures.push("report mismatch: global distance bound".into());
        }
    }

    let (e_in, e_out) = if h.n() <= MAX_QUBITS {
        let e_in = ground_energy(h)?;
        let e_out = ground_energy(hhat)?;
        if (e_in - e_out).abs() > gdist + BOUND_SLACK {
            failures.push(format!(
                "energy shift: |{e_in:.6e} - {e_out:.6e}| exceeds ||H - Hhat|| = {gdist:.6e}"
            ));
        }
        (Some(e_in), Some(e_out))
    } else {
        (None, None)
    };

    Ok(VerificationReport {
        format: FORMAT_VERIFY.to_string(),
        commuting,
        max_residual,
        per_term_distances: distances,
        global_distance: gdist,
        global_distance_exact: exact,
        ground_energy_input: e_in,
        ground_energy_output: e_out,
        energy_shift_bound: gdist,
        passed: failures.is_empty(),
        failures,
    })
}
