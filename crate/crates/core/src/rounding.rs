//! Rounding of ε-almost-commuting 2-local Hamiltonians to exactly commuting
//! form.
//!
//! The pipeline: (1) classify every 2-local term by two-sided η₂-gappedness
//! of its local Pauli decompositions; (2) snap ungapped terms to 1-local
//! (cost ≤ 4η₂ each); (3) snap η₁-ungapped 1-local terms to identity
//! multiples (cost ≤ 4η₁); (4) select a gapped pivot operator per qubit;
//! (5) pinch every term by its qubits' pivot eigenprojectors. Pinched terms
//! touching a common qubit are diagonal in the same local basis, so all
//! output pairs commute exactly; the per-term cost is bounded by
//! 4(κ_i/ζ_i + κ_j/ζ_j) and totals 216·ε^(1/6) against the input.

use crate::error::{Error, Result};
use crate::linalg::{
    operator_norm, pauli_vector, spectral_decompose_2x2, ComplexMatrix, DEGENERACY_TOL,
};
use crate::model::{
    commutator_profile, pairwise_commutator_norm, Hamiltonian, LocalTerm, NORM_TOL,
};
use crate::pauli::gapped_witness;
use serde::{Deserialize, Serialize};

/// Absolute tolerance on residual commutator norms of rounded output.
/// All arithmetic is ≤ 8×8 dense, so residuals are rounding noise only.
pub const COMMUTE_TOL: f64 = 1e-9;

/// Slack used whenever a measured quantity is compared against a bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// The constant in the per-term distance bound 216·ε^(1/6).
pub const ROUNDING_CONSTANT: f64 = 216.0;

/// Threshold schedule of the staged algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageParams {
    /// Input commutator promise ε₂ = ε.
    pub eps2: f64,
    /// First snapping threshold η₂ = ε₂^(1/3).
    pub eta2: f64,
    /// Commutator promise after the first snap, ε₁ = ε₂ + 16η₂.
    pub eps1: f64,
    /// Second snapping threshold η₁ = sqrt(ε₂ + 16η₂).
    pub eta1: f64,
}

impl StageParams {
    pub fn new(eps: f64) -> Self {
        let eta2 = eps.cbrt();
        let eps1 = eps + 16.0 * eta2;
        let eta1 = eps1.sqrt();
        Self { eps2: eps, eta2, eps1, eta1 }
    }
}

/// Where a term ended up in the snapping stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageTag {
    #[serde(rename = "kept-2local")]
    Kept2Local,
    #[serde(rename = "kept-1local")]
    Kept1Local,
    #[serde(rename = "kept-0local")]
    Kept0Local,
    #[serde(rename = "snapped-to-1local")]
    SnappedTo1Local,
    #[serde(rename = "snapped-to-0local")]
    SnappedTo0Local,
}

/// A term tracked through the snapping stages.
#[derive(Debug, Clone)]
pub struct StagedTerm {
    /// Current (possibly snapped) content; support slot unchanged.
    pub term: LocalTerm,
    pub stage: StageTag,
    /// Accumulated worst-case snapping distance (0, 4η₂, 4η₁ or 4η₂+4η₁).
    pub snap_bound: f64,
}

/// Output of the two snapping stages.
#[derive(Debug, Clone)]
pub struct SnappedHamiltonian {
    pub n: u32,
    pub staged: Vec<StagedTerm>,
    pub params: StageParams,
}

impl SnappedHamiltonian {
    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        Hamiltonian::new(self.n, self.staged.iter().map(|s| s.term.clone()).collect(), false)
    }
}

/// Where a pivot operator came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PivotProvenance {
    Identity,
    OneLocalTerm { term_support: Vec<u32> },
    Component { term_support: Vec<u32>, alpha: usize },
}

/// Per-qubit pivot: either the identity marker (no pinching) or a gapped
/// 2×2 Hermitian operator with its certified commutator bound κ and gap
/// floor ζ.
#[derive(Debug, Clone)]
pub struct Pivot {
    pub qubit: u32,
    pub action: PivotAction,
}

#[derive(Debug, Clone)]
pub enum PivotAction {
    Identity,
    Pinch {
        operator: ComplexMatrix,
        projectors: [ComplexMatrix; 2],
        /// ζ: certified lower bound on the pivot's spectral gap.
        gap_floor: f64,
        /// κ: certified upper bound on ||[R ⊗ I, h]|| over terms touching the qubit.
        kappa: f64,
        provenance: PivotProvenance,
    },
}

impl Pivot {
    pub fn identity(qubit: u32) -> Self {
        Self { qubit, action: PivotAction::Identity }
    }

    /// Build a pinching pivot, validating Δ(operator) ≥ gap_floor > 0.
    pub fn pinch_by(
        qubit: u32,
        operator: &ComplexMatrix,
        kappa: f64,
        gap_floor: f64,
        provenance: PivotProvenance,
    ) -> Result<Self> {
        let dec = spectral_decompose_2x2(operator)?;
        if !(gap_floor > 0.0) || dec.gap() < gap_floor {
            return Err(Error::InvariantViolation(format!(
                "pivot on qubit {qubit}: gap {:.3e} below certified floor {gap_floor:.3e}",
                dec.gap()
            )));
        }
        Ok(Self {
            qubit,
            action: PivotAction::Pinch {
                operator: operator.clone(),
                projectors: [dec.projector_min, dec.projector_max],
                gap_floor,
                kappa,
                provenance,
            },
        })
    }

    /// κ/ζ contribution of this pivot to the pinch distance bound (0 for identity).
    pub fn error_ratio(&self) -> f64 {
        match &self.action {
            PivotAction::Identity => 0.0,
            PivotAction::Pinch { kappa, gap_floor, .. } => kappa / gap_floor,
        }
    }
}

/// Pinched matrix Π B Π + (I−Π) B (I−Π) from the eigenprojectors of the
/// gapped Hermitian pivot A. Satisfies [result, A] = 0 and
/// ||B − result|| = ||[B, A]|| / Δ(A) exactly.
pub fn pinch(b: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.rows() != 2 || b.cols() != 2 {
        return Err(Error::DimensionMismatch(format!("pinch expects 2x2, got {}x{}", b.rows(), b.cols())));
    }
    let dec = spectral_decompose_2x2(a)?;
    if dec.gap() <= DEGENERACY_TOL {
        return Err(Error::DegeneratePivot { gap: dec.gap() });
    }
    Ok(sandwich(b, &[&dec.projector_min, &dec.projector_max]))
}

fn sandwich(b: &ComplexMatrix, projectors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
    for p in projectors {
        out.add_assign(&p.mul(b).mul(p));
    }
    out
}

/// λ_max(B) · I: the nearest identity multiple in the sense
/// ||B − snap(B)|| = Δ(B).
pub fn snap(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let [p, q, r, s] = pauli_vector(b)?;
    let lambda_max = p + (q * q + r * r + s * s).sqrt();
    Ok(ComplexMatrix::identity(2).scale(num_complex::Complex64::new(lambda_max, 0.0)))
}

/// Snap a 2-local term that is not (weak_qubit, η)-gapped: every component
/// on the weak qubit becomes λ_max · I, leaving a term that acts as identity
/// there (a 1-local term on the partner, within 4η of the input). The support
/// slot is preserved; the weak qubit's coefficient rows become exactly zero.
pub fn snap_term_to_1local(term: &LocalTerm, weak_qubit: u32, eta: f64) -> Result<LocalTerm> {
    if term.locality() != 2 {
        return Err(Error::GapPrecondition(format!(
            "snap_term_to_1local expects a 2-local term, got locality {}",
            term.locality()
        )));
    }
    let comps = term.components_about(weak_qubit)?;
    let (gapped, _) = gapped_witness(&comps, eta)?;
    if gapped {
        return Err(Error::GapPrecondition(format!(
            "term on {:?} is ({weak_qubit}, {eta})-gapped; snapping applies only to ungapped terms",
            term.support()
        )));
    }
    let support = term.support();
    let mut coeffs = [[0.0f64; 4]; 4];
    for (beta, comp) in comps.iter().enumerate() {
        let [p, q, r, s] = pauli_vector(comp)?;
        let lambda_max = p + (q * q + r * r + s * s).sqrt();
        if support[0] == weak_qubit {
            coeffs[0][beta] = lambda_max;
        } else {
            coeffs[beta][0] = lambda_max;
        }
    }
    LocalTerm::two_local(support[0], support[1], coeffs)
}

/// Snap a 1-local-content term to a multiple of the identity.
fn snap_to_identity_multiple(term: &LocalTerm, about: u32) -> Result<LocalTerm> {
    let comps = term.components_about(about)?;
    let [p, q, r, s] = pauli_vector(&comps[0])?;
    let c = p + (q * q + r * r + s * s).sqrt();
    match term.support() {
        [q1] => Ok(LocalTerm::one_local(*q1, [c, 0.0, 0.0, 0.0])),
        [q1, q2] => {
            let mut coeffs = [[0.0f64; 4]; 4];
            coeffs[0][0] = c;
            LocalTerm::two_local(*q1, *q2, coeffs)
        }
        _ => unreachable!("staged terms have locality 1 or 2"),
    }
}

/// The qubit a 1-local-content term acts on (its only nontrivial qubit, or
/// the first support qubit for identity-multiple content).
fn acting_qubit(term: &LocalTerm) -> u32 {
    term.support()
        .iter()
        .copied()
        .find(|&q| term.nontrivially_touches(q))
        .unwrap_or(term.support()[0])
}

/// Stages 1–3: partition 2-local terms by two-sided η₂-gappedness, snap
/// ungapped ones to 1-local, then snap η₁-ungapped 1-local terms to identity
/// multiples. 0-local inputs bypass untouched; 1-local inputs enter the η₁
/// stage directly.
pub fn snap_stages(h: &Hamiltonian, params: &StageParams) -> Result<SnappedHamiltonian> {
    let mut staged = Vec::with_capacity(h.term_count());
    for term in h.terms() {
        let st = match term.locality() {
            0 => StagedTerm { term: term.clone(), stage: StageTag::Kept0Local, snap_bound: 0.0 },
            1 => stage_one_local(term.clone(), StageTag::Kept1Local, 0.0, params)?,
            2 => {
                let qa = term.support()[0];
                let qb = term.support()[1];
                let (gap_a, _) = gapped_witness(&term.components_about(qa)?, params.eta2)?;
                let (gap_b, _) = gapped_witness(&term.components_about(qb)?, params.eta2)?;
                if gap_a && gap_b {
                    StagedTerm { term: term.clone(), stage: StageTag::Kept2Local, snap_bound: 0.0 }
                } else {
                    // Ungapped on both sides: snap about the lower index.
                    let weak = if !gap_a { qa } else { qb };
                    let snapped = snap_term_to_1local(term, weak, params.eta2)?;
                    stage_one_local(snapped, StageTag::SnappedTo1Local, 4.0 * params.eta2, params)?
                }
            }
            k => return Err(Error::Schema(format!("unsupported locality {k}"))),
        };
        staged.push(st);
    }
    Ok(SnappedHamiltonian { n: h.n(), staged, params: *params })
}

fn stage_one_local(
    term: LocalTerm,
    kept_tag: StageTag,
    bound_so_far: f64,
    params: &StageParams,
) -> Result<StagedTerm> {
    let about = acting_qubit(&term);
    let comps = term.components_about(about)?;
    let (gapped, _) = gapped_witness(&comps, params.eta1)?;
    if gapped {
        Ok(StagedTerm { term, stage: kept_tag, snap_bound: bound_so_far })
    } else {
        let snapped = snap_to_identity_multiple(&term, about)?;
        Ok(StagedTerm {
            term: snapped,
            stage: StageTag::SnappedTo0Local,
            snap_bound: bound_so_far + 4.0 * params.eta1,
        })
    }
}

/// Per-qubit pivot assignment over the snapped Hamiltonian:
/// (a) qubits touched nontrivially by at most one term get the identity
/// marker; (b) qubits touched by a surviving 1-local term take that term as
/// pivot with (κ, ζ) = (ε₁, η₁); (c) otherwise the max-gap component
/// (ties → smallest α) of the lexicographically-first 2-local term, with
/// (κ, ζ) = (24ε₂/η₂, η₂). Gap floors are clamped below by 1e-12 and every
/// selected pivot is checked against its floor.
pub fn select_pivots(snapped: &SnappedHamiltonian) -> Result<Vec<Pivot>> {
    let params = &snapped.params;
    let guard_b = params.eta1.max(DEGENERACY_TOL);
    let guard_c = params.eta2.max(DEGENERACY_TOL);
    let kappa_b = params.eps1;
    let kappa_c = if params.eps2 > 0.0 { 24.0 * params.eps2 / params.eta2 } else { 0.0 };

    let mut pivots = Vec::with_capacity(snapped.n as usize);
    for q in 0..snapped.n {
        let touching: Vec<&StagedTerm> =
            snapped.staged.iter().filter(|s| s.term.nontrivially_touches(q)).collect();
        if touching.len() <= 1 {
            pivots.push(Pivot::identity(q));
            continue;
        }
        // Case (b): a surviving 1-local term on q.
        let one_locals: Vec<&StagedTerm> = touching
            .iter()
            .copied()
            .filter(|s| matches!(s.stage, StageTag::Kept1Local | StageTag::SnappedTo1Local))
            .collect();
        if !one_locals.is_empty() {
            let mut chosen = None;
            for s in &one_locals {
                let g = &s.term.components_about(q)?[0];
                let dec = spectral_decompose_2x2(g)?;
                if dec.gap() >= guard_b {
                    chosen = Some((s, g.clone()));
                    break;
                }
            }
            let (s, g) = chosen.ok_or_else(|| {
                Error::InvariantViolation(format!(
                    "qubit {q}: 1-local terms present but none clears the gap floor {guard_b:.3e}"
                ))
            })?;
            pivots.push(Pivot::pinch_by(
                q,
                &g,
                kappa_b,
                guard_b,
                PivotProvenance::OneLocalTerm { term_support: s.term.support().to_vec() },
            )?);
            continue;
        }
        // Case (c): all terms on q are 2-local; take the first (terms are
        // support-sorted, so first = lexicographically first support).
        let first = touching
            .iter()
            .copied()
            .find(|s| s.stage == StageTag::Kept2Local)
            .ok_or_else(|| Error::InvariantViolation(format!("qubit {q}: no 2-local term despite case (c)")))?;
        let comps = first.term.components_about(q)?;
        let (_, witness) = gapped_witness(&comps, 0.0)?;
        let witness = witness
            .ok_or_else(|| Error::InvariantViolation(format!("qubit {q}: empty decomposition")))?;
        if witness.gap < guard_c {
            return Err(Error::InvariantViolation(format!(
                "qubit {q}: max component gap {:.3e} below floor {guard_c:.3e}; \
                 impossible if snapping stages ran",
                witness.gap
            )));
        }
        pivots.push(Pivot::pinch_by(
            q,
            &comps[witness.alpha],
            kappa_c,
            guard_c,
            PivotProvenance::Component {
                term_support: first.term.support().to_vec(),
                alpha: witness.alpha,
            },
        )?);
    }
    Ok(pivots)
}

/// Apply the global pinching map: each term goes through (𝒫_i ⊗ 𝒫_j) for
/// the pivots of its support qubits (identity markers pinch nothing).
/// Every output pair commutes to COMMUTE_TOL and each output term commutes
/// with its qubits' pivots.
pub fn global_pinch(h: &Hamiltonian, pivots: &[Pivot]) -> Result<Hamiltonian> {
    if pivots.len() != h.n() as usize {
        return Err(Error::DimensionMismatch(format!(
            "{} pivots for {} qubits",
            pivots.len(),
            h.n()
        )));
    }
    for (q, p) in pivots.iter().enumerate() {
        if p.qubit != q as u32 {
            return Err(Error::InvariantViolation("pivots must be indexed by qubit".into()));
        }
    }
    let ident = ComplexMatrix::identity(2);
    let projector_set = |q: u32| -> Vec<&ComplexMatrix> {
        match &pivots[q as usize].action {
            PivotAction::Identity => vec![&ident],
            PivotAction::Pinch { projectors, .. } => vec![&projectors[0], &projectors[1]],
        }
    };
    let mut out_terms = Vec::with_capacity(h.term_count());
    for term in h.terms() {
        let new_term = match term.support() {
            [] => term.clone(),
            [q] => {
                let m = term.matrix();
                let pinched = sandwich(&m, &projector_set(*q));
                LocalTerm::from_matrix(term.support(), &pinched)?
            }
            [qa, qb] => {
                let m = term.matrix();
                let mut pinched = ComplexMatrix::zeros(4, 4);
                for p in projector_set(*qa) {
                    for r in projector_set(*qb) {
                        let pr = p.kron(r);
                        pinched.add_assign(&pr.mul(&m).mul(&pr));
                    }
                }
                LocalTerm::from_matrix(term.support(), &pinched)?
            }
            _ => unreachable!("locality <= 2"),
        };
        out_terms.push(new_term);
    }
    Hamiltonian::new(h.n(), out_terms, false)
}

/// Per-term entry in the rounding report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerTermReport {
    pub support: Vec<u32>,
    pub stage: StageTag,
    /// Measured ||ĥ − h|| (dense, exact at 4×4).
    pub distance_to_input: f64,
    /// Stage-wise worst-case bound: snapping cost + 4(κ_i/ζ_i + κ_j/ζ_j).
    pub bound: f64,
}

/// Pivot entry in the rounding report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PivotReport {
    pub qubit: u32,
    #[serde(flatten)]
    pub provenance: PivotProvenance,
    /// Pauli coefficients [p, q, r, s] of the pivot operator (absent for identity).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

/// Audit record of one rounding run (`acham-report-v1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundingReport {
    pub format: String,
    /// The ε the guarantees are parametrized by (promised or realized).
    pub eps: f64,
    pub stage_params: StageParams,
    pub pivots: Vec<PivotReport>,
    pub per_term: Vec<PerTermReport>,
    /// 216 · m · ε^(1/6).
    pub global_distance_bound: f64,
    /// Max ||[ĥ_I, ĥ_J]|| over overlapping output pairs.
    pub max_residual_commutator: f64,
    pub bounds_satisfied: bool,
}

pub const FORMAT_REPORT: &str = "acham-report-v1";

fn pivot_report(p: &Pivot) -> PivotReport {
    match &p.action {
        PivotAction::Identity => PivotReport {
            qubit: p.qubit,
            provenance: PivotProvenance::Identity,
            operator: None,
            gap_floor: None,
            kappa: None,
        },
        PivotAction::Pinch { operator, gap_floor, kappa, provenance, .. } => PivotReport {
            qubit: p.qubit,
            provenance: provenance.clone(),
            operator: Some(pauli_vector(operator).expect("pivot operators are Hermitian 2x2")),
            gap_floor: Some(*gap_floor),
            kappa: Some(*kappa),
        },
    }
}

/// Round an ε-almost-commuting Hamiltonian to a nearby exactly commuting one.
///
/// ε defaults to the realized commutator profile; `eps_override` supplies the
/// promised ε instead (reduction pipelines quote the promise, which may
/// exceed the realized value). Requires ‖h_i‖ ≤ 1 and 0 ≤ ε ≤ 1.
pub fn round(h: &Hamiltonian, eps_override: Option<f64>) -> Result<(Hamiltonian, RoundingReport)> {
    for t in h.terms() {
        let norm = t.norm();
        if norm > 1.0 + NORM_TOL {
            return Err(Error::NormViolation { support: t.support().to_vec(), norm });
        }
    }
    let eps = match eps_override {
        Some(e) => e,
        None => commutator_profile(h)?.epsilon,
    };
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Regime(format!("eps = {eps} outside the theorem regime [0, 1]")));
    }
    let params = StageParams::new(eps);
    let snapped = snap_stages(h, &params)?;
    let pivots = select_pivots(&snapped)?;
    let h_snap = snapped.hamiltonian()?;
    let rounded = global_pinch(&h_snap, &pivots)?;

    let per_term_cap = ROUNDING_CONSTANT * eps.powf(1.0 / 6.0);
    let mut per_term = Vec::with_capacity(h.term_count());
    let mut bounds_ok = true;
    for ((orig, out), staged) in h.terms().iter().zip(rounded.terms()).zip(&snapped.staged) {
        let distance = operator_norm(&out.matrix().sub(&orig.matrix()))?;
        let pinch_bound: f64 = 4.0
            * orig
                .support()
                .iter()
                .map(|&q| pivots[q as usize].error_ratio())
                .sum::<f64>();
        let bound = staged.snap_bound + pinch_bound;
        if distance > bound + BOUND_SLACK || distance > per_term_cap + BOUND_SLACK {
            bounds_ok = false;
        }
        per_term.push(PerTermReport {
            support: orig.support().to_vec(),
            stage: staged.stage,
            distance_to_input: distance,
            bound,
        });
    }

    let mut max_residual = 0.0f64;
    for (a, b) in rounded.overlapping_pairs() {
        let r = pairwise_commutator_norm(&rounded.terms()[a], &rounded.terms()[b])?;
        max_residual = max_residual.max(r);
    }
    if max_residual > COMMUTE_TOL {
        bounds_ok = false;
    }

    let report = RoundingReport {
        format: FORMAT_REPORT.to_string(),
        eps,
        stage_params: params,
        pivots: pivots.iter().map(pivot_report).collect(),
        per_term,
        global_distance_bound: ROUNDING_CONSTANT * h.term_count() as f64 * eps.powf(1.0 / 6.0),
        max_residual_commutator: max_residual,
        bounds_satisfied: bounds_ok,
    };
    Ok((rounded, report))
}

#[cfg(test)]
mod tests;
