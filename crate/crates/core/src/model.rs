//! The 2-local Hamiltonian data model.
//!
//! Terms are stored as real Pauli coefficient tensors rather than dense
//! matrices: real coefficients make Hermiticity structural and keep the file
//! format exact. The instance document is JSON (`acham-v1`):
//!
//! ```json
//! {"format": "acham-v1", "n": 3,
//!  "terms": [{"qubits": [0, 1], "coeffs": [[...4x4 reals...]]},
//!            {"qubits": [2],    "coeffs": [0.0, 1.0, 0.0, 0.0]}]}
//! ```
//!
//! Coefficients are the c_{αβ} in Σ c_{αβ} σ^(α) ⊗ σ^(β) with α indexing the
//! lower qubit (the left tensor factor). 0-local offsets are a bare scalar
//! with empty `qubits`.

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, embed_add, embed_on_qubits, operator_norm, ComplexMatrix, ONE_C,
};
use crate::pauli::{decompose_about, Side, PAULIS};
use serde::{Deserialize, Serialize};

/// Operator-norm slack accepted on the unit-norm ingestion check.
pub const NORM_TOL: f64 = 1e-9;

/// Real Pauli coefficient tensor of a local term.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    /// c · I (energy offset).
    Zero(f64),
    /// Σ_α c_α σ^(α).
    One([f64; 4]),
    /// Σ_{αβ} c_{αβ} σ^(α) ⊗ σ^(β), α on the lower support qubit.
    Two([[f64; 4]; 4]),
}

/// A Hamiltonian term with its support (0, 1 or 2 qubit indices, sorted
/// ascending) and real Pauli coefficient tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    support: Vec<u32>,
    coeffs: Coefficients,
}

impl LocalTerm {
    pub fn zero_local(c: f64) -> Self {
        Self { support: vec![], coeffs: Coefficients::Zero(c) }
    }

    pub fn one_local(q: u32, coeffs: [f64; 4]) -> Self {
        Self { support: vec![q], coeffs: Coefficients::One(coeffs) }
    }

    /// Build a 2-local term; `coeffs[α][β]` has α on `qa`. Swapping to sorted
    /// support transposes the tensor.
    pub fn two_local(qa: u32, qb: u32, coeffs: [[f64; 4]; 4]) -> Result<Self> {
        if qa == qb {
            return Err(Error::Schema(format!("2-local support [{qa}, {qb}] repeats a qubit")));
        }
        if qa < qb {
            Ok(Self { support: vec![qa, qb], coeffs: Coefficients::Two(coeffs) })
        } else {
            let mut t = [[0.0; 4]; 4];
            for (a, row) in coeffs.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    t[b][a] = *v;
                }
            }
            Ok(Self { support: vec![qb, qa], coeffs: Coefficients::Two(t) })
        }
    }

    /// Build directly from a Hermitian matrix on the given (sorted) support.
    pub fn from_matrix(support: &[u32], m: &ComplexMatrix) -> Result<Self> {
        let h = m.symmetrized_hermitian()?;
        match support {
            [] => Ok(Self::zero_local(h[(0, 0)].re)),
            [q] => {
                let mut c = [0.0; 4];
                for (alpha, slot) in c.iter_mut().enumerate() {
                    *slot = 0.5 * PAULIS[alpha].matrix().mul(&h).trace().re;
                }
                Ok(Self::one_local(*q, c))
            }
            [qa, qb] if qa < qb => {
                let mut c = [[0.0; 4]; 4];
                for (alpha, row) in c.iter_mut().enumerate() {
                    for (beta, slot) in row.iter_mut().enumerate() {
                        let basis = PAULIS[alpha].matrix().kron(&PAULIS[beta].matrix());
                        *slot = 0.25 * basis.mul(&h).trace().re;
                    }
                }
                Ok(Self { support: vec![*qa, *qb], coeffs: Coefficients::Two(c) })
            }
            _ => Err(Error::Schema(format!("bad support {support:?}"))),
        }
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn locality(&self) -> usize {
        self.support.len()
    }

    /// Dense matrix on the support (1×1, 2×2 or 4×4). Hermitian by construction.
    pub fn matrix(&self) -> ComplexMatrix {
        match &self.coeffs {
            Coefficients::Zero(c) => {
                let mut m = ComplexMatrix::zeros(1, 1);
                m[(0, 0)] = ONE_C * *c;
                m
            }
            Coefficients::One(c) => {
                let mut m = ComplexMatrix::zeros(2, 2);
                for (alpha, &v) in c.iter().enumerate() {
                    if v != 0.0 {
                        m.add_assign(&PAULIS[alpha].matrix().scale(ONE_C * v));
                    }
                }
                m
            }
            Coefficients::Two(c) => {
                let mut m = ComplexMatrix::zeros(4, 4);
                for (alpha, row) in c.iter().enumerate() {
                    for (beta, &v) in row.iter().enumerate() {
                        if v != 0.0 {
                            m.add_assign(&PAULIS[alpha].matrix().kron(&PAULIS[beta].matrix()).scale(ONE_C * v));
                        }
                    }
                }
                m
            }
        }
    }

    /// Operator norm of the materialized term.
    pub fn norm(&self) -> f64 {
        match &self.coeffs {
            Coefficients::Zero(c) => c.abs(),
            _ => operator_norm(&self.matrix()).expect("term matrices are square"),
        }
    }

    /// Exact structural check: no coefficient with a non-identity Pauli on `q`.
    pub fn is_trivial_on(&self, q: u32) -> bool {
        match &self.coeffs {
            Coefficients::Zero(_) => true,
            Coefficients::One(c) => self.support[0] != q || c[1..].iter().all(|&v| v == 0.0),
            Coefficients::Two(c) => {
                if self.support[0] == q {
                    c[1..].iter().all(|row| row.iter().all(|&v| v == 0.0))
                } else if self.support[1] == q {
                    c.iter().all(|row| row[1..].iter().all(|&v| v == 0.0))
                } else {
                    true
                }
            }
        }
    }

    /// Support qubit plus non-triviality there.
    pub fn nontrivially_touches(&self, q: u32) -> bool {
        self.support.contains(&q) && !self.is_trivial_on(q)
    }

    /// Local Pauli components about one of this term's qubits.
    /// For a 1-local term this is the single 2×2 operator plus three zeros.
    pub fn components_about(&self, q: u32) -> Result<[ComplexMatrix; 4]> {
        match &self.coeffs {
            Coefficients::Two(_) => {
                let side = if self.support[0] == q {
                    Side::Lower
                } else if self.support[1] == q {
                    Side::Upper
                } else {
                    return Err(Error::DimensionMismatch(format!(
                        "qubit {q} not in support {:?}",
                        self.support
                    )));
                };
                decompose_about(&self.matrix(), side)
            }
            Coefficients::One(_) if self.support[0] == q => {
                let mut out: [ComplexMatrix; 4] = std::array::from_fn(|_| ComplexMatrix::zeros(2, 2));
                out[0] = self.matrix();
                Ok(out)
            }
            _ => Err(Error::DimensionMismatch(format!(
                "qubit {q} not in support {:?}",
                self.support
            ))),
        }
    }

    fn doc_coeffs(&self) -> CoeffsDoc {
        match &self.coeffs {
            Coefficients::Zero(c) => CoeffsDoc::Scalar(*c),
            Coefficients::One(c) => CoeffsDoc::Vector(*c),
            Coefficients::Two(c) => CoeffsDoc::Matrix(*c),
        }
    }
}

/// Ordered term list over n qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: u32,
    terms: Vec<LocalTerm>,
}

/// Pairwise commutator norms and their maximum ε.
///
/// `pairwise` holds only support-overlapping pairs (sorted by index pair);
/// disjoint-support pairs are exactly zero and never computed.
#[derive(Debug, Clone)]
pub struct CommutatorProfile {
    pub pairwise: Vec<((usize, usize), f64)>,
    pub epsilon: f64,
}

impl Hamiltonian {
    /// Assemble from terms without document round-tripping. Terms are sorted
    /// by support, duplicates merged, and (under `enforce_unit_norm`) checked
    /// against the unit-norm contract.
    pub fn new(n: u32, terms: Vec<LocalTerm>, enforce_unit_norm: bool) -> Result<Self> {
        for t in &terms {
            for &q in t.support() {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, n });
                }
            }
        }
        let mut sorted = terms;
        sorted.sort_by(|a, b| a.support.cmp(&b.support));
        // Merge duplicate supports.
        let mut merged: Vec<LocalTerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            if let Some(last) = merged.last_mut() {
                if last.support == t.support {
                    match (&mut last.coeffs, &t.coeffs) {
                        (Coefficients::Zero(a), Coefficients::Zero(b)) => *a += b,
                        (Coefficients::One(a), Coefficients::One(b)) => {
                            for (x, y) in a.iter_mut().zip(b) {
                                *x += y;
                            }
                        }
                        (Coefficients::Two(a), Coefficients::Two(b)) => {
                            for (ra, rb) in a.iter_mut().zip(b) {
                                for (x, y) in ra.iter_mut().zip(rb) {
                                    *x += y;
                                }
                            }
                        }
                        _ => unreachable!("same support implies same arity"),
                    }
                    continue;
                }
            }
            merged.push(t);
        }
        if enforce_unit_norm {
            for t in &merged {
                let norm = t.norm();
                if norm > 1.0 + NORM_TOL {
                    return Err(Error::NormViolation { support: t.support.clone(), norm });
                }
            }
        }
        Ok(Self { n, terms: merged })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Interaction-graph view: indices of terms whose support contains each qubit.
    pub fn terms_on_qubits(&self) -> Vec<Vec<usize>> {
        let mut by_qubit = vec![Vec::new(); self.n as usize];
        for (i, t) in self.terms.iter().enumerate() {
            for &q in t.support() {
                by_qubit[q as usize].push(i);
            }
        }
        by_qubit
    }

    /// All term-index pairs with overlapping support, each exactly once,
    /// in deterministic order. Post-merge, two distinct terms can share at
    /// most one qubit, so scanning per-qubit lists never duplicates a pair.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let by_qubit = self.terms_on_qubits();
        let mut pairs = Vec::new();
        for list in &by_qubit {
            for (i, &a) in list.iter().enumerate() {
                for &b in &list[i + 1..] {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// Dense 2^n × 2^n embedding (n ≤ 12).
    pub fn dense_matrix(&self) -> Result<ComplexMatrix> {
        if self.n > crate::linalg::MAX_QUBITS {
            return Err(Error::DimensionCap { dim: 1usize << self.n.min(40), max_qubits: crate::linalg::MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            if t.support().is_empty() {
                let c = match t.coeffs() {
                    Coefficients::Zero(c) => *c,
                    _ => unreachable!(),
                };
                for i in 0..dim {
                    out[(i, i)] += ONE_C * c;
                }
            } else {
                embed_add(&mut out, &t.matrix(), t.support(), self.n, ONE_C)?;
            }
        }
        Ok(out)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            format: FORMAT_INSTANCE.to_string(),
            n: self.n,
            terms: self.terms.iter().map(|t| TermDoc { qubits: t.support.clone(), coeffs: t.doc_coeffs() }).collect(),
            a: None,
            b: None,
        }
    }
}

/// ‖[h1, h2]‖ on the joint support; exactly 0 for disjoint supports.
pub fn pairwise_commutator_norm(h1: &LocalTerm, h2: &LocalTerm) -> Result<f64> {
    let mut joint: Vec<u32> = h1.support().to_vec();
    for &q in h2.support() {
        if !joint.contains(&q) {
            joint.push(q);
        }
    }
    if joint.len() == h1.support().len() + h2.support().len() {
        return Ok(0.0); // disjoint supports, including any 0-local term
    }
    joint.sort_unstable();
    let relative = |sup: &[u32]| -> Vec<u32> {
        sup.iter().map(|q| joint.iter().position(|j| j == q).unwrap() as u32).collect()
    };
    let k = joint.len() as u32;
    let m1 = embed_on_qubits(&h1.matrix(), &relative(h1.support()), k)?;
    let m2 = embed_on_qubits(&h2.matrix(), &relative(h2.support()), k)?;
    operator_norm(&commutator(&m1, &m2)?)
}

/// Evaluate all overlapping pairs; ε is the maximum (0 when none).
pub fn commutator_profile(h: &Hamiltonian) -> Result<CommutatorProfile> {
    let mut pairwise = Vec::new();
    let mut epsilon = 0.0f64;
    for (a, b) in h.overlapping_pairs() {
        let norm = pairwise_commutator_norm(&h.terms[a], &h.terms[b])?;
        epsilon = epsilon.max(norm);
        pairwise.push(((a, b), norm));
    }
    Ok(CommutatorProfile { pairwise, epsilon })
}

pub const FORMAT_INSTANCE: &str = "acham-v1";

/// JSON instance document (`acham-v1`). Promise instances extend it with
/// the `a`, `b` threshold fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub format: String,
    pub n: u32,
    pub terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDoc {
    pub qubits: Vec<u32>,
    pub coeffs: CoeffsDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffsDoc {
    Scalar(f64),
    Vector([f64; 4]),
    Matrix([[f64; 4]; 4]),
}

fn terms_from_doc(doc: &InstanceDoc) -> Result<Vec<LocalTerm>> {
    if doc.format != FORMAT_INSTANCE {
        return Err(Error::Schema(format!(
            "expected format \"{FORMAT_INSTANCE}\", got \"{}\"",
            doc.format
        )));
    }
    let mut terms = Vec::with_capacity(doc.terms.len());
    for td in &doc.terms {
        let term = match (&td.qubits[..], &td.coeffs) {
            ([], CoeffsDoc::Scalar(c)) => LocalTerm::zero_local(*c),
            ([q], CoeffsDoc::Vector(c)) => LocalTerm::one_local(*q, *c),
            ([qa, qb], CoeffsDoc::Matrix(c)) => LocalTerm::two_local(*qa, *qb, *c)?,
            (qs, _) => {
                return Err(Error::Schema(format!(
                    "term on {qs:?}: coefficient shape does not match qubit count"
                )))
            }
        };
        terms.push(term);
    }
    Ok(terms)
}

/// Parse and validate an instance document into a Hamiltonian.
///
/// Terms are sorted by support; duplicate-support terms are summed and then
/// re-checked against the unit-norm contract, a hard error because every
/// rounding bound assumes ‖h_i‖ ≤ 1.
pub fn ingest(doc: &InstanceDoc) -> Result<Hamiltonian> {
    Hamiltonian::new(doc.n, terms_from_doc(doc)?, true)
}

/// Parse a rounded-output document: identical schema and index validation,
/// but no unit-norm cap (rounded terms may exceed 1 by the rounding error).
pub fn ingest_rounded(doc: &InstanceDoc) -> Result<Hamiltonian> {
    Hamiltonian::new(doc.n, terms_from_doc(doc)?, false)
}

pub fn read_instance(path: &std::path::Path) -> Result<(InstanceDoc, Hamiltonian)> {
    let text = std::fs::read_to_string(path)?;
    let doc: InstanceDoc = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    let h = ingest(&doc)?;
    Ok((doc, h))
}

pub fn read_rounded_instance(path: &std::path::Path) -> Result<(InstanceDoc, Hamiltonian)> {
    let text = std::fs::read_to_string(path)?;
    let doc: InstanceDoc = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    let h = ingest_rounded(&doc)?;
    Ok((doc, h))
}
