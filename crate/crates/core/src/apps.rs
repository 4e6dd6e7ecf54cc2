//! Application layers on top of the rounding core: the almost-commuting →
//! commuting promise-problem reduction, Gibbs-sampling continuity
//! certificates, and the commuting/remainder split for fast simulation.

use crate::error::{Error, Result};
use crate::linalg::{
    apply_local_left, hermitian_eig, matrix_exponential, operator_norm, trace_norm, ComplexMatrix,
    I_C, MAX_QUBITS, ONE_C,
};
use crate::model::{commutator_profile, Coefficients, Hamiltonian, InstanceDoc, LocalTerm};
use crate::rounding::{round, RoundingReport, BOUND_SLACK, COMMUTE_TOL, ROUNDING_CONSTANT};
use crate::verify::{global_distance, verify_commuting};
use serde::{Deserialize, Serialize};

/// A local-Hamiltonian promise instance (H, a, b) with a < b.
/// Γ = b − a is the absolute promise gap and γ = Γ/m the relative gap.
#[derive(Debug, Clone)]
pub struct PromiseInstance {
    pub hamiltonian: Hamiltonian,
    pub a: f64,
    pub b: f64,
}

impl PromiseInstance {
    pub fn new(hamiltonian: Hamiltonian, a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Schema(format!("promise thresholds need a < b, got a = {a}, b = {b}")));
        }
        Ok(Self { hamiltonian, a, b })
    }

    pub fn absolute_gap(&self) -> f64 {
        self.b - self.a
    }

    pub fn relative_gap(&self) -> f64 {
        self.absolute_gap() / self.hamiltonian.term_count().max(1) as f64
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let mut doc = self.hamiltonian.to_doc();
        doc.a = Some(self.a);
        doc.b = Some(self.b);
        doc
    }
}

/// Reduce an ε-almost-commuting promise instance to a commuting one:
/// H′ = round(H), a′ = a + 216·m·ε^(1/6), b′ = b − 216·m·ε^(1/6).
///
/// Collapsing the gap (a′ ≥ b′) is an error that reports the ε ceiling
/// below which the reduction would survive, rather than silently emitting
/// an unpromised instance.
pub fn reduce_promise(inst: &PromiseInstance, eps: f64) -> Result<(PromiseInstance, RoundingReport)> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Regime(format!("eps = {eps} outside [0, 1]")));
    }
    let m = inst.hamiltonian.term_count() as f64;
    let shift = ROUNDING_CONSTANT * m * eps.powf(1.0 / 6.0);
    let a_new = inst.a + shift;
    let b_new = inst.b - shift;
    if a_new >= b_new {
        let ceiling = (inst.absolute_gap() / (2.0 * ROUNDING_CONSTANT * m)).powi(6);
        return Err(Error::GapCollapse(format!(
            "threshold shift 216·m·eps^(1/6) = {shift:.6e} eats the gap {:.6e}; \
             the reduction needs eps < {ceiling:.6e}",
            inst.absolute_gap()
        )));
    }
    let (rounded, report) = round(&inst.hamiltonian, Some(eps))?;
    Ok((PromiseInstance { hamiltonian: rounded, a: a_new, b: b_new }, report))
}

/// Gibbs state e^(−βH) / Tr[e^(−βH)] of the dense embedding (n ≤ 12),
/// computed through the eigendecomposition with a spectral shift so large β
/// cannot overflow.
pub fn gibbs_state(h: &Hamiltonian, beta: f64) -> Result<ComplexMatrix> {
    if beta < 0.0 {
        return Err(Error::Regime(format!("beta = {beta} must be nonnegative")));
    }
    let dense = h.dense_matrix()?;
    let (vals, vecs) = hermitian_eig(&dense, true)?;
    let v = vecs.expect("vectors requested");
    let e0 = vals.first().copied().unwrap_or(0.0);
    let weights: Vec<f64> = vals.iter().map(|&l| (-beta * (l - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let dim = dense.rows();
    let mut core = ComplexMatrix::zeros(dim, dim);
    for (i, w) in weights.iter().enumerate() {
        core[(i, i)] = ONE_C * (w / z);
    }
    Ok(v.mul(&core).mul(&v.dagger()))
}

pub const FORMAT_GIBBS: &str = "acham-gibbs-v1";

/// Certificate that Gibbs sampling for H reduces to Gibbs sampling for the
/// rounded Ĥ at the same β (`acham-gibbs-v1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsCertificate {
    pub format: String,
    pub beta: f64,
    pub delta_target: f64,
    pub eps: f64,
    /// ||H − Ĥ||: dense when n ≤ 12, else the 216·m·ε^(1/6) bound.
    pub rounding_distance: f64,
    pub rounding_distance_exact: bool,
    /// exp(2β·rounding_distance) − 1.
    pub continuity_bound: f64,
    /// Whether 216·m·ε^(1/6) ≤ ln(1 + δ/2)/(2β), the regime in which the
    /// reduction meets the δ target.
    pub regime_ok: bool,
    /// ||ρ_β(H) − ρ_β(Ĥ)||₁, measured densely when n ≤ 10.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_trace_distance: Option<f64>,
}

/// Dense measurement cap for the Gibbs trace-distance check: two matrix
/// exponentials plus a trace norm stay affordable through n = 10.
const GIBBS_MEASURE_MAX_QUBITS: u32 = 10;

/// Certify the Gibbs-sampling reduction for (H, β, δ). When n ≤ 10 the trace
/// distance between the two Gibbs states is measured and checked against the
/// continuity bound exp(2β‖H−Ĥ‖) − 1.
pub fn certify_gibbs_reduction(h: &Hamiltonian, beta: f64, delta: f64) -> Result<GibbsCertificate> {
    if beta <= 0.0 || delta <= 0.0 {
        return Err(Error::Regime(format!("need beta > 0 and delta > 0, got beta = {beta}, delta = {delta}")));
    }
    let eps = commutator_profile(h)?.epsilon;
    let (rounded, _) = round(h, None)?;
    let m = h.term_count() as f64;
    let worst_case = ROUNDING_CONSTANT * m * eps.powf(1.0 / 6.0);
    let (dist, exact) = if h.n() <= MAX_QUBITS {
        global_distance(h, &rounded)?
    } else {
        (worst_case, false)
    };
    let continuity_bound = (2.0 * beta * dist).exp_m1();
    let regime_ok = worst_case <= (1.0 + delta / 2.0).ln() / (2.0 * beta);

    let measured = if h.n() <= GIBBS_MEASURE_MAX_QUBITS {
        let rho_in = gibbs_state(h, beta)?;
        let rho_out = gibbs_state(&rounded, beta)?;
        let td = trace_norm(&rho_in.sub(&rho_out))?;
        if td > continuity_bound + BOUND_SLACK {
            return Err(Error::Audit(format!(
                "Gibbs continuity violated: trace distance {td:.6e} exceeds bound {continuity_bound:.6e}"
            )));
        }
        Some(td)
    } else {
        None
    };

    Ok(GibbsCertificate {
        format: FORMAT_GIBBS.to_string(),
        beta,
        delta_target: delta,
        eps,
        rounding_distance: dist,
        rounding_distance_exact: exact,
        continuity_bound,
        regime_ok,
        measured_trace_distance: measured,
    })
}

/// Time evolution of a commuting Hamiltonian as the ordered product of
/// per-term exponentials ∏_i exp(i·h_i·t). Requires the terms to commute to
/// 1e-9; each factor is a local exponential applied in place, so this runs
/// in O(m·4^n) rather than O(m·8^n).
pub fn commuting_evolution(hc: &Hamiltonian, t: f64) -> Result<ComplexMatrix> {
    let (ok, residual) = verify_commuting(hc, COMMUTE_TOL)?;
    if !ok {
        return Err(Error::NonCommuting { residual, tol: COMMUTE_TOL });
    }
    if hc.n() > MAX_QUBITS {
        return Err(Error::DimensionCap { dim: 1usize << hc.n().min(40), max_qubits: MAX_QUBITS });
    }
    let dim = 1usize << hc.n();
    let mut w = ComplexMatrix::identity(dim);
    for term in hc.terms() {
        match term.coeffs() {
            Coefficients::Zero(c) => {
                let phase = (I_C * (*c * t)).exp();
                w = w.scale(phase);
            }
            _ => {
                let gate = matrix_exponential(&term.matrix(), I_C * t)?;
                apply_local_left(&gate, term.support(), hc.n(), &mut w)?;
            }
        }
    }
    Ok(w)
}

pub const FORMAT_SPLIT: &str = "acham-split-v1";

/// The H = Ĥ + Δ decomposition for interaction-picture simulation:
/// Ĥ commuting (the fast part), Δ the term-wise remainder (the slow part).
#[derive(Debug, Clone)]
pub struct SimulationSplit {
    pub h_commuting: Hamiltonian,
    pub delta: Hamiltonian,
    pub eps: f64,
    /// Bound on ||Ĥ||: dense value when n ≤ 12, else the sum of term norms (≤ m).
    pub alpha_a: f64,
    /// Bound on ||Δ||: dense value when n ≤ 12, else 216·m·ε^(1/6).
    pub alpha_b: f64,
    pub alpha_b_exact: bool,
    pub report: RoundingReport,
}

/// Serialized form of the split (`acham-split-v1`). The gate-cost line
/// substitutes the realized α_B into α_B·t·(T_block + m), the headline
/// scaling up to polylog factors; T_block and t are caller-supplied cost
/// parameters, never estimated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitDoc {
    pub format: String,
    pub eps: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub alpha_b_exact: bool,
    pub h_commuting: InstanceDoc,
    pub delta: InstanceDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<SplitCost>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitCost {
    pub t: f64,
    pub t_block: f64,
    /// The expression the value instantiates.
    pub formula: String,
    pub value: f64,
}

impl SimulationSplit {
    pub fn to_doc(&self, cost_params: Option<(f64, f64)>) -> SplitDoc {
        let cost = cost_params.map(|(t, t_block)| {
            let m = self.h_commuting.term_count() as f64;
            SplitCost {
                t,
                t_block,
                formula: "alpha_B * t * (T_block + m), up to polylog factors".to_string(),
                value: self.alpha_b * t * (t_block + m),
            }
        });
        SplitDoc {
            format: FORMAT_SPLIT.to_string(),
            eps: self.eps,
            alpha_a: self.alpha_a,
            alpha_b: self.alpha_b,
            alpha_b_exact: self.alpha_b_exact,
            h_commuting: self.h_commuting.to_doc(),
            delta: self.delta.to_doc(),
            cost,
        }
    }
}

/// Split H into the commuting rounding Ĥ and the remainder Δ = H − Ĥ
/// (term-wise, so Δ's supports are contained in the input supports).
pub fn simulation_split(h: &Hamiltonian) -> Result<SimulationSplit> {
    let eps = commutator_profile(h)?.epsilon;
    let (rounded, report) = round(h, None)?;
    let mut delta_terms = Vec::with_capacity(h.term_count());
    for (orig, out) in h.terms().iter().zip(rounded.terms()) {
        let diff = orig.matrix().sub(&out.matrix());
        delta_terms.push(LocalTerm::from_matrix(orig.support(), &diff)?);
    }
    let delta = Hamiltonian::new(h.n(), delta_terms, false)?;

    let m = h.term_count() as f64;
    let (alpha_a, alpha_b, exact) = if h.n() <= MAX_QUBITS {
        let a = operator_norm(&rounded.dense_matrix()?)?;
        let b = operator_norm(&delta.dense_matrix()?)?;
        (a, b, true)
    } else {
        let a = rounded.terms().iter().map(|t| t.norm()).sum();
        let b = ROUNDING_CONSTANT * m * eps.powf(1.0 / 6.0);
        (a, b, false)
    };
    Ok(SimulationSplit { h_commuting: rounded, delta, eps, alpha_a, alpha_b, alpha_b_exact: exact, report })
}
