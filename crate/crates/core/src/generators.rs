//! Deterministic instance generators for tests, benchmarks and fixtures.
//!
//! All randomness flows through ChaCha8 streams seeded explicitly, so the
//! same `GeneratorSpec` always produces the same instance document bytes on
//! every platform.

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, spectral_decompose_2x2, ComplexMatrix, ONE_C};
use crate::model::{commutator_profile, Hamiltonian, LocalTerm};
use crate::pauli::PAULIS;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

/// Instance family plus its parameters. The seed fully determines the output.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Ising chain −Σ Z_iZ_{i+1} − h Σ X_i on n qubits.
    TfimChain { n: u32, h: f64 },
    /// Ising grid with nearest-neighbour couplings on rows × cols qubits.
    TfimGrid { rows: u32, cols: u32, h: f64 },
    /// The worked three-qubit triangle instance (coefficient-exact).
    TriangleFigure,
    /// The reference rounded output of the triangle instance: three exactly
    /// commuting terms diagonal in the X/computational/X product basis.
    TrianglePaper,
    /// A commuting base (terms diagonal in random per-qubit product bases)
    /// plus Hermitian perturbations with commutator budget ≤ eps_target.
    RandomNearCommuting { n: u32, m: usize, eps_target: f64, seed: u64 },
}

pub fn generate(spec: &GeneratorSpec) -> Result<Hamiltonian> {
    match *spec {
        GeneratorSpec::TfimChain { n, h } => tfim_chain(n, h),
        GeneratorSpec::TfimGrid { rows, cols, h } => tfim_grid(rows, cols, h),
        GeneratorSpec::TriangleFigure => Ok(triangle_figure()),
        GeneratorSpec::TrianglePaper => Ok(triangle_paper_rounded()),
        GeneratorSpec::RandomNearCommuting { n, m, eps_target, seed } => {
            random_near_commuting(n, m, eps_target, seed)
        }
    }
}

/// Realized ε of an instance (max pairwise commutator norm); exposed so
/// generators can self-label their outputs.
pub fn realized_epsilon(h: &Hamiltonian) -> Result<f64> {
    Ok(commutator_profile(h)?.epsilon)
}

fn zz_coupling() -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    c[3][3] = -1.0;
    c
}

/// −Σ Z_iZ_{i+1} − h Σ X_i. Field terms appear only for h ≠ 0.
pub fn tfim_chain(n: u32, h: f64) -> Result<Hamiltonian> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::Regime(format!("field h = {h} outside the unit-norm range [0, 1]")));
    }
    if n < 2 {
        return Err(Error::Schema("tfim-chain needs n >= 2".into()));
    }
    let mut terms = Vec::new();
    for i in 0..n - 1 {
        terms.push(LocalTerm::two_local(i, i + 1, zz_coupling())?);
    }
    if h != 0.0 {
        for i in 0..n {
            terms.push(LocalTerm::one_local(i, [0.0, -h, 0.0, 0.0]));
        }
    }
    Hamiltonian::new(n, terms, true)
}

/// Nearest-neighbour Ising grid, row-major qubit layout.
pub fn tfim_grid(rows: u32, cols: u32, h: f64) -> Result<Hamiltonian> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::Regime(format!("field h = {h} outside the unit-norm range [0, 1]")));
    }
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::Schema("tfim-grid needs at least 2 sites".into()));
    }
    let q = |r: u32, c: u32| r * cols + c;
    let mut terms = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                terms.push(LocalTerm::two_local(q(r, c), q(r, c + 1), zz_coupling())?);
            }
            if r + 1 < rows {
                terms.push(LocalTerm::two_local(q(r, c), q(r + 1, c), zz_coupling())?);
            }
        }
    }
    if h != 0.0 {
        for i in 0..rows * cols {
            terms.push(LocalTerm::one_local(i, [0.0, -h, 0.0, 0.0]));
        }
    }
    Hamiltonian::new(rows * cols, terms, true)
}

/// The worked triangle instance:
///   h_{0,1} = X ⊗ |0><0| + (1/100) Z ⊗ |1><1|
///   h_{1,2} = |0><0| ⊗ X + (1/100) |1><1| ⊗ Z
///   h_{0,2} = X ⊗ X
pub fn triangle_figure() -> Hamiltonian {
    let mut h01 = [[0.0; 4]; 4];
    h01[1][0] = 0.5; // X ⊗ |0><0| = (X⊗I + X⊗Z)/2
    h01[1][3] = 0.5;
    h01[3][0] = 0.005; // 0.01 · Z ⊗ |1><1|
    h01[3][3] = -0.005;

    let mut h12 = [[0.0; 4]; 4];
    h12[0][1] = 0.5; // |0><0| ⊗ X
    h12[3][1] = 0.5;
    h12[0][3] = 0.005; // 0.01 · |1><1| ⊗ Z
    h12[3][3] = -0.005;

    let mut h02 = [[0.0; 4]; 4];
    h02[1][1] = 1.0; // X ⊗ X

    let terms = vec![
        LocalTerm::two_local(0, 1, h01).unwrap(),
        LocalTerm::two_local(1, 2, h12).unwrap(),
        LocalTerm::two_local(0, 2, h02).unwrap(),
    ];
    Hamiltonian::new(3, terms, true).unwrap()
}

/// The reference rounded output for the triangle instance:
///   X ⊗ |0><0|  on (0,1),   X ⊗ X  on (0,2),   |0><0| ⊗ X  on (1,2).
pub fn triangle_paper_rounded() -> Hamiltonian {
    let mut h01 = [[0.0; 4]; 4];
    h01[1][0] = 0.5;
    h01[1][3] = 0.5;

    let mut h12 = [[0.0; 4]; 4];
    h12[0][1] = 0.5;
    h12[3][1] = 0.5;

    let mut h02 = [[0.0; 4]; 4];
    h02[1][1] = 1.0;

    let terms = vec![
        LocalTerm::two_local(0, 1, h01).unwrap(),
        LocalTerm::two_local(1, 2, h12).unwrap(),
        LocalTerm::two_local(0, 2, h02).unwrap(),
    ];
    Hamiltonian::new(3, terms, true).unwrap()
}

/// Commuting base diagonal in random per-qubit bases, plus per-term Hermitian
/// perturbations of norm ≤ eps_target/4 on a base of norm ≤ 1 − eps_target/4.
/// The commutator-shift inequality then caps every pairwise commutator at
/// eps_target; the realized ε is re-measured by the caller when needed.
pub fn random_near_commuting(n: u32, m: usize, eps_target: f64, seed: u64) -> Result<Hamiltonian> {
    if !(0.0..=1.0).contains(&eps_target) {
        return Err(Error::Regime(format!("eps_target = {eps_target} outside [0, 1]")));
    }
    if n < 2 {
        return Err(Error::Schema("random-near-commuting needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Random single-qubit eigenbases, one per qubit.
    let bases: Vec<[ComplexMatrix; 2]> = (0..n)
        .map(|_| {
            let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-3);
            let axis = ComplexMatrix::from_rows(&[
                vec![
                    num_complex::Complex64::new(v[2] / norm, 0.0),
                    num_complex::Complex64::new(v[0] / norm, -v[1] / norm),
                ],
                vec![
                    num_complex::Complex64::new(v[0] / norm, v[1] / norm),
                    num_complex::Complex64::new(-v[2] / norm, 0.0),
                ],
            ]);
            let dec = spectral_decompose_2x2(&axis).expect("axis operators are Hermitian");
            [dec.projector_min, dec.projector_max]
        })
        .collect();

    // Deterministic shuffled edge list.
    let mut edges: Vec<(u32, u32)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    edges.shuffle(&mut rng);
    let m = m.min(edges.len());
    let mut picked: Vec<(u32, u32)> = edges.into_iter().take(m).collect();
    picked.sort_unstable();

    let base_cap = 1.0 - eps_target / 4.0;
    let mut terms = Vec::with_capacity(m);
    for &(a, b) in &picked {
        // Base: diagonal in the product of the per-qubit bases.
        let mut base = ComplexMatrix::zeros(4, 4);
        let scale = base_cap * rng.gen_range(0.5..1.0);
        let mut dmax = 0.0f64;
        let mut dvals = [[0.0f64; 2]; 2];
        for drow in dvals.iter_mut() {
            for d in drow.iter_mut() {
                *d = rng.gen_range(-1.0..1.0);
                dmax = dmax.max(d.abs());
            }
        }
        let dmax = dmax.max(1e-9);
        for (j, drow) in dvals.iter().enumerate() {
            for (k, d) in drow.iter().enumerate() {
                let proj = bases[a as usize][j].kron(&bases[b as usize][k]);
                base.add_assign(&proj.scale(ONE_C * (d / dmax * scale)));
            }
        }
        // Perturbation with operator norm ≤ eps_target/4.
        if eps_target > 0.0 {
            let mut pert = ComplexMatrix::zeros(4, 4);
            for pa in PAULIS {
                for pb in PAULIS {
                    let g = rng.gen_range(-1.0..1.0);
                    pert.add_assign(&pa.matrix().kron(&pb.matrix()).scale(ONE_C * g));
                }
            }
            let pnorm = operator_norm(&pert)?;
            if pnorm > 0.0 {
                let target = eps_target / 4.0 * rng.gen_range(0.5..1.0);
                base.add_assign(&pert.scale(ONE_C * (target / pnorm)));
            }
        }
        terms.push(LocalTerm::from_matrix(&[a, b], &base)?);
    }
    Hamiltonian::new(n, terms, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;

    #[test]
    fn triangle_figure_matches_walkthrough_terms() {
        let h = triangle_figure();
        assert_eq!(h.term_count(), 3);
        assert!((realized_epsilon(&h).unwrap() - 0.02).abs() < 1e-12);
        for t in h.terms() {
            assert!(t.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn triangle_paper_terms_commute_exactly() {
        let h = triangle_paper_rounded();
        for (i, a) in h.terms().iter().enumerate() {
            for b in h.terms().iter().skip(i + 1) {
                let v = crate::model::pairwise_commutator_norm(a, b).unwrap();
                assert!(v < 1e-14);
            }
        }
        // Diagonal in the X ⊗ computational ⊗ X product basis by construction.
        let x = crate::pauli::Pauli::X.matrix();
        let t02 = &h.terms()[1];
        assert!(commutator(&t02.matrix(), &x.kron(&x)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn tfim_chain_cases() {
        let h0 = tfim_chain(4, 0.0).unwrap();
        assert_eq!(h0.term_count(), 3);
        assert_eq!(realized_epsilon(&h0).unwrap(), 0.0);

        let h = tfim_chain(4, 0.05).unwrap();
        assert_eq!(h.term_count(), 3 + 4);
        assert!((realized_epsilon(&h).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn tfim_grid_term_count() {
        let h = tfim_grid(2, 3, 0.1).unwrap();
        // Edges: 2 rows × 2 horizontal + 3 vertical = 7; fields: 6.
        assert_eq!(h.term_count(), 7 + 6);
        assert_eq!(h.n(), 6);
    }

    #[test]
    fn tfim_rejects_strong_field() {
        assert!(tfim_chain(4, 1.5).is_err());
    }

    #[test]
    fn random_family_same_seed_same_bytes() {
        let spec = GeneratorSpec::RandomNearCommuting { n: 6, m: 8, eps_target: 1e-4, seed: 42 };
        let d1 = serde_json::to_string(&generate(&spec).unwrap().to_doc()).unwrap();
        let d2 = serde_json::to_string(&generate(&spec).unwrap().to_doc()).unwrap();
        assert_eq!(d1, d2);
        let other = GeneratorSpec::RandomNearCommuting { n: 6, m: 8, eps_target: 1e-4, seed: 43 };
        let d3 = serde_json::to_string(&generate(&other).unwrap().to_doc()).unwrap();
        assert_ne!(d1, d3);
    }

    #[test]
    fn random_family_hits_epsilon_budget() {
        for seed in 0..10u64 {
            for &eps in &[0.0, 1e-6, 1e-3, 0.5] {
                let h = random_near_commuting(7, 10, eps, seed).unwrap();
                let realized = realized_epsilon(&h).unwrap();
                assert!(realized <= eps + 1e-9, "eps {eps} seed {seed}: realized {realized}");
                for t in h.terms() {
                    assert!(t.norm() <= 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn random_family_rejects_bad_target() {
        assert!(random_near_commuting(4, 4, 1.5, 0).is_err());
    }
}
