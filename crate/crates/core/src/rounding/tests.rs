use super::*;
use crate::generators::{random_near_commuting, tfim_chain, triangle_figure, triangle_paper_rounded};
use crate::linalg::commutator;
use crate::pauli::Pauli;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian2(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.add(&g.dagger()).scale(c(0.5, 0.0))
}

#[test]
fn stage_params_schedule() {
    let p = StageParams::new(1e-6);
    assert!((p.eta2 - 1e-2).abs() < 1e-15);
    assert!((p.eps1 - (1e-6 + 16.0 * 1e-2)).abs() < 1e-15);
    assert!((p.eta1 - (1e-6 + 0.16f64).sqrt()).abs() < 1e-15);
    let z = StageParams::new(0.0);
    assert_eq!((z.eta2, z.eps1, z.eta1), (0.0, 0.0, 0.0));
}

#[test]
fn pinch_x_by_z_gives_zero() {
    let x = Pauli::X.matrix();
    let z = Pauli::Z.matrix();
    let p = pinch(&x, &z).unwrap();
    assert!(p.max_abs() < 1e-14);
    // Distance 1 = ||[X,Z]|| / Δ(Z) = 2/2.
    let dist = operator_norm(&x.sub(&p)).unwrap();
    assert!((dist - 1.0).abs() < 1e-12);
}

#[test]
fn pinch_fixes_commuting_operators() {
    let z = Pauli::Z.matrix();
    let b = ComplexMatrix::from_rows(&[vec![c(0.3, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-0.7, 0.0)]]);
    let p = pinch(&b, &z).unwrap();
    assert!(p.sub(&b).max_abs() < 1e-14);
}

#[test]
fn pinch_small_x_admixture() {
    let z = Pauli::Z.matrix();
    let b = z.add(&Pauli::X.matrix().scale(c(0.01, 0.0)));
    let p = pinch(&b, &z).unwrap();
    assert!(p.sub(&z).max_abs() < 1e-14);
    assert!((operator_norm(&b.sub(&p)).unwrap() - 0.01).abs() < 1e-14);
}

#[test]
fn pinch_rejects_degenerate_pivot() {
    let x = Pauli::X.matrix();
    assert!(matches!(
        pinch(&x, &ComplexMatrix::identity(2)),
        Err(Error::DegeneratePivot { .. })
    ));
}

#[test]
fn pinch_identity_random() {
    // ||B - pinch(B,A)|| == ||[B,A]||/Δ(A) and [pinch(B,A), A] == 0.
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for _ in 0..2000 {
        let a = random_hermitian2(&mut rng);
        let dec = spectral_decompose_2x2(&a).unwrap();
        if dec.gap() < 0.1 {
            continue;
        }
        let b = random_hermitian2(&mut rng);
        let p = pinch(&b, &a).unwrap();
        let lhs = operator_norm(&b.sub(&p)).unwrap();
        let rhs = operator_norm(&commutator(&b, &a).unwrap()).unwrap() / dec.gap();
        assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
        assert!(operator_norm(&commutator(&p, &a).unwrap()).unwrap() < 1e-10);
        // Idempotence.
        let pp = pinch(&p, &a).unwrap();
        assert!(pp.sub(&p).max_abs() < 1e-12);
    }
}

#[test]
fn snap_cases() {
    let b = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.9, 0.0)]]);
    let s = snap(&b).unwrap();
    assert!(s.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-14);
    assert!((operator_norm(&b.sub(&s)).unwrap() - 0.1).abs() < 1e-12);

    let s = snap(&ComplexMatrix::identity(2)).unwrap();
    assert!(s.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-14);

    let b = Pauli::X.matrix().scale(c(0.05, 0.0));
    let s = snap(&b).unwrap();
    assert!(s.sub(&ComplexMatrix::identity(2).scale(c(0.05, 0.0))).max_abs() < 1e-14);
    assert!((operator_norm(&b.sub(&s)).unwrap() - 0.1).abs() < 1e-12);
}

#[test]
fn snap_distance_equals_gap_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(223);
    for _ in 0..2000 {
        let b = random_hermitian2(&mut rng);
        let s = snap(&b).unwrap();
        let dec = spectral_decompose_2x2(&b).unwrap();
        let dist = operator_norm(&b.sub(&s)).unwrap();
        assert!((dist - dec.gap()).abs() < 1e-10);
    }
}

#[test]
fn snap_term_trivial_on_weak_qubit_is_free() {
    // I ⊗ X with the left qubit weak: already trivial there, distance 0.
    let mut coeffs = [[0.0; 4]; 4];
    coeffs[0][1] = 1.0;
    let term = LocalTerm::two_local(0, 1, coeffs).unwrap();
    let snapped = snap_term_to_1local(&term, 0, 0.5).unwrap();
    assert!(snapped.matrix().sub(&term.matrix()).max_abs() < 1e-14);
    assert!(snapped.is_trivial_on(0));
}

#[test]
fn snap_term_small_admixture() {
    // (I + 0.01 Z) ⊗ X normalized; weak qubit left, η = 0.1.
    let m = ComplexMatrix::identity(2)
        .add(&Pauli::Z.matrix().scale(c(0.01, 0.0)))
        .kron(&Pauli::X.matrix())
        .scale(c(1.0 / 1.01, 0.0));
    let term = LocalTerm::from_matrix(&[0, 1], &m).unwrap();
    let snapped = snap_term_to_1local(&term, 0, 0.1).unwrap();
    assert!(snapped.is_trivial_on(0));
    let dist = operator_norm(&snapped.matrix().sub(&term.matrix())).unwrap();
    assert!(dist <= 0.4 + 1e-12);
    // Exact distance: ||(I + 0.01Z)/1.01 - I|| = 0.02/1.01.
    assert!((dist - 0.02 / 1.01).abs() < 1e-12);
}

#[test]
fn snap_term_rejects_gapped_and_non_2local() {
    let mut coeffs = [[0.0; 4]; 4];
    coeffs[3][1] = 1.0; // Z ⊗ X, gap 2 about the left qubit
    let term = LocalTerm::two_local(0, 1, coeffs).unwrap();
    assert!(matches!(snap_term_to_1local(&term, 0, 1.0), Err(Error::GapPrecondition(_))));

    let field = LocalTerm::one_local(0, [0.0, 0.1, 0.0, 0.0]);
    assert!(matches!(snap_term_to_1local(&field, 0, 1.0), Err(Error::GapPrecondition(_))));
}

#[test]
fn select_pivots_triangle_walkthrough() {
    let h = triangle_figure();
    let params = StageParams::new(0.02);
    let snapped = snap_stages(&h, &params).unwrap();
    // All three terms are two-sided gapped at η₂ = 0.02^(1/3).
    assert!(snapped.staged.iter().all(|s| s.stage == StageTag::Kept2Local));
    let pivots = select_pivots(&snapped).unwrap();
    assert_eq!(pivots.len(), 3);
    for p in &pivots {
        match &p.action {
            PivotAction::Pinch { operator, gap_floor, .. } => {
                let dec = spectral_decompose_2x2(operator).unwrap();
                assert!(dec.gap() >= *gap_floor);
                assert!(dec.gap() >= params.eta2);
            }
            PivotAction::Identity => panic!("every triangle qubit is doubly touched"),
        }
    }
    // Qubit 1 pivot is the |0><0|-like component (α = 1 of the first term).
    match &pivots[1].action {
        PivotAction::Pinch { operator, provenance, .. } => {
            assert_eq!(
                provenance,
                &PivotProvenance::Component { term_support: vec![0, 1], alpha: 1 }
            );
            let p0 = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
            assert!(operator.sub(&p0).max_abs() < 1e-12);
        }
        PivotAction::Identity => unreachable!(),
    }
}

#[test]
fn select_pivots_single_term_all_identity() {
    let mut coeffs = [[0.0; 4]; 4];
    coeffs[1][1] = 1.0;
    let h = Hamiltonian::new(3, vec![LocalTerm::two_local(0, 1, coeffs).unwrap()], true).unwrap();
    let snapped = snap_stages(&h, &StageParams::new(0.0)).unwrap();
    let pivots = select_pivots(&snapped).unwrap();
    assert!(pivots.iter().all(|p| matches!(p.action, PivotAction::Identity)));
}

#[test]
fn select_pivots_zz_chain_middle_qubit() {
    let h = tfim_chain(3, 0.0).unwrap();
    let snapped = snap_stages(&h, &StageParams::new(0.0)).unwrap();
    let pivots = select_pivots(&snapped).unwrap();
    assert!(matches!(pivots[0].action, PivotAction::Identity));
    assert!(matches!(pivots[2].action, PivotAction::Identity));
    match &pivots[1].action {
        PivotAction::Pinch { operator, provenance, .. } => {
            assert_eq!(
                provenance,
                &PivotProvenance::Component { term_support: vec![0, 1], alpha: 3 }
            );
            // A Z-like operator with gap 2.
            assert!((spectral_decompose_2x2(operator).unwrap().gap() - 2.0).abs() < 1e-12);
        }
        PivotAction::Identity => panic!("middle qubit needs a pivot"),
    }
}

#[test]
fn global_pinch_identity_pivots_is_noop() {
    let h = triangle_figure();
    let pivots: Vec<Pivot> = (0..3).map(Pivot::identity).collect();
    let out = global_pinch(&h, &pivots).unwrap();
    for (a, b) in h.terms().iter().zip(out.terms()) {
        assert!(a.matrix().sub(&b.matrix()).max_abs() < 1e-15);
    }
}

#[test]
fn global_pinch_with_reference_pivots_reproduces_reference_output() {
    // Pinching with X_0, |0><0|_1, X_2 forces the triangle Hamiltonian to be
    // diagonal in that product basis, giving exactly the reference terms.
    let h = triangle_figure();
    let p0 = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
    let pivots = vec![
        Pivot::pinch_by(0, &Pauli::X.matrix(), 0.02, 2.0, PivotProvenance::Identity).unwrap(),
        Pivot::pinch_by(1, &p0, 0.02, 1.0, PivotProvenance::Identity).unwrap(),
        Pivot::pinch_by(2, &Pauli::X.matrix(), 0.02, 2.0, PivotProvenance::Identity).unwrap(),
    ];
    let out = global_pinch(&h, &pivots).unwrap();
    let reference = triangle_paper_rounded();
    for (a, b) in out.terms().iter().zip(reference.terms()) {
        assert!(a.matrix().sub(&b.matrix()).max_abs() < 1e-12, "support {:?}", a.support());
    }
    // Distances from the input: 0.01-scale, far inside 216 ε^(1/6).
    for (a, b) in out.terms().iter().zip(h.terms()) {
        let d = operator_norm(&a.matrix().sub(&b.matrix())).unwrap();
        assert!(d <= 0.02 + 1e-12);
    }
}

#[test]
fn global_pinch_commuting_input_with_own_gapped_pivots_is_fixed() {
    let h = tfim_chain(4, 0.0).unwrap();
    let snapped = snap_stages(&h, &StageParams::new(0.0)).unwrap();
    let pivots = select_pivots(&snapped).unwrap();
    let out = global_pinch(&h, &pivots).unwrap();
    for (a, b) in h.terms().iter().zip(out.terms()) {
        assert!(a.matrix().sub(&b.matrix()).max_abs() < 1e-10);
    }
}

#[test]
fn round_exactly_commuting_is_fixed_point() {
    let h = tfim_chain(5, 0.0).unwrap();
    let (out, report) = round(&h, None).unwrap();
    assert_eq!(report.eps, 0.0);
    for (a, b) in h.terms().iter().zip(out.terms()) {
        assert!(a.matrix().sub(&b.matrix()).max_abs() < 1e-10);
    }
    for pt in &report.per_term {
        assert!(pt.distance_to_input < 1e-10);
    }
    assert!(report.bounds_satisfied);
}

#[test]
fn round_triangle_full_audit() {
    let h = triangle_figure();
    let (out, report) = round(&h, None).unwrap();
    assert!((report.eps - 0.02).abs() < 1e-12);
    assert!(report.max_residual_commutator <= COMMUTE_TOL);
    assert!(report.bounds_satisfied);
    let cap = ROUNDING_CONSTANT * 0.02f64.powf(1.0 / 6.0);
    for pt in &report.per_term {
        assert!(pt.distance_to_input <= cap + BOUND_SLACK);
        // Realized distances are 0.01-scale on this instance.
        assert!(pt.distance_to_input < 0.05, "distance {}", pt.distance_to_input);
    }
    // Same supports, exact commutation.
    for (a, b) in h.terms().iter().zip(out.terms()) {
        assert_eq!(a.support(), b.support());
    }
    // The reference output also satisfies the same per-term cap.
    let reference = triangle_paper_rounded();
    for (r, i) in reference.terms().iter().zip(h.terms()) {
        let d = operator_norm(&r.matrix().sub(&i.matrix())).unwrap();
        assert!(d <= cap + BOUND_SLACK);
    }
}

#[test]
fn round_tfim_weak_field() {
    let h = tfim_chain(6, 1e-6).unwrap();
    let (out, report) = round(&h, None).unwrap();
    assert!((report.eps - 2e-6).abs() < 1e-15);
    assert!(report.max_residual_commutator <= COMMUTE_TOL);
    assert!(report.bounds_satisfied);
    let cap = ROUNDING_CONSTANT * (2e-6f64).powf(1.0 / 6.0);
    for (a, b) in h.terms().iter().zip(out.terms()) {
        let d = operator_norm(&a.matrix().sub(&b.matrix())).unwrap();
        assert!(d <= cap + BOUND_SLACK);
    }
}

#[test]
fn round_rejects_out_of_regime_eps() {
    let h = triangle_figure();
    assert!(matches!(round(&h, Some(2.0)), Err(Error::Regime(_))));
    assert!(matches!(round(&h, Some(-0.5)), Err(Error::Regime(_))));
}

#[test]
fn round_is_deterministic() {
    let h = random_near_commuting(6, 9, 1e-4, 7).unwrap();
    let (out1, rep1) = round(&h, None).unwrap();
    let (out2, rep2) = round(&h, None).unwrap();
    let bytes1 = serde_json::to_string(&rep1).unwrap();
    let bytes2 = serde_json::to_string(&rep2).unwrap();
    assert_eq!(bytes1, bytes2);
    assert_eq!(
        serde_json::to_string(&out1.to_doc()).unwrap(),
        serde_json::to_string(&out2.to_doc()).unwrap()
    );
}

#[test]
fn round_pivot_contract_holds() {
    // For every non-identity pivot R_i: Δ(R_i) ≥ ζ_i and every snapped term
    // touching i has ||[R_i ⊗ I, h]|| ≤ κ_i.
    for seed in 0..5u64 {
        let h = random_near_commuting(6, 10, 1e-3, seed).unwrap();
        let params = StageParams::new(crate::generators::realized_epsilon(&h).unwrap());
        let snapped = snap_stages(&h, &params).unwrap();
        let pivots = select_pivots(&snapped).unwrap();
        for p in &pivots {
            let (op, kappa, zeta) = match &p.action {
                PivotAction::Identity => continue,
                PivotAction::Pinch { operator, kappa, gap_floor, .. } => (operator, *kappa, *gap_floor),
            };
            assert!(spectral_decompose_2x2(op).unwrap().gap() >= zeta);
            for s in &snapped.staged {
                if !s.term.support().contains(&p.qubit) {
                    continue;
                }
                // Embed R on the pivot qubit within the term's support space.
                let pos = s.term.support().iter().position(|&q| q == p.qubit).unwrap() as u32;
                let k = s.term.locality() as u32;
                let embedded = crate::linalg::embed_on_qubits(op, &[pos], k).unwrap();
                let norm = operator_norm(&commutator(&embedded, &s.term.matrix()).unwrap()).unwrap();
                assert!(norm <= kappa + BOUND_SLACK, "seed {seed}: {norm} > kappa {kappa}");
            }
        }
    }
}

#[test]
fn round_norm_growth_bounded() {
    for seed in 0..5u64 {
        let h = random_near_commuting(5, 8, 1e-2, seed).unwrap();
        let (out, report) = round(&h, None).unwrap();
        let cap = ROUNDING_CONSTANT * report.eps.powf(1.0 / 6.0);
        for (a, b) in h.terms().iter().zip(out.terms()) {
            assert!(b.norm() <= a.norm() + cap + BOUND_SLACK);
        }
    }
}

#[test]
fn robust_transitivity_random() {
    // Δ(B) > ξ ≥ ε and both commutators ≤ ε imply ||[A,C]|| ≤ 6ε/ξ.
    let mut rng = ChaCha8Rng::seed_from_u64(499);
    for _ in 0..1000 {
        let b = random_hermitian2(&mut rng);
        let dec = spectral_decompose_2x2(&b).unwrap();
        let xi = dec.gap() * 0.999;
        if xi < 1e-3 {
            continue;
        }
        let eps = xi * rng.gen_range(0.01..1.0);
        let a = almost_commuting_partner(&mut rng, &b, eps);
        let cm = almost_commuting_partner(&mut rng, &b, eps);
        let ca = operator_norm(&commutator(&a, &b).unwrap()).unwrap();
        let cc = operator_norm(&commutator(&b, &cm).unwrap()).unwrap();
        assert!(ca <= eps + 1e-12 && cc <= eps + 1e-12);
        let ac = operator_norm(&commutator(&a, &cm).unwrap()).unwrap();
        assert!(ac <= 6.0 * eps / xi + BOUND_SLACK, "{ac} > 6·{eps}/{xi}");
    }
}

#[test]
fn exact_transitivity_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(503);
    for _ in 0..500 {
        let b = random_hermitian2(&mut rng);
        let dec = spectral_decompose_2x2(&b).unwrap();
        if dec.gap() < 1e-6 {
            continue;
        }
        // A and C diagonal in B's eigenbasis commute with B exactly.
        let diag = |x: f64, y: f64| {
            dec.projector_min.scale(c(x, 0.0)).add(&dec.projector_max.scale(c(y, 0.0)))
        };
        let a = diag(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let cm = diag(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        assert!(operator_norm(&commutator(&a, &cm).unwrap()).unwrap() <= 1e-10);
    }
}

/// A Hermitian 2×2 with ||·|| ≤ 1 and ||[·, B]|| ≤ eps: a pinched random
/// matrix plus an off-diagonal part scaled to the commutator budget.
fn almost_commuting_partner(rng: &mut ChaCha8Rng, b: &ComplexMatrix, eps: f64) -> ComplexMatrix {
    let raw = random_hermitian2(rng);
    let pinched = pinch(&raw, b).unwrap();
    let off = raw.sub(&pinched);
    let off_comm = operator_norm(&commutator(&off, b).unwrap()).unwrap();
    let scaled_off = if off_comm > 0.0 {
        off.scale(c(eps * rng.gen_range(0.0..1.0) / off_comm, 0.0))
    } else {
        off.scale(c(0.0, 0.0))
    };
    let m = pinched.add(&scaled_off);
    let norm = operator_norm(&m).unwrap();
    if norm > 1.0 {
        m.scale(c(1.0 / norm, 0.0))
    } else {
        m
    }
}

#[test]
fn one_local_inputs_survive_and_pivot() {
    // An X field on qubit 1 next to a nearly-X⊗X coupling: the field has gap
    // 2 ≥ η₁ ≈ 0.31, survives the η₁ stage, and becomes the case-(b) pivot.
    let mut coupling = [[0.0; 4]; 4];
    coupling[1][1] = 0.9; // X ⊗ X
    coupling[3][3] = 1e-7; // small ZZ admixture, ε = 2e-7
    let terms = vec![
        LocalTerm::one_local(1, [0.0, 1.0, 0.0, 0.0]),
        LocalTerm::two_local(1, 2, coupling).unwrap(),
    ];
    let h = Hamiltonian::new(3, terms, true).unwrap();
    let eps = crate::generators::realized_epsilon(&h).unwrap();
    assert!((eps - 2e-7).abs() < 1e-15);
    let (out, report) = round(&h, None).unwrap();
    assert!(report.max_residual_commutator <= COMMUTE_TOL);
    assert!(report.bounds_satisfied);
    assert!(matches!(
        report.pivots[1].provenance,
        PivotProvenance::OneLocalTerm { .. }
    ));
    assert!(matches!(report.pivots[2].provenance, PivotProvenance::Identity));
    // The field survives untouched; the coupling loses its ZZ admixture.
    let field = &out.terms()[0];
    assert_eq!(field.support(), &[1]);
    assert!(field.matrix().sub(&Pauli::X.matrix()).max_abs() < 1e-12);
    let mut xx = [[0.0; 4]; 4];
    xx[1][1] = 0.9;
    let expect = LocalTerm::two_local(1, 2, xx).unwrap();
    assert!(out.terms()[1].matrix().sub(&expect.matrix()).max_abs() < 1e-9);
}

#[test]
fn zero_local_terms_bypass() {
    let terms = vec![
        LocalTerm::zero_local(0.3),
        LocalTerm::two_local(0, 1, {
            let mut z = [[0.0; 4]; 4];
            z[3][3] = 1.0;
            z
        })
        .unwrap(),
    ];
    let h = Hamiltonian::new(2, terms, true).unwrap();
    let (out, report) = round(&h, None).unwrap();
    assert_eq!(report.per_term[0].stage, StageTag::Kept0Local);
    assert_eq!(out.terms()[0].matrix()[(0, 0)].re, 0.3);
}
