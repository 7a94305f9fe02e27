//! Randomized invariants. Each case draws its instance from a proptest
//! seed fed to the library's ChaCha generator.

use proptest::prelude::*;

use luequiv::classify::{classify, Membership};
use luequiv::equivalence::{decide_lu, decide_slu, gauge_fix};
use luequiv::linalg::{hermitian_eig, inner, kron, kron_vec, orthogonalize_against};
use luequiv::product_opt::{
    contains_product_vector, max_product_overlap, min_product_overlap, product_expectation, split_product_part,
    ProductVector,
};
use luequiv::random::{
    haar_unitary, random_density, random_hermitian, random_local_unitary, random_nondegenerate_state,
    random_product, random_product_vector, random_unit_vector, sub_rng,
};
use luequiv::spectral::{pure_pt_spectrum, schmidt_coefficients, schmidt_decompose, spectral_decompose};
use luequiv::witness::{state_from_witness, witness_from_state_top, Shift, WitnessStatus};
use luequiv::{BipartiteOperator, ComplexMatrix, Options, Subsystem};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3))]
}

fn small_dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3))]
}

fn sorted_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Orthogonal projectors onto consecutive columns of a Haar unitary.
fn random_projector_tuple(seed: u64, m: usize, n: usize, ranks: &[usize]) -> Vec<BipartiteOperator> {
    let mut rng = sub_rng(seed, 1);
    let u = haar_unitary(&mut rng, m * n);
    let mut start = 0;
    ranks
        .iter()
        .map(|&r| {
            let cols: Vec<_> = (start..start + r).map(|k| u.column(k)).collect();
            start += r;
            BipartiteOperator::projector(&cols, m, n)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_transpose_is_an_involution_preserving_trace_and_norm(seed in any::<u64>(), (m, n) in dims()) {
        let h = BipartiteOperator::new(m, n, random_hermitian(&mut sub_rng(seed, 0), m * n)).unwrap();
        let pt = h.partial_transpose();
        prop_assert!(pt.partial_transpose().distance(&h) < 1e-14);
        prop_assert!((pt.trace() - h.trace()).abs() < 1e-12);
        prop_assert!((pt.matrix().frobenius_norm() - h.matrix().frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_is_lu_invariant(seed in any::<u64>(), (m, n) in dims()) {
        let mut rng = sub_rng(seed, 0);
        let h = random_density(&mut rng, m, n);
        let k = h.conjugate(&random_local_unitary(&mut rng, m, n)).unwrap();
        prop_assert!(sorted_close(&h.eigenvalues(), &k.eigenvalues(), 1e-12));
    }

    #[test]
    fn partial_trace_of_a_product(seed in any::<u64>(), (m, n) in dims()) {
        let mut rng = sub_rng(seed, 0);
        let a = random_hermitian(&mut rng, m);
        let b = random_hermitian(&mut rng, n);
        let ab = BipartiteOperator::new(m, n, kron(&a, &b)).unwrap();
        prop_assert!(ab.partial_trace(Subsystem::B).distance(&a.scale(b.trace())) < 1e-12);
        prop_assert!(ab.partial_trace(Subsystem::A).distance(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn eigenvalues_of_a_sum_obey_weyl(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = sub_rng(seed, 0);
        let a = random_hermitian(&mut rng, d);
        let b = random_hermitian(&mut rng, d);
        let (la, lb) = (hermitian_eig(&a).unwrap().values, hermitian_eig(&b).unwrap().values);
        let ls = hermitian_eig(&(&a + &b)).unwrap().values;
        for i in 0..d {
            prop_assert!(la[i] + lb[0] <= ls[i] + 1e-9);
            prop_assert!(ls[i] <= la[i] + lb[d - 1] + 1e-9);
        }
    }

    #[test]
    fn shift_moves_eigenvalues_and_keeps_projectors(seed in any::<u64>(), (m, n) in dims(), x in -3.0f64..3.0) {
        let h = random_nondegenerate_state(&mut sub_rng(seed, 0), m, n);
        let s = h.shifted(x);
        let (dh, ds) = (spectral_decompose(&h, 1e-8), spectral_decompose(&s, 1e-8));
        prop_assert_eq!(dh.len(), ds.len());
        for (ph, ps) in dh.projectors.iter().zip(&ds.projectors) {
            prop_assert!(ph.distance(ps) < 1e-9);
        }
        for (a, b) in dh.eigenvalues.iter().zip(&ds.eigenvalues) {
            prop_assert!((a + x - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_pt_spectrum_matches_the_partial_transpose(seed in any::<u64>(), (m, n) in dims()) {
        let psi = random_unit_vector(&mut sub_rng(seed, 0), m * n);
        let rho = BipartiteOperator::pure(&psi, m, n).unwrap();
        let from_schmidt = pure_pt_spectrum(&schmidt_decompose(&psi, m, n).unwrap());
        prop_assert!(sorted_close(&from_schmidt, &rho.partial_transpose().eigenvalues(), 1e-10));
    }

    #[test]
    fn rank_one_product_overlap_is_the_top_schmidt_weight(seed in any::<u64>(), (m, n) in dims()) {
        let psi = random_unit_vector(&mut sub_rng(seed, 0), m * n);
        let rho = BipartiteOperator::pure(&psi, m, n).unwrap();
        let s1 = schmidt_coefficients(&psi, m, n).unwrap()[0];
        let value = max_product_overlap(&rho, &Options::default().seesaw).unwrap().value;
        prop_assert!((value - s1 * s1).abs() < 1e-8, "{} vs {}", value, s1 * s1);
    }

    #[test]
    fn product_expectations_are_sandwiched(seed in any::<u64>(), (m, n) in dims()) {
        let mut rng = sub_rng(seed, 0);
        let h = BipartiteOperator::new(m, n, random_hermitian(&mut rng, m * n)).unwrap();
        let h = h.shifted(-h.min_eigenvalue());
        let (lo, hi) = (h.min_eigenvalue(), h.max_eigenvalue());
        let opts = Options::default().seesaw;
        let max = max_product_overlap(&h, &opts).unwrap().value;
        let min = min_product_overlap(&h, &opts).unwrap().value;
        prop_assert!(lo - 1e-9 <= min && min <= max + 1e-9 && max <= hi + 1e-9);
        let (a, b) = random_product(&mut rng, m, n);
        let e = product_expectation(&h, &ProductVector::new(&a, &b).unwrap());
        prop_assert!(min - 1e-9 <= e && e <= max + 1e-9);
    }

    #[test]
    fn classify_pt_bounds_and_lu_invariance(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let rho = random_density(&mut rng, m, n);
        let c = classify(&rho, &Options::default()).unwrap();
        prop_assert!(c.pt_min >= -0.5 - 1e-9 && c.pt_max <= 1.0 + 1e-9);
        let moved = rho.conjugate(&random_local_unitary(&mut rng, m, n)).unwrap();
        let d = classify(&moved, &Options::default()).unwrap();
        prop_assert_eq!(c.is_ppt, d.is_ppt);
        prop_assert!(sorted_close(&c.pt_spectrum, &d.pt_spectrum, 1e-10));
    }

    #[test]
    fn conjugated_range_is_the_moved_range(seed in any::<u64>(), (m, n) in dims(), r in 1usize..4) {
        let mut rng = sub_rng(seed, 0);
        let p = random_projector_tuple(seed, m, n, &[r]).pop().unwrap();
        let lu = random_local_unitary(&mut rng, m, n);
        let q = p.conjugate(&lu).unwrap();
        // Same projector iff same range: build the projector on W·range(P).
        let moved: Vec<_> = p.range_basis(1e-9).iter().map(|v| lu.apply(v)).collect();
        prop_assert!(BipartiteOperator::projector(&moved, m, n).distance(&q) < 1e-10);
        let other = random_projector_tuple(seed ^ 1, m, n, &[r]).pop().unwrap();
        prop_assert!(other.distance(&q) > 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn max_product_overlap_is_lu_covariant(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let h = random_density(&mut rng, m, n);
        let k = h.conjugate(&random_local_unitary(&mut rng, m, n)).unwrap();
        let opts = Options::default().seesaw;
        let (a, b) = (max_product_overlap(&h, &opts).unwrap().value, max_product_overlap(&k, &opts).unwrap().value);
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn pure_states_are_lu_equivalent_iff_schmidt_coefficients_agree(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let psi = random_unit_vector(&mut rng, m * n);
        let phi = random_local_unitary(&mut rng, m, n).apply(&psi);
        let other = random_unit_vector(&mut rng, m * n);
        let s = |v: &[_]| schmidt_coefficients(v, m, n).unwrap();
        prop_assert!(sorted_close(&s(&psi), &s(&phi), 1e-10));
        let opts = Options::default();
        let pure = |v: &[_]| BipartiteOperator::pure(v, m, n).unwrap();
        prop_assert!(decide_lu(&pure(&psi), &pure(&phi), &opts).unwrap().is_equivalent());
        if !sorted_close(&s(&psi), &s(&other), 1e-6) {
            prop_assert!(decide_lu(&pure(&psi), &pure(&other), &opts).unwrap().is_inequivalent());
        }
    }

    #[test]
    fn split_gives_orthogonal_idempotents(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let product = random_product_vector(&mut rng, m, n);
        let extra = orthogonalize_against(&random_unit_vector(&mut rng, m * n), std::slice::from_ref(&product), 1e-6).unwrap();
        let p = BipartiteOperator::projector(&[product, extra], m, n);
        let split = split_product_part(&p, &Options::default().seesaw, Options::default().product_tol).unwrap();
        let (a, b) = (split.product_part.matrix(), split.entangled_part.matrix());
        prop_assert!(!split.vectors.is_empty());
        prop_assert!(a.matmul(a).distance(a) < 1e-6);
        prop_assert!(b.matmul(b).distance(b) < 1e-6);
        prop_assert!(a.matmul(b).frobenius_norm() < 1e-6);
        prop_assert!((a + b).distance(p.matrix()) < 1e-12);
    }

    #[test]
    fn decide_lu_commutes_with_a_common_shift(seed in any::<u64>(), (m, n) in small_dims(), x in -2.0f64..2.0) {
        let mut rng = sub_rng(seed, 0);
        let k = random_density(&mut rng, m, n);
        let h = k.conjugate(&random_local_unitary(&mut rng, m, n)).unwrap();
        let opts = Options::default();
        let plain = decide_lu(&h, &k, &opts).unwrap();
        let shifted = decide_lu(&h.shifted(x), &k.shifted(x), &opts).unwrap();
        prop_assert_eq!(plain.kind(), shifted.kind());
        prop_assert!(plain.is_equivalent());
    }

    #[test]
    fn top_witness_shift_is_below_the_top_eigenvalue(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let rho = random_nondegenerate_state(&mut rng, m, n);
        let top = witness_from_state_top(&rho, &rho, &Options::default()).unwrap();
        let l1 = rho.max_eigenvalue();
        prop_assert!(top.mu <= l1 + 1e-9);
        if top.mu < l1 - 1e-6 {
            prop_assert_eq!(top.w1.status, WitnessStatus::VerifiedEW);
            // The witness state is the original up to a shift and sign.
            let s = state_from_witness(&top.w1.op, Shift::Auto).unwrap();
            prop_assert!(s.is_psd());
        }
    }

    #[test]
    fn verified_witnesses_are_nonnegative_on_products(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let rho = random_nondegenerate_state(&mut rng, m, n);
        let top = witness_from_state_top(&rho, &rho, &Options::default()).unwrap();
        if top.w1.status == WitnessStatus::VerifiedEW {
            let w = &top.w1.op;
            for _ in 0..10_000 {
                let v = random_product_vector(&mut rng, m, n);
                prop_assert!(w.expectation(&v) >= -1e-9);
            }
            // A block-positive operator has no product vector in its negative eigenspace.
            let e = w.eigen();
            let negative: Vec<_> = (0..w.dim()).filter(|&k| e.values[k] < -1e-9).map(|k| e.vector(k)).collect();
            prop_assert!(!negative.is_empty());
            let proj = BipartiteOperator::projector(&negative, m, n);
            let search = contains_product_vector(&proj, &Options::default().seesaw, 1e-8).unwrap();
            prop_assert!(!search.is_found());
        }
    }

    #[test]
    fn slu_verdict_and_gauge_are_lu_invariant(seed in any::<u64>(), (m, n) in small_dims()) {
        let mut rng = sub_rng(seed, 0);
        let ps = random_projector_tuple(seed, m, n, &[1, 2]);
        let planted = random_local_unitary(&mut rng, m, n);
        let qs: Vec<_> = ps.iter().map(|p| p.conjugate(&planted.adjoint()).unwrap()).collect();
        let opts = Options::default();
        let v = decide_slu(&ps, &qs, &opts).unwrap();
        prop_assert!(v.is_equivalent(), "planted tuple not recovered: {}", v.kind());
        // Gauge fixing with the planted unitary lands exactly on the first tuple.
        let fixed = gauge_fix(&ps, &qs, &planted, &[0]).unwrap();
        prop_assert!(fixed[0].distance(&ps[0]) < 1e-8);
        let after = decide_slu(&ps, &fixed, &opts).unwrap();
        prop_assert_eq!(v.kind(), after.kind());
        // Moving both tuples by another LU keeps the verdict.
        let g = random_local_unitary(&mut rng, m, n);
        let ps2: Vec<_> = ps.iter().map(|p| p.conjugate(&g).unwrap()).collect();
        prop_assert!(decide_slu(&ps2, &qs, &opts).unwrap().is_equivalent());
    }

    #[test]
    fn entangled_eigenline_against_product_eigenbasis_is_inequivalent(seed in any::<u64>()) {
        let (m, n) = (2, 2);
        let mut rng = sub_rng(seed, 0);
        let vals = [0.1, 0.2, 0.3, 0.4];
        let entangled = BipartiteOperator::new(m, n, ComplexMatrix::from_real_diagonal(&vals).conjugate_by(&haar_unitary(&mut rng, 4))).unwrap();
        let product = BipartiteOperator::new(m, n, ComplexMatrix::from_real_diagonal(&vals)).unwrap()
            .conjugate(&random_local_unitary(&mut rng, m, n)).unwrap();
        let opts = Options::default();
        let (ce, cp) = (classify(&entangled, &opts).unwrap(), classify(&product, &opts).unwrap());
        prop_assert_eq!(cp.d_lambda, Membership::RefutedNumerically);
        if ce.d_lambda == Membership::Proven {
            prop_assert!(decide_lu(&entangled, &product, &opts).unwrap().is_inequivalent());
        }
    }
}

#[test]
fn saturating_states_hit_the_pt_bounds() {
    let mut rng = sub_rng(3, 0);
    let opts = Options::default();
    for _ in 0..5 {
        let bell = random_local_unitary(&mut rng, 2, 2).apply(&luequiv::fixtures::phi_plus());
        let c = classify(&BipartiteOperator::pure(&bell, 2, 2).unwrap(), &opts).unwrap();
        assert!((c.pt_min + 0.5).abs() < 1e-9);
        let v = random_product_vector(&mut rng, 3, 3);
        let c = classify(&BipartiteOperator::pure(&v, 3, 3).unwrap(), &opts).unwrap();
        assert!((c.pt_max - 1.0).abs() < 1e-9);
    }
}

#[test]
fn product_vectors_have_one_schmidt_coefficient() {
    let mut rng = sub_rng(4, 0);
    let (a, b) = random_product(&mut rng, 3, 2);
    let v = kron_vec(&a, &b);
    let s = schmidt_coefficients(&v, 3, 2).unwrap();
    assert!((s[0] - 1.0).abs() < 1e-12 && s[1].abs() < 1e-7);
    assert!((inner(&v, &v).re - 1.0).abs() < 1e-12);
}
