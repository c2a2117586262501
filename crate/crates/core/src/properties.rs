//! Property tests for invariants that span several modules.

use num_complex::Complex64;
use proptest::prelude::*;

use crate::numerics::ComplexMatrix;
use crate::verify::{random_cptp, random_density, random_unitary};
use crate::{
    binary_entropy, choi, coherence, hermitian_eigenvalues, l1_coherence, overlap,
    unitary_l1_closed_form, validate_cptp, von_neumann_entropy, CoherenceMeasure, KrausChannel,
    QubitBasis,
};
use std::f64::consts::{PI, TAU};

fn basis() -> impl Strategy<Value = QubitBasis> {
    (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| QubitBasis::from_bloch(t, p).unwrap())
}

fn channel() -> impl Strategy<Value = KrausChannel> {
    (1usize..=4, any::<u64>()).prop_map(|(k, seed)| random_cptp(k, seed).unwrap())
}

fn measure() -> impl Strategy<Value = CoherenceMeasure> {
    prop_oneof![
        Just(CoherenceMeasure::RelativeEntropy),
        Just(CoherenceMeasure::L1Norm)
    ]
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn entropy_is_unitarily_invariant(rank in 1usize..=2, s1: u64, s2: u64) {
        let rho = random_density(rank, s1).unwrap();
        let u = random_unitary(s2);
        let rotated = u.multiply(&rho).unwrap().multiply(&u.adjoint()).unwrap();
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&rotated).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn binary_entropy_is_symmetric(x in 0.0..=1.0f64) {
        let h = binary_entropy(x).unwrap();
        prop_assert!((h - binary_entropy(1.0 - x).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn overlaps_pair_up(b1 in basis(), b2 in basis()) {
        let o = overlap(&b1, &b2);
        prop_assert!((o.c_max + o.c_min - 1.0).abs() < 1e-12);
        prop_assert!(o.c_max >= 0.5 - 1e-12);
        let r = overlap(&b2, &b1);
        prop_assert_eq!(o.c_max, r.c_max);
        prop_assert_eq!(o.c_min, r.c_min);
    }

    #[test]
    fn overlap_ignores_global_phases(b1 in basis(), b2 in basis(), p1 in 0.0..TAU, p2 in 0.0..TAU) {
        let o = overlap(&b1, &b2);
        let q = overlap(&b1.with_phases(p1, p2), &b2);
        prop_assert!((o.c_max - q.c_max).abs() < 1e-12);
        prop_assert!((o.c_min - q.c_min).abs() < 1e-12);
    }

    #[test]
    fn choi_state_is_a_density_matrix(ch in channel(), b in basis()) {
        let state = choi(&ch, &b);
        let spectrum = hermitian_eigenvalues(state.matrix()).unwrap();
        prop_assert!(spectrum.min() >= -1e-10);
        prop_assert!((state.matrix().trace() - c(1.0)).norm() < 1e-12);
        let half = ComplexMatrix::identity(2).unwrap().scale(c(0.5));
        prop_assert!(state.output_partial_trace().max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn choi_transforms_covariantly(ch in channel(), b in basis()) {
        let v = b.change_of_basis();
        let lift = ComplexMatrix::identity(2).unwrap().kronecker(&v).unwrap();
        let base = choi(&ch, &QubitBasis::computational());
        let expected = lift.adjoint().multiply(base.matrix()).unwrap().multiply(&lift).unwrap();
        prop_assert!(choi(&ch, &b).matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn unitary_channels_give_pure_choi_states(seed: u64, b in basis()) {
        let ch = validate_cptp(vec![random_unitary(seed)]).unwrap();
        prop_assert!(ch.is_unitary());
        let spectrum = hermitian_eigenvalues(choi(&ch, &b).matrix()).unwrap();
        prop_assert!((spectrum.max() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn choi_ignores_kraus_gauge(s1: u64, s2: u64, b in basis()) {
        let ch = random_cptp(2, s1).unwrap();
        let w = random_unitary(s2);
        let ops = ch.operators();
        let mixed = (0..2)
            .map(|i| ops[0].scale(w.get(i, 0)).add(&ops[1].scale(w.get(i, 1))).unwrap())
            .collect();
        let regauged = validate_cptp(mixed).unwrap();
        prop_assert!(choi(&ch, &b).matrix().max_abs_diff(choi(&regauged, &b).matrix()) < 1e-12);
    }

    #[test]
    fn coherence_is_convex(
        a in channel(),
        b in channel(),
        t in prop_oneof![Just(0.25), Just(0.5), Just(0.75)],
        basis in basis(),
        m in measure(),
    ) {
        let mix = KrausChannel::mix(t, &a, &b).unwrap();
        let lhs = coherence(&mix, &basis, m).unwrap().value;
        let rhs = t * coherence(&a, &basis, m).unwrap().value
            + (1.0 - t) * coherence(&b, &basis, m).unwrap().value;
        prop_assert!(lhs <= rhs + 1e-9, "{} > {}", lhs, rhs);
    }

    #[test]
    fn unitary_l1_matches_closed_form(seed: u64, b in basis()) {
        let ch = validate_cptp(vec![random_unitary(seed)]).unwrap();
        let direct = l1_coherence(&ch, &b).unwrap().value;
        let closed = unitary_l1_closed_form(&ch, &b).unwrap();
        prop_assert!((direct - closed).abs() < 1e-9);
    }

    #[test]
    fn coherence_ranges(ch in channel(), b in basis()) {
        // rel coherence of a 4-level state is at most 2 bits; l1 at most 3
        let rel = coherence(&ch, &b, CoherenceMeasure::RelativeEntropy).unwrap().value;
        let l1 = coherence(&ch, &b, CoherenceMeasure::L1Norm).unwrap().value;
        prop_assert!((0.0..=2.0 + 1e-9).contains(&rel));
        prop_assert!((0.0..=3.0 + 1e-9).contains(&l1));
    }
}
