use coherence_forge::hermitian::{
    dephase, eig_hermitian, fidelity, partial_trace, tensor, trace_distance, Keep,
};
use coherence_forge::random::{random_density, random_hermitian, random_observable, rng_from_seed};
use coherence_forge::ComplexMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..8) {
        let m = random_hermitian(&mut rng_from_seed(seed), d);
        let e = eig_hermitian(&m).unwrap();
        prop_assert!(e.reconstruction_residual(&m) < 1e-10);
        let gram = &e.vectors.adjoint() * &e.vectors;
        prop_assert!((&gram - &ComplexMatrix::identity(d)).max_abs() < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(seed in any::<u64>(), d in 2usize..6, r1 in 1usize..6, r2 in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(&mut rng, d, r1.min(d));
        let b = random_density(&mut rng, d, r2.min(d));
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&fab));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
        // Fuchs–van de Graaf with the unnormalized 1-norm
        let t = trace_distance(&a, &b).unwrap() / 2.0;
        prop_assert!(1.0 - fab <= t + 1e-9);
        prop_assert!(t <= (1.0 - fab * fab).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn partial_trace_recovers_factors(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(&mut rng, da, da);
        let b = random_density(&mut rng, db, db);
        let ab = a.tensor(&b);
        prop_assert!((partial_trace(&ab, (da, db), Keep::A).unwrap().matrix() - a.matrix()).max_abs() < 1e-12);
        prop_assert!((partial_trace(&ab, (da, db), Keep::B).unwrap().matrix() - b.matrix()).max_abs() < 1e-12);
        prop_assert!((&tensor(a.matrix(), b.matrix()) - ab.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn dephasing_is_idempotent_and_commutes(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, d, d);
        let h = random_observable(&mut rng, d);
        let once = dephase(&rho, &h).unwrap();
        let twice = dephase(&once, &h).unwrap();
        prop_assert!((once.matrix() - twice.matrix()).max_abs() < 1e-10);
        prop_assert!(once.matrix().commutator(h.matrix()).max_abs() < 1e-10);
    }
}
