use coherence_forge::hermitian::{partial_trace, Keep};
use coherence_forge::measures::qfi;
use coherence_forge::measures::skew_information;
use coherence_forge::purification::{
    build_optimal_purification, optimal_ensemble, transpose_purification_variance,
};
use coherence_forge::random::{random_density, random_observable, rng_from_seed};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optimal_purification_reaches_qfi(seed in any::<u64>(), d in 2usize..6, rank in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, d, rank.min(d));
        let h = random_observable(&mut rng, d);
        let f = qfi(&rho, &h).unwrap();
        let p = build_optimal_purification(&rho, &h).unwrap();
        prop_assert!((4.0 * p.total_variance - f).abs() <= 1e-8 * f.max(1e-3));
        prop_assert!(p.kkt_residual < 1e-10);
        let joint = p.joint_state.density();
        let marginal = partial_trace(&joint, (d, d), Keep::A).unwrap();
        prop_assert!((marginal.matrix() - rho.matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn optimal_ensemble_decomposes_rho(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, d, d);
        let h = random_observable(&mut rng, d);
        let ens = optimal_ensemble(&rho, &h).unwrap();
        prop_assert!((&ens.mixture() - rho.matrix()).max_abs() < 1e-10);
        prop_assert!((4.0 * ens.average_variance - qfi(&rho, &h).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn transpose_purification_gives_twice_skew(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, d, d);
        let h = random_observable(&mut rng, d);
        let v = transpose_purification_variance(&rho, &h).unwrap();
        prop_assert!((v - 2.0 * skew_information(&rho, &h).unwrap()).abs() < 1e-9);
        prop_assert!(v >= qfi(&rho, &h).unwrap() / 4.0 - 1e-10);
    }
}
