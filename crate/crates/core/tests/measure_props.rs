use coherence_forge::measures::{
    energy_variance, purity_of_coherence, q2_divergence, qfi, renyi_purity_monotone,
    skew_information, state_variance,
};
use coherence_forge::random::{
    random_density, random_observable, random_pure, random_unitary, rng_from_seed,
};
use coherence_forge::{DensityMatrix, HermitianObservable};
use proptest::prelude::*;

fn instance(seed: u64, d: usize, full: bool) -> (DensityMatrix, HermitianObservable) {
    let mut rng = rng_from_seed(seed);
    let rank = if full { d } else { 1 + (seed as usize % d) };
    (
        random_density(&mut rng, d, rank),
        random_observable(&mut rng, d),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ordering_of_monotones(seed in any::<u64>(), d in 2usize..6) {
        let (rho, h) = instance(seed, d, true);
        let f = qfi(&rho, &h).unwrap();
        let p = purity_of_coherence(&rho, &h).unwrap();
        let w = skew_information(&rho, &h).unwrap();
        prop_assert!(p.value >= f - 1e-10);
        prop_assert!(f <= 4.0 * state_variance(&rho, &h).unwrap() + 1e-10);
        prop_assert!(w >= f / 8.0 - 1e-10 && w <= f / 4.0 + 1e-10);
        let r2 = renyi_purity_monotone(&rho, &h, 2.0).unwrap();
        prop_assert!((r2.value - p.value).abs() <= 1e-9 * p.value.max(1.0));
    }

    #[test]
    fn qfi_is_additive(seed in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4) {
        let (a, ha) = instance(seed, d1, false);
        let (b, hb) = instance(seed.wrapping_add(1), d2, false);
        let joint = qfi(&a.tensor(&b), &ha.noninteracting(&hb)).unwrap();
        let sum = qfi(&a, &ha).unwrap() + qfi(&b, &hb).unwrap();
        prop_assert!((joint - sum).abs() < 1e-8 * sum.max(1.0));
    }

    #[test]
    fn pure_states_have_qfi_four_times_variance(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let psi = random_pure(&mut rng, d);
        let h = random_observable(&mut rng, d);
        let f = qfi(&psi.density(), &h).unwrap();
        prop_assert!((f - 4.0 * energy_variance(&psi, &h).unwrap()).abs() < 1e-8);
        prop_assert!(!purity_of_coherence(&psi.density(), &h).unwrap().is_finite() || f < 1e-10);
    }

    #[test]
    fn joint_unitary_conjugation_preserves_qfi(seed in any::<u64>(), d in 2usize..5) {
        let (rho, h) = instance(seed, d, false);
        let u = random_unitary(&mut rng_from_seed(!seed), d);
        let rho_u = rho.conjugate_by(&u);
        let h_u = HermitianObservable::new(&(&u * h.matrix()) * &u.adjoint()).unwrap();
        prop_assert!((qfi(&rho_u, &h_u).unwrap() - qfi(&rho, &h).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn q2_is_at_least_one(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(&mut rng, d, d);
        let b = random_density(&mut rng, d, d);
        prop_assert!(q2_divergence(&a, &b).unwrap().value >= 1.0 - 1e-9);
        prop_assert!((q2_divergence(&a, &a).unwrap().value - 1.0).abs() < 1e-9);
    }
}
