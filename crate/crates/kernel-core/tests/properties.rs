use kernel_core::absorbing::absorbing_set;
use kernel_core::families::{random_generator, random_irreducible, random_multi_class};
use kernel_core::invariant::{generator_residual, kernel_residual};
use kernel_core::{
    absorbing_decomposition, cesaro_residual, domination_certificate, invariant_measures,
    resolvent, semigroup, skeleton_cesaro, DiscreteMeasure, RateMatrix,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn generator(seed: u64, n: usize, irreducible: bool) -> RateMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if irreducible {
        random_irreducible(n, &mut rng)
    } else {
        random_generator(n, 0.3, &mut rng)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernels_are_stochastic(seed in any::<u64>(), n in 1usize..20, t in 0.0f64..20.0, alpha in 0.01f64..50.0) {
        let l = generator(seed, n, seed % 2 == 0);
        for k in [semigroup(&l, t).unwrap(), resolvent(&l, alpha).unwrap()] {
            for row in k.to_rows() {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
                prop_assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn chapman_kolmogorov(seed in any::<u64>(), n in 1usize..=20, t in 0.0f64..5.0, s in 0.0f64..5.0) {
        let l = generator(seed, n, seed % 3 != 0);
        let lhs = semigroup(&l, t + s).unwrap();
        let rhs = semigroup(&l, t).unwrap().compose(&semigroup(&l, s).unwrap()).unwrap();
        prop_assert!((lhs.matrix() - rhs.matrix()).amax() <= 1e-8);
    }

    #[test]
    fn resolvent_identity(seed in any::<u64>(), n in 1usize..12, a in 0.05f64..10.0, b in 0.05f64..10.0) {
        let l = generator(seed, n, seed % 2 == 1);
        let ra = resolvent(&l, a).unwrap();
        let rb = resolvent(&l, b).unwrap();
        let lhs = ra.matrix() - rb.matrix();
        let rhs = ra.matrix() * l.matrix() * rb.matrix() * ((b - a) / (a * b));
        prop_assert!((lhs - rhs).amax() <= 1e-8);
    }

    #[test]
    fn invariance_equivalence(seed in any::<u64>(), n in 1usize..15, irreducible in any::<bool>()) {
        let l = generator(seed, n, irreducible);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut candidates: Vec<Vec<f64>> = invariant_measures(&l).unwrap()
            .into_iter().map(|m| m.weights().to_vec()).collect();
        let w: Vec<f64> = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        candidates.push(DiscreteMeasure::probability(w).unwrap().weights().to_vec());
        for alpha in [0.1, 0.7, 1.0, 3.0, 10.0] {
            let r = resolvent(&l, alpha).unwrap();
            for mu in &candidates {
                let gen_ok = generator_residual(&l, mu) <= 1e-10;
                let res_ok = kernel_residual(&r, mu) <= 1e-8;
                prop_assert_eq!(gen_ok, res_ok);
            }
        }
    }

    #[test]
    fn resolvent_of_irreducible_is_positive(seed in any::<u64>(), n in 1usize..=20) {
        let l = generator(seed, n, true);
        for alpha in [0.1, 1.0, 10.0] {
            let r = resolvent(&l, alpha).unwrap();
            prop_assert!(r.matrix().min() > 0.0);
        }
    }

    #[test]
    fn domination_implies_invariant_charges_reference(seed in any::<u64>(), n in 1usize..12, mask in any::<u16>()) {
        let l = generator(seed, n, seed % 2 == 0);
        let w: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 }).collect();
        prop_assume!(w.iter().any(|&v| v > 0.0));
        let psi = DiscreteMeasure::new(w).unwrap();
        let cert = domination_certificate(&l, &psi, 1.0).unwrap();
        if cert.holds {
            prop_assert!(cert.invariant_measures_charge_psi);
        }
    }

    #[test]
    fn absorbing_sets_are_fixed_points(seed in any::<u64>(), a in 1usize..5, b in 1usize..5, t in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lay = random_multi_class(&[a, b], t, &mut rng);
        let l = &lay.generator;
        let ms = invariant_measures(l).unwrap();
        let d = absorbing_decomposition(l, 1.0, &ms[0], &ms[1]).unwrap();
        let r = resolvent(l, 1.0).unwrap();
        let in_c: Vec<bool> = (0..l.n()).map(|s| d.separating_set.contains(&s)).collect();
        prop_assert_eq!(absorbing_set(&r, &in_c, l.n() + 1), d.b_plus.clone());
        prop_assert_eq!(&d.residual, &lay.transient);
    }

    #[test]
    fn cesaro_telescoping_bound(seed in any::<u64>(), n in 1usize..10, s in 0.05f64..3.0, steps in 1usize..300) {
        let l = generator(seed, n, seed % 2 == 0);
        let nu = skeleton_cesaro(&l, s, 0, steps).unwrap();
        prop_assert!((nu.total() - 1.0).abs() < 1e-10);
        prop_assert!(cesaro_residual(&l, s, &nu).unwrap() <= 2.0 / steps as f64);
    }
}
