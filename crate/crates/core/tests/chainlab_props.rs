use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weil_core::chainlab::verifier::{self, VerifierConfig};
use weil_core::chainlab::{
    big_s, connecting_hom, delta, extension_n, is_plus_minus, level_cohomology, mu, proj, splitting_check,
    t_minus_one, CoefModule, FiniteModule, LatticeModule, LevelElement, RationalModule,
};
use weil_core::exactalg::random::{random_automorphism, random_invariants};
use weil_core::{FpGroup, IntMatrix, RatMatrix};

fn random_module(seed: u64, max_order: u64) -> FiniteModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moduli: Vec<BigInt> = random_invariants(&mut rng, max_order).into_iter().map(BigInt::from).collect();
    let phi = random_automorphism(&mut rng, &moduli);
    FiniteModule::new(moduli, phi).unwrap()
}

/// Number of points of the module fixed by `phi^m`, by enumeration.
fn fixed_by_power(module: &FiniteModule, m: usize) -> u64 {
    let moduli: Vec<i64> = module.moduli().iter().map(|d| d.to_i64().unwrap()).collect();
    let p = module.phi_power_matrix(m as i64);
    let rows: Vec<Vec<i64>> = p.to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
    let mut count = 0;
    let mut x = vec![0i64; moduli.len()];
    loop {
        let fixed = rows
            .iter()
            .zip(&moduli)
            .zip(&x)
            .all(|((row, d), xi)| (row.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>() - xi).mod_floor(d) == 0);
        count += fixed as u64;
        let mut k = 0;
        loop {
            if k == x.len() {
                return count;
            }
            x[k] += 1;
            if x[k] < moduli[k] {
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Both level cohomology groups have the order of the `phi^m` fixed points.
    #[test]
    fn level_cohomology_orders(seed in any::<u64>(), m in 1usize..=6) {
        let module = random_module(seed, 128);
        let expected = BigInt::from(fixed_by_power(&module, m));
        let (h0, h1) = level_cohomology(&CoefModule::Finite(module), m).unwrap();
        prop_assert_eq!(h0.order(), Some(expected.clone()));
        prop_assert_eq!(h1.order(), Some(expected));
    }

    #[test]
    fn lattice_level_cohomology(k in -2i64..=2, m in 1usize..=5) {
        let phi = IntMatrix::from_rows(&[vec![0i64, -1], vec![1, k]]);
        let lattice = LatticeModule::new(phi.clone()).unwrap();
        let (h0, h1) = level_cohomology(&CoefModule::Lattice(lattice), m).unwrap();
        // Over Z^2 the groups are ker and coker of phi^m - 1.
        let a = phi.pow(m as u64).minus_identity();
        let coker = FpGroup::from_relations(a.clone());
        prop_assert!(h1.is_isomorphic(&coker));
        prop_assert_eq!(h0.rank(), 2 - a.to_rational().rank());
    }

    #[test]
    fn rational_splitting_holds(entries in prop::collection::vec(-3i64..=3, 4), m in 1usize..=4) {
        let phi = RatMatrix::from_vec(2, 2, entries.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect());
        prop_assume!(phi.det() != BigRational::from_integer(BigInt::from(0)));
        let module = RationalModule::new(phi).unwrap();
        prop_assert!(splitting_check(&module, m).unwrap().verified);
    }

    /// `proj . mu = -S / m` on integer levels, and `S` kills boundaries.
    #[test]
    fn kahn_projection(values in prop::collection::vec(-20i64..=20, 1..=6)) {
        let f = LevelElement::new(values.iter().map(|&v| BigInt::from(v)).collect()).unwrap();
        let m = f.level();
        let s: i64 = values.iter().sum();
        prop_assert_eq!(proj(&mu(&f)), -BigRational::new(BigInt::from(s), BigInt::from(m)));
        let ints = weil_core::chainlab::Integers;
        let b = t_minus_one(&ints, &f);
        prop_assert_eq!(big_s(&ints, &b), BigInt::from(0));
        let d = delta(&f, 2);
        prop_assert_eq!(d.level(), 2 * m);
    }

    #[test]
    fn verifier_passes_on_random_seeds(seed in any::<u64>()) {
        let config = VerifierConfig { seed, cases: 4, ..VerifierConfig::default() };
        let report = verifier::run(&config);
        prop_assert!(report.passed(), "{:?}", report.failures.first());
    }
}

#[test]
fn connecting_map_of_multiplication_extensions() {
    for n in -3i64..=3 {
        let map = connecting_hom(&extension_n(n)).unwrap();
        assert!(is_plus_minus(&map, n), "n = {n}");
    }
}
