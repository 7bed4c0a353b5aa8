use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weil_core::exactalg::random::{random_automorphism, random_invariants};
use weil_core::frobmod::{FrobeniusModule, GroupDescriptor, Part, PrimeSupport};
use weil_core::{FpGroup, IntMatrix};

fn bi(v: i64) -> BigInt {
    BigInt::from(v)
}

/// All elements of `Z/d_1 + ... + Z/d_k` as coordinate vectors.
fn elements(moduli: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &d in moduli {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..d).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn apply(phi: &[Vec<i64>], x: &[i64], moduli: &[i64]) -> Vec<i64> {
    phi.iter()
        .zip(moduli)
        .map(|(row, d)| row.iter().zip(x).map(|(a, b)| a * b).sum::<i64>().mod_floor(d))
        .collect()
}

/// Brute-force `(|ker(phi - 1)|, |coker(phi - 1)|)`.
fn brute_orders(phi: &[Vec<i64>], moduli: &[i64]) -> (u64, u64) {
    let all = elements(moduli);
    let mut fixed = 0u64;
    let mut image = HashSet::new();
    for x in &all {
        let y = apply(phi, x, moduli);
        let diff: Vec<i64> = y.iter().zip(x).zip(moduli).map(|((a, b), d)| (a - b).mod_floor(d)).collect();
        if diff.iter().all(|&v| v == 0) {
            fixed += 1;
        }
        image.insert(diff);
    }
    (fixed, all.len() as u64 / image.len() as u64)
}

fn small_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
        .collect()
}

fn finite_part(seed: u64, max_order: u64) -> (Part, Vec<i64>, Vec<Vec<i64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moduli: Vec<i64> = random_invariants(&mut rng, max_order).into_iter().map(|d| d as i64).collect();
    let big: Vec<BigInt> = moduli.iter().map(|&d| bi(d)).collect();
    let phi = random_automorphism(&mut rng, &big);
    let rows = small_rows(&phi);
    (
        Part::Finite {
            group: FpGroup::from_invariants(&big),
            phi,
        },
        moduli,
        rows,
    )
}

fn order(g: &GroupDescriptor) -> BigInt {
    assert!(g.is_finite());
    g.torsion_order()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn finite_parts_match_brute_force(seed in any::<u64>()) {
        let (part, moduli, phi) = finite_part(seed, 256);
        let m = FrobeniusModule::new(vec![part]);
        let (fixed, coinv) = brute_orders(&phi, &moduli);
        prop_assert_eq!(order(&m.invariants().unwrap()), BigInt::from(fixed));
        prop_assert_eq!(order(&m.coinvariants().unwrap()), BigInt::from(coinv));
        // Finite groups: |ker| = |coker| for an endomorphism.
        prop_assert_eq!(fixed, coinv);
    }

    /// The invariants of `(Q_l/Z_l)^r` under `phi` are read off from
    /// `(Z/l^k)^r` once `l^k` exceeds `|det(phi - 1)|`.
    #[test]
    fn divisible_parts_match_truncations(
        l in prop::sample::select(vec![2i64, 3]),
        r in 1usize..=2,
        entries in prop::collection::vec(-4i64..=4, 4),
    ) {
        let phi: Vec<Vec<i64>> = (0..r).map(|i| entries[i * r..i * r + r].to_vec()).collect();
        let pm = IntMatrix::from_rows(&phi);
        let det_phi = pm.det();
        let det_a = pm.minus_identity().det();
        prop_assume!(!det_phi.is_multiple_of(&bi(l)));
        prop_assume!(det_a != bi(0));
        let mut lk = l;
        while lk <= det_a.to_i64().unwrap().abs() {
            lk *= l;
        }
        let (fixed, _) = brute_orders(&phi, &vec![lk; r]);
        let m = FrobeniusModule::new(vec![Part::Divisible {
            rank: r,
            support: PrimeSupport::Primes(vec![l as u64]),
            phi: pm,
        }]);
        prop_assert_eq!(order(&m.invariants().unwrap()), BigInt::from(fixed));
        prop_assert!(m.coinvariants().unwrap().is_zero());
        // Stable: one more power of l does not grow the kernel.
        prop_assert_eq!(brute_orders(&phi, &vec![lk * l; r]).0, fixed);
    }

    #[test]
    fn invariants_are_additive(s1 in any::<u64>(), s2 in any::<u64>(), k in -3i64..=3) {
        let (a, _, _) = finite_part(s1, 64);
        let (b, _, _) = finite_part(s2, 64);
        let lattice = Part::Lattice { phi: IntMatrix::from_rows(&[vec![0i64, -1], vec![1, k]]) };
        let parts = vec![a, lattice, b];
        let whole = FrobeniusModule::new(parts.clone());
        let mut inv = GroupDescriptor::zero();
        let mut coinv = GroupDescriptor::zero();
        for p in &parts {
            let single = FrobeniusModule::new(vec![p.clone()]);
            inv = inv.direct_sum(&single.invariants().unwrap());
            coinv = coinv.direct_sum(&single.coinvariants().unwrap());
        }
        prop_assert!(whole.invariants().unwrap().same_as(&inv));
        prop_assert!(whole.coinvariants().unwrap().same_as(&coinv));
        // Permuting parts changes nothing.
        let mut rev = parts;
        rev.reverse();
        let rev = FrobeniusModule::new(rev);
        prop_assert!(rev.invariants().unwrap().same_as(&inv));
        prop_assert_eq!(rev.rank(), whole.rank());
    }

    /// Over a lattice the canonical map has finite kernel and cokernel
    /// exactly when 1 is a semisimple eigenvalue.
    #[test]
    fn lattice_can_map_semisimplicity(a in -3i64..=3, b in -3i64..=3) {
        let phi = IntMatrix::from_rows(&[vec![1i64, a], vec![0, 1]]);
        let m = FrobeniusModule::new(vec![Part::Lattice { phi }]);
        prop_assert_eq!(m.can_map_data().unwrap().semisimple_at_1, a == 0);
        let phi = IntMatrix::from_rows(&[vec![-1i64, b], vec![0, 1]]);
        let m = FrobeniusModule::new(vec![Part::Lattice { phi }]);
        let data = m.can_map_data().unwrap();
        prop_assert!(data.semisimple_at_1);
        prop_assert!(data.ker.is_finite() && data.coker.is_finite());
    }
}

#[test]
fn worked_coinvariant_examples() {
    let z = |phi: Vec<Vec<i64>>| FrobeniusModule::new(vec![Part::Lattice { phi: IntMatrix::from_rows(&phi) }]);
    let neg = z(vec![vec![-1]]);
    assert!(neg.invariants().unwrap().is_zero());
    assert!(neg.coinvariants().unwrap().finite_part.is_isomorphic(&FpGroup::cyclic(2)));
    let triv = z(vec![vec![1]]);
    assert_eq!(triv.invariants().unwrap().free_rank, 1);
    assert_eq!(triv.coinvariants().unwrap().free_rank, 1);
}
