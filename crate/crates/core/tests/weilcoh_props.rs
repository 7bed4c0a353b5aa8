use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weil_core::exactalg::random::{random_automorphism, random_invariants};
use weil_core::frobmod::{FrobeniusModule, Part, PrimeSupport};
use weil_core::weilcoh::{chi_e, cup_e_complex, descent, EtaleData, TorsionReport};
use weil_core::{FpGroup, IntMatrix};

fn bi(v: i64) -> BigInt {
    BigInt::from(v)
}

fn finite(rng: &mut ChaCha8Rng, max_order: u64) -> (Part, Vec<i64>) {
    let moduli: Vec<BigInt> = random_invariants(rng, max_order).into_iter().map(BigInt::from).collect();
    let phi = random_automorphism(rng, &moduli);
    let small = moduli.iter().map(|d| d.to_i64().unwrap()).collect();
    (
        Part::Finite {
            group: FpGroup::from_invariants(&moduli),
            phi,
        },
        small,
    )
}

/// Random semisimple data over `F_3` in degrees `0..=max_degree`.
fn random_data(seed: u64, d: usize, max_degree: usize) -> EtaleData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = EtaleData::new(3, 3, d, 0);
    for t in 0..=max_degree {
        let mut parts = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            parts.push(match rng.gen_range(0..5) {
                0 => finite(&mut rng, 48).0,
                1 => Part::Lattice {
                    phi: IntMatrix::identity(1),
                },
                2 => Part::Lattice {
                    phi: IntMatrix::from_rows(&[vec![-1i64]]),
                },
                3 => Part::Lattice {
                    phi: IntMatrix::from_rows(&[vec![0i64, -1], vec![1, rng.gen_range(-1..=1)]]),
                },
                _ => Part::Divisible {
                    rank: 1,
                    support: PrimeSupport::CoprimeTo(3),
                    phi: IntMatrix::from_rows(&[vec![3i64.pow(rng.gen_range(1..=3))]]),
                },
            });
        }
        if !parts.is_empty() {
            data = data.with(t, FrobeniusModule::new(parts));
        }
    }
    data
}

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

/// Brute force on a finite module: `(|M^G|, |M_G|, |ker(M^G -> M_G)|)`.
fn brute(part: &Part, moduli: &[i64]) -> (u64, u64, u64) {
    let Part::Finite { phi, .. } = part else { unreachable!() };
    let phi: Vec<Vec<i64>> = phi
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
        .collect();
    let all = elements(moduli);
    let mut image = HashSet::new();
    let mut fixed = Vec::new();
    for x in &all {
        let diff: Vec<i64> = phi
            .iter()
            .zip(moduli)
            .zip(x)
            .map(|((row, d), xi)| (row.iter().zip(x).map(|(a, b)| a * b).sum::<i64>() - xi).mod_floor(d))
            .collect();
        if diff.iter().all(|&v| v == 0) {
            fixed.push(x.clone());
        }
        image.insert(diff);
    }
    let ker = fixed.iter().filter(|x| image.contains(*x)).count() as u64;
    (fixed.len() as u64, all.len() as u64 / image.len() as u64, ker)
}

fn alternating(values: impl Iterator<Item = (usize, BigInt)>) -> BigRational {
    values.fold(BigRational::one(), |acc, (t, v)| {
        let v = BigRational::from_integer(v);
        if t % 2 == 0 {
            acc * v
        } else {
            acc / v
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_data_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = EtaleData::new(5, 5, 1, 1);
        let mut orders = BTreeMap::new();
        for t in 0..=3 {
            let (part, moduli) = finite(&mut rng, 96);
            orders.insert(t, brute(&part, &moduli));
            data = data.with(t, FrobeniusModule::new(vec![part]));
        }
        let report = descent(&data).unwrap();
        for deg in &report.degrees {
            let inv = orders.get(&deg.t).map_or(1, |o| o.0);
            let coinv_prev = if deg.t == 0 { 1 } else { orders.get(&(deg.t - 1)).map_or(1, |o| o.1) };
            prop_assert_eq!(deg.rank, 0);
            prop_assert_eq!(&deg.torsion, &TorsionReport::Exact(BigInt::from(inv * coinv_prev)));
        }
        for c in &report.cup_e {
            let ker = orders.get(&c.t).map_or(1, |o| o.2);
            prop_assert_eq!(c.ker_order(), Some(BigInt::from(ker)));
            prop_assert_eq!(c.coker_order(), Some(BigInt::from(ker)));
        }
        prop_assert_eq!(report.chi_e, Some(BigRational::one()));
    }

    #[test]
    fn euler_characteristic_telescopes(seed in any::<u64>()) {
        let data = random_data(seed, 2, 5);
        let report = descent(&data).unwrap();
        let chi = chi_e(&data).unwrap();
        let cx = cup_e_complex(&data).unwrap();
        prop_assert_eq!(&chi, &alternating(cx.into_iter().enumerate()));
        let direct = alternating(report.cup_e.iter().flat_map(|c| {
            [(c.t, c.ker_order().unwrap()), (c.t + 1, c.coker_order().unwrap())]
        }));
        prop_assert_eq!(Some(chi), report.chi_e.clone());
        prop_assert_eq!(report.chi_e.clone().unwrap(), direct);
    }

    #[test]
    fn shifting_degrees_shifts_cohomology(seed in any::<u64>()) {
        let data = random_data(seed, 3, 6);
        let mut shifted = EtaleData::new(3, 3, 3, 0);
        for (t, m) in &data.modules {
            shifted = shifted.with(t + 1, m.clone());
        }
        let a = descent(&data).unwrap();
        let b = descent(&shifted).unwrap();
        prop_assert!(b.degrees[0].is_zero());
        for deg in &a.degrees {
            if let Some(next) = b.degree(deg.t + 1) {
                prop_assert_eq!(next.rank, deg.rank);
                prop_assert_eq!(&next.torsion, &deg.torsion);
            }
        }
        prop_assert_eq!(b.chi_e.unwrap(), a.chi_e.unwrap().recip());
    }

    #[test]
    fn ranks_add_and_chi_multiplies(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_data(s1, 2, 5);
        let b = random_data(s2, 2, 5);
        let mut sum = EtaleData::new(3, 3, 2, 0);
        for t in 0..=5 {
            let mut parts = Vec::new();
            for x in [&a, &b] {
                if let Some(m) = x.module(t) {
                    parts.extend(m.parts.iter().cloned());
                }
            }
            if !parts.is_empty() {
                sum = sum.with(t, FrobeniusModule::new(parts));
            }
        }
        let (ra, rb, rs) = (descent(&a).unwrap(), descent(&b).unwrap(), descent(&sum).unwrap());
        for t in 0..rs.degrees.len() {
            prop_assert_eq!(rs.degrees[t].rank, ra.degrees[t].rank + rb.degrees[t].rank);
        }
        prop_assert_eq!(rs.chi_e.unwrap(), ra.chi_e.unwrap() * rb.chi_e.unwrap());
    }

    /// Weight zero, `A^0 = Z` with trivial action and `A^1 = 0`.
    #[test]
    fn connected_proper_shape_gives_z_in_degrees_0_and_1(seed in any::<u64>()) {
        let mut data = random_data(seed, 2, 5);
        data.modules.remove(&1);
        data.modules.insert(0, FrobeniusModule::new(vec![Part::Lattice { phi: IntMatrix::identity(1) }]));
        let report = descent(&data).unwrap();
        for t in [0, 1] {
            let deg = report.degree(t).unwrap();
            prop_assert_eq!(deg.rank, 1);
            prop_assert_eq!(&deg.torsion, &TorsionReport::Exact(BigInt::one()));
        }
    }
}

#[test]
fn builders_respect_the_vanishing_bound() {
    for d in 0..=3usize {
        for n in -2..=(d as i64 + 1) {
            let ex = weil_core::zetaval::example_projective_space(&bi(4), d, n).unwrap();
            assert!(descent(&ex.data).unwrap().warnings.is_empty(), "d={d} n={n}");
        }
    }
}
