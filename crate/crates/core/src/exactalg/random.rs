//! Random finite abelian groups and automorphisms, for the verifiers and tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use super::matrix::IntMatrix;

/// Invariant factors `d_1 | ... | d_k` (all > 1) of a random group with
/// order at most `max_order`. Returns an empty list when `max_order < 2`.
pub fn random_invariants<R: Rng>(rng: &mut R, max_order: u64) -> Vec<u64> {
    if max_order < 2 {
        return Vec::new();
    }
    if rng.gen_bool(0.25) {
        return vec![rng.gen_range(2..=max_order)];
    }
    let mut factors: Vec<u64> = Vec::new();
    let mut order = 1u64;
    let len = rng.gen_range(1..=6);
    let mut d = rng.gen_range(2..=6u64);
    for _ in 0..len {
        // Keep the divisibility chain reading d_1 | d_2 | ...
        if order.saturating_mul(d) > max_order {
            break;
        }
        order *= d;
        factors.push(d);
        d *= rng.gen_range(1..=3u64);
    }
    if factors.is_empty() {
        factors.push(rng.gen_range(2..=max_order.min(8)));
    }
    factors
}

/// A random automorphism of `Z/d_1 + ... + Z/d_k` (given as canonical
/// moduli), built as a product of elementary automorphisms: unit scalings of
/// one coordinate and compatible shears between two coordinates.
pub fn random_automorphism<R: Rng>(rng: &mut R, moduli: &[BigInt]) -> IntMatrix {
    let k = moduli.len();
    let mut m = IntMatrix::identity(k);
    if k == 0 {
        return m;
    }
    let steps = 2 * k + 3;
    for _ in 0..steps {
        let mut e = IntMatrix::identity(k);
        if k == 1 || rng.gen_bool(0.4) {
            let i = rng.gen_range(0..k);
            e[(i, i)] = random_unit(rng, &moduli[i]);
        } else {
            let i = rng.gen_range(0..k);
            let mut j = rng.gen_range(0..k);
            if j == i {
                j = (j + 1) % k;
            }
            // e_j -> e_j + c e_i needs c * d_j = 0 mod d_i.
            let step = &moduli[i] / moduli[i].gcd(&moduli[j]);
            let c = &step * BigInt::from(rng.gen_range(1..=4u32));
            e[(i, j)] = c.mod_floor(&moduli[i]);
        }
        m = reduce_rows(&e.mul(&m), moduli);
    }
    m
}

fn random_unit<R: Rng>(rng: &mut R, modulus: &BigInt) -> BigInt {
    let bound: u64 = modulus.try_into().unwrap_or(u64::MAX);
    for _ in 0..64 {
        let u = BigInt::from(rng.gen_range(1..bound.max(2)));
        if u.gcd(modulus).is_one() {
            return u;
        }
    }
    BigInt::one()
}

/// Reduce row `i` modulo `moduli[i]`.
pub fn reduce_rows(m: &IntMatrix, moduli: &[BigInt]) -> IntMatrix {
    let mut out = m.clone();
    for (i, d) in moduli.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        for j in 0..out.cols() {
            let v = out[(i, j)].mod_floor(d);
            out[(i, j)] = v;
        }
    }
    out
}

/// Uniform random element of `Z/d_1 + ... + Z/d_k`.
pub fn random_element<R: Rng>(rng: &mut R, moduli: &[BigInt]) -> Vec<BigInt> {
    moduli
        .iter()
        .map(|d| {
            let b: u64 = d.try_into().unwrap_or(u64::MAX);
            BigInt::from(rng.gen_range(0..b.max(1)))
        })
        .collect()
}

/// Random integer matrix with entries in `[-bound, bound]`.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let entries = (0..rows * cols)
        .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
        .collect();
    IntMatrix::from_vec(rows, cols, entries)
}
