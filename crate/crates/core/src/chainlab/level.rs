//! The level-m complex `F^m --(t-1)--> F^m` and the maps between levels.
//!
//! Index `i` in `Z/m` is always represented by its residue in `[0, m-1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{FrobeniusAction, LabError};

/// `m` coefficients indexed by `Z/m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelElement<E> {
    entries: Vec<E>,
}

impl<E: Clone> LevelElement<E> {
    pub fn new(entries: Vec<E>) -> Result<LevelElement<E>, LabError> {
        if entries.is_empty() {
            return Err(LabError::InvalidLevel);
        }
        Ok(LevelElement { entries })
    }

    pub(crate) fn from_vec(entries: Vec<E>) -> LevelElement<E> {
        debug_assert!(!entries.is_empty());
        LevelElement { entries }
    }

    pub fn level(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<E> {
        self.entries
    }

    /// Entry at any integer index, reduced mod the level.
    pub fn at(&self, i: i64) -> &E {
        &self.entries[i.rem_euclid(self.level() as i64) as usize]
    }

    pub fn zero<M: FrobeniusAction<Elem = E>>(module: &M, m: usize) -> LevelElement<E> {
        LevelElement::from_vec(vec![module.zero(); m])
    }

    pub fn add<M: FrobeniusAction<Elem = E>>(&self, module: &M, other: &Self) -> Self {
        assert_eq!(self.level(), other.level(), "level mismatch");
        LevelElement::from_vec(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| module.add(a, b))
                .collect(),
        )
    }

    pub fn sub<M: FrobeniusAction<Elem = E>>(&self, module: &M, other: &Self) -> Self {
        assert_eq!(self.level(), other.level(), "level mismatch");
        LevelElement::from_vec(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| module.sub(a, b))
                .collect(),
        )
    }

    pub fn is_valid<M: FrobeniusAction<Elem = E>>(&self, module: &M) -> bool {
        self.entries.iter().all(|e| module.contains(e))
    }
}

/// `(tf)^(i) = phi f^(i-1)`.
pub fn t_twisted<M: FrobeniusAction>(module: &M, f: &LevelElement<M::Elem>) -> LevelElement<M::Elem> {
    let m = f.level() as i64;
    LevelElement::from_vec((0..m).map(|i| module.phi(f.at(i - 1))).collect())
}

/// `(tf)^(i) = f^(i-1)`.
pub fn t_plain<E: Clone>(f: &LevelElement<E>) -> LevelElement<E> {
    let m = f.level() as i64;
    LevelElement::from_vec((0..m).map(|i| f.at(i - 1).clone()).collect())
}

/// The differential `t_twisted - 1`.
pub fn t_minus_one<M: FrobeniusAction>(module: &M, f: &LevelElement<M::Elem>) -> LevelElement<M::Elem> {
    t_twisted(module, f).sub(module, f)
}

/// `(tau_a f)^(i) = f^(i+a)`.
pub fn tau<E: Clone>(f: &LevelElement<E>, a: i64) -> LevelElement<E> {
    let m = f.level() as i64;
    LevelElement::from_vec((0..m).map(|i| f.at(i + a).clone()).collect())
}

/// Translation combined with the coefficient action: `phi^a f^(i+a)`.
/// This is how the generator acts on the untwisted side of `nu`.
pub fn tau_diagonal<M: FrobeniusAction>(
    module: &M,
    f: &LevelElement<M::Elem>,
    a: i64,
) -> LevelElement<M::Elem> {
    let m = f.level() as i64;
    LevelElement::from_vec((0..m).map(|i| module.phi_pow(f.at(i + a), a)).collect())
}

/// `delta_m^n(f)^(j) = f^(j mod m)`, from level `m` to level `mn`.
pub fn delta<E: Clone>(f: &LevelElement<E>, n: usize) -> LevelElement<E> {
    assert!(n >= 1, "delta needs n >= 1");
    let m = f.level();
    LevelElement::from_vec((0..m * n).map(|j| f.entries[j % m].clone()).collect())
}

/// `N_m^n c = sum_{l<n} phi^(-lm) c`.
pub fn norm<M: FrobeniusAction>(module: &M, c: &M::Elem, m: usize, n: usize) -> M::Elem {
    let step = |x: &M::Elem| module.phi_pow(x, -(m as i64));
    let mut acc = module.zero();
    let mut term = c.clone();
    for _ in 0..n {
        acc = module.add(&acc, &term);
        term = step(&term);
    }
    acc
}

fn check_fixed<M: FrobeniusAction>(module: &M, c: &M::Elem, m: usize) -> Result<(), LabError> {
    if module.phi_pow(c, m as i64) == *c {
        Ok(())
    } else {
        Err(LabError::NotFixed(m))
    }
}

/// `Delta_m(c)^(i) = phi^i c` for `c` fixed by `phi^m`.
pub fn big_delta<M: FrobeniusAction>(
    module: &M,
    c: &M::Elem,
    m: usize,
) -> Result<LevelElement<M::Elem>, LabError> {
    if m == 0 {
        return Err(LabError::InvalidLevel);
    }
    check_fixed(module, c, m)?;
    let mut out = Vec::with_capacity(m);
    let mut x = c.clone();
    for _ in 0..m {
        out.push(x.clone());
        x = module.phi(&x);
    }
    Ok(LevelElement::from_vec(out))
}

/// `S_m(f) = sum_i phi^(-i) f^(i)`.
pub fn big_s<M: FrobeniusAction>(module: &M, f: &LevelElement<M::Elem>) -> M::Elem {
    let terms: Vec<M::Elem> = f
        .entries()
        .iter()
        .enumerate()
        .map(|(i, x)| module.phi_pow(x, -(i as i64)))
        .collect();
    module.sum(&terms)
}

/// `R_j(c)^(l) = phi^(l-j) c` for `l < j`, zero otherwise.
///
/// For `j != 0`, `(t-1) R_j(c)` is `c` at `j`, `-phi^(-j) c` at `0`.
pub fn r_witness<M: FrobeniusAction>(
    module: &M,
    c: &M::Elem,
    j: usize,
    m: usize,
) -> Result<LevelElement<M::Elem>, LabError> {
    if m == 0 {
        return Err(LabError::InvalidLevel);
    }
    if j >= m {
        return Err(LabError::IndexOutOfRange { j, m });
    }
    Ok(LevelElement::from_vec(
        (0..m)
            .map(|l| {
                if l < j {
                    module.phi_pow(c, l as i64 - j as i64)
                } else {
                    module.zero()
                }
            })
            .collect(),
    ))
}

/// `nu(f)^(i) = phi^i f^(i)`, defined when every entry is fixed by `phi^m`.
pub fn nu<M: FrobeniusAction>(module: &M, f: &LevelElement<M::Elem>) -> Result<LevelElement<M::Elem>, LabError> {
    nu_power(module, f, 1)
}

pub fn nu_inverse<M: FrobeniusAction>(
    module: &M,
    f: &LevelElement<M::Elem>,
) -> Result<LevelElement<M::Elem>, LabError> {
    nu_power(module, f, -1)
}

fn nu_power<M: FrobeniusAction>(
    module: &M,
    f: &LevelElement<M::Elem>,
    sign: i64,
) -> Result<LevelElement<M::Elem>, LabError> {
    let m = f.level();
    for x in f.entries() {
        check_fixed(module, x, m)?;
    }
    Ok(LevelElement::from_vec(
        f.entries()
            .iter()
            .enumerate()
            .map(|(i, x)| module.phi_pow(x, sign * i as i64))
            .collect(),
    ))
}

/// The colimit of the norm maps, normalized by `1/m`: `x / m`.
pub fn norm_colimit_value(x: &BigInt, m: usize) -> BigRational {
    assert!(m >= 1, "level must be at least 1");
    if x.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(x.clone(), BigInt::from(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainlab::{FiniteModule, Integers};
    use crate::exactalg::IntMatrix;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn z5_times2() -> FiniteModule {
        FiniteModule::new(vec![bi(5)], IntMatrix::from_rows(&[vec![2]])).unwrap()
    }

    fn lvl(v: &[i64]) -> LevelElement<Vec<BigInt>> {
        LevelElement::new(v.iter().map(|&x| vec![bi(x)]).collect()).unwrap()
    }

    #[test]
    fn twisted_shift() {
        let f = z5_times2();
        assert_eq!(t_twisted(&f, &lvl(&[1, 3])), lvl(&[1, 2]));
        let g = LevelElement::new(vec![bi(1), bi(2), bi(3)]).unwrap();
        assert_eq!(t_twisted(&Integers, &g).entries(), &[bi(3), bi(1), bi(2)]);
        assert_eq!(t_plain(&g).entries(), &[bi(3), bi(1), bi(2)]);
        assert_eq!(t_plain(&t_plain(&t_plain(&g))), g);
    }

    #[test]
    fn translations_and_delta() {
        let g = LevelElement::new(vec![bi(1), bi(2), bi(3), bi(4)]).unwrap();
        assert_eq!(tau(&g, 1).entries(), &[bi(2), bi(3), bi(4), bi(1)]);
        assert_eq!(tau(&g, 4), g);
        assert_eq!(tau(&g, 0), g);
        let h = LevelElement::new(vec![bi(7), bi(8)]).unwrap();
        assert_eq!(delta(&h, 2).entries(), &[bi(7), bi(8), bi(7), bi(8)]);
        assert_eq!(delta(&h, 1), h);
    }

    #[test]
    fn norm_examples() {
        let f = FiniteModule::new(vec![bi(7)], IntMatrix::from_rows(&[vec![3]])).unwrap();
        assert_eq!(norm(&f, &vec![bi(1)], 1, 2), vec![bi(6)]);
        assert_eq!(norm(&Integers, &bi(4), 3, 5), bi(20));
        assert_eq!(norm(&f, &vec![bi(4)], 2, 1), vec![bi(4)]);
    }

    #[test]
    fn delta_s_and_witness() {
        let f = z5_times2();
        assert_eq!(big_delta(&f, &vec![bi(1)], 4).unwrap(), lvl(&[1, 2, 4, 3]));
        assert_eq!(big_delta(&f, &vec![bi(1)], 2), Err(LabError::NotFixed(2)));
        assert_eq!(big_s(&f, &lvl(&[1, 2, 4, 3])), vec![bi(4)]);
        assert_eq!(r_witness(&f, &vec![bi(1)], 2, 3).unwrap(), lvl(&[4, 3, 0]));
        assert_eq!(
            r_witness(&f, &vec![bi(1)], 3, 3),
            Err(LabError::IndexOutOfRange { j: 3, m: 3 })
        );
        let r = r_witness(&Integers, &bi(5), 1, 2).unwrap();
        assert_eq!(r.entries(), &[bi(5), bi(0)]);
        assert_eq!(t_minus_one(&Integers, &r).entries(), &[bi(-5), bi(5)]);
    }

    #[test]
    fn nu_examples() {
        let f = z5_times2();
        assert_eq!(nu(&f, &lvl(&[1, 1, 1, 1])).unwrap(), lvl(&[1, 2, 4, 3]));
        assert_eq!(nu(&f, &lvl(&[1, 1])), Err(LabError::NotFixed(2)));
        let g = lvl(&[1, 1, 1, 1]);
        assert_eq!(nu_inverse(&f, &nu(&f, &g).unwrap()).unwrap(), g);
    }

    #[test]
    fn colimit_values() {
        assert_eq!(norm_colimit_value(&bi(3), 6), BigRational::new(bi(1), bi(2)));
        let six = norm(&Integers, &bi(2), 1, 3);
        assert_eq!(norm_colimit_value(&six, 3), norm_colimit_value(&bi(2), 1));
    }
}
