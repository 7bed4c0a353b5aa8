//! Coefficient modules: an abelian group with a chosen automorphism `phi`,
//! the action of the Frobenius generator of the Weil group.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LabError;
use crate::exactalg::random::reduce_rows;
use crate::exactalg::{FpGroup, FpMorphism, IntMatrix, RatMatrix};

/// Group arithmetic together with the automorphism `phi` and its inverse.
///
/// Elements are always kept in a reduced form, so `==` is group equality.
pub trait FrobeniusAction {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul_int(&self, k: &BigInt, a: &Self::Elem) -> Self::Elem;
    fn phi(&self, a: &Self::Elem) -> Self::Elem;
    fn phi_inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Whether `a` is a well-formed, reduced element.
    fn contains(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    /// `phi^k a` for any integer `k`.
    fn phi_pow(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        let mut x = a.clone();
        if k >= 0 {
            for _ in 0..k {
                x = self.phi(&x);
            }
        } else {
            for _ in 0..(-k) {
                x = self.phi_inv(&x);
            }
        }
        x
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// `Z/d_1 + ... + Z/d_k` with an automorphism given by a matrix whose row
/// `i` is reduced modulo `d_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteModule {
    moduli: Vec<BigInt>,
    phi: IntMatrix,
    phi_inv: IntMatrix,
    phi_order: u64,
}

/// Upper bound on the order search for `phi`; generous for groups of
/// desk-scale order.
const MAX_PHI_ORDER: u64 = 1 << 20;

impl FiniteModule {
    pub fn new(moduli: Vec<BigInt>, phi: IntMatrix) -> Result<FiniteModule, LabError> {
        let k = moduli.len();
        if moduli.iter().any(|d| d <= &BigInt::one()) {
            return Err(LabError::InvalidModule("moduli must exceed 1".into()));
        }
        if phi.rows() != k || phi.cols() != k {
            return Err(LabError::InvalidModule(format!(
                "phi must be {k}x{k}, got {}x{}",
                phi.rows(),
                phi.cols()
            )));
        }
        let group = FpGroup::from_invariants(&moduli);
        let phi = reduce_rows(&phi, &moduli);
        let f = FpMorphism::new(group.clone(), group, phi.clone())?;
        if !f.is_injective()? {
            return Err(LabError::InvalidModule("phi is not an automorphism".into()));
        }
        let (phi_order, phi_inv) = invert_by_order(&phi, &moduli)?;
        Ok(FiniteModule {
            moduli,
            phi,
            phi_inv,
            phi_order,
        })
    }

    /// Normalizes an arbitrary finite presentation and automorphism.
    pub fn from_group(group: &FpGroup, phi: &FpMorphism) -> Result<FiniteModule, LabError> {
        if !group.is_finite() {
            return Err(LabError::InvalidModule("group is infinite".into()));
        }
        if !phi.is_compatible() {
            return Err(LabError::Alg(crate::exactalg::AlgError::IncompatibleMorphism));
        }
        let moduli = group.invariant_factors().to_vec();
        let k = moduli.len();
        let mut m = IntMatrix::zeros(k, k);
        for j in 0..k {
            let mut e = vec![BigInt::zero(); k];
            e[j] = BigInt::one();
            let img = group.canonical(&phi.apply(&group.from_canonical(&e)));
            for (i, v) in img.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        FiniteModule::new(moduli, m)
    }

    pub fn trivial_action(moduli: Vec<BigInt>) -> Result<FiniteModule, LabError> {
        let k = moduli.len();
        FiniteModule::new(moduli, IntMatrix::identity(k))
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn phi_matrix(&self) -> &IntMatrix {
        &self.phi
    }

    pub fn phi_inv_matrix(&self) -> &IntMatrix {
        &self.phi_inv
    }

    /// Order of `phi` in the automorphism group.
    pub fn phi_order(&self) -> u64 {
        self.phi_order
    }

    pub fn order(&self) -> BigInt {
        self.moduli.iter().product()
    }

    pub fn group(&self) -> FpGroup {
        FpGroup::from_invariants(&self.moduli)
    }

    /// Matrix of `phi^k`, rows reduced.
    pub fn phi_power_matrix(&self, k: i64) -> IntMatrix {
        let e = k.rem_euclid(self.phi_order as i64) as u64;
        mod_pow(&self.phi, e, &self.moduli)
    }

    pub fn reduce(&self, a: &[BigInt]) -> Vec<BigInt> {
        a.iter()
            .zip(&self.moduli)
            .map(|(x, d)| x.mod_floor(d))
            .collect()
    }
}

fn mod_pow(m: &IntMatrix, mut e: u64, moduli: &[BigInt]) -> IntMatrix {
    let mut base = m.clone();
    let mut acc = IntMatrix::identity(m.rows());
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce_rows(&acc.mul(&base), moduli);
        }
        e >>= 1;
        if e > 0 {
            base = reduce_rows(&base.mul(&base), moduli);
        }
    }
    reduce_rows(&acc, moduli)
}

/// Detects the order of `phi`, then returns `phi^(order-1)` computed by
/// repeated squaring.
fn invert_by_order(phi: &IntMatrix, moduli: &[BigInt]) -> Result<(u64, IntMatrix), LabError> {
    let id = reduce_rows(&IntMatrix::identity(moduli.len()), moduli);
    let mut power = phi.clone();
    let mut order = 1u64;
    while power != id {
        power = reduce_rows(&power.mul(phi), moduli);
        order += 1;
        if order > MAX_PHI_ORDER {
            return Err(LabError::InvalidModule("automorphism order too large".into()));
        }
    }
    Ok((order, mod_pow(phi, order - 1, moduli)))
}

impl FrobeniusAction for FiniteModule {
    type Elem = Vec<BigInt>;

    fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.moduli.len()]
    }

    fn add(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), d)| (x + y).mod_floor(d))
            .collect()
    }

    fn neg(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter()
            .zip(&self.moduli)
            .map(|(x, d)| (-x).mod_floor(d))
            .collect()
    }

    fn mul_int(&self, k: &BigInt, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter()
            .zip(&self.moduli)
            .map(|(x, d)| (k * x).mod_floor(d))
            .collect()
    }

    fn phi(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        self.reduce(&self.phi.mul_vec(a))
    }

    fn phi_inv(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        self.reduce(&self.phi_inv.mul_vec(a))
    }

    fn contains(&self, a: &Vec<BigInt>) -> bool {
        a.len() == self.moduli.len()
            && a.iter()
                .zip(&self.moduli)
                .all(|(x, d)| !x.is_negative() && x < d)
    }

    fn phi_pow(&self, a: &Vec<BigInt>, k: i64) -> Vec<BigInt> {
        self.reduce(&self.phi_power_matrix(k).mul_vec(a))
    }
}

/// `Z^r` with a unimodular `phi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeModule {
    phi: IntMatrix,
    phi_inv: IntMatrix,
}

impl LatticeModule {
    pub fn new(phi: IntMatrix) -> Result<LatticeModule, LabError> {
        if !phi.is_square() {
            return Err(LabError::InvalidModule("lattice phi must be square".into()));
        }
        let phi_inv = phi
            .unimodular_inverse()
            .ok_or_else(|| LabError::InvalidModule("lattice phi must have det +-1".into()))?;
        Ok(LatticeModule { phi, phi_inv })
    }

    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi_matrix(&self) -> &IntMatrix {
        &self.phi
    }

    pub fn phi_inv_matrix(&self) -> &IntMatrix {
        &self.phi_inv
    }

    pub fn phi_power_matrix(&self, k: i64) -> IntMatrix {
        if k >= 0 {
            self.phi.pow(k as u64)
        } else {
            self.phi_inv.pow(k.unsigned_abs())
        }
    }
}

impl FrobeniusAction for LatticeModule {
    type Elem = Vec<BigInt>;

    fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    fn add(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().map(|x| -x).collect()
    }

    fn mul_int(&self, k: &BigInt, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().map(|x| k * x).collect()
    }

    fn phi(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        self.phi.mul_vec(a)
    }

    fn phi_inv(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        self.phi_inv.mul_vec(a)
    }

    fn contains(&self, a: &Vec<BigInt>) -> bool {
        a.len() == self.rank()
    }
}

/// `Q^s` with an invertible rational `phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalModule {
    phi: RatMatrix,
    phi_inv: RatMatrix,
}

impl RationalModule {
    pub fn new(phi: RatMatrix) -> Result<RationalModule, LabError> {
        let phi_inv = phi
            .inverse()
            .ok_or_else(|| LabError::InvalidModule("rational phi must be invertible".into()))?;
        Ok(RationalModule { phi, phi_inv })
    }

    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi_matrix(&self) -> &RatMatrix {
        &self.phi
    }

    pub fn phi_power_matrix(&self, k: i64) -> RatMatrix {
        if k >= 0 {
            self.phi.pow(k as u64)
        } else {
            self.phi_inv.pow(k.unsigned_abs())
        }
    }
}

impl FrobeniusAction for RationalModule {
    type Elem = Vec<BigRational>;

    fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.dim()]
    }

    fn add(&self, a: &Vec<BigRational>, b: &Vec<BigRational>) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(&self, a: &Vec<BigRational>) -> Vec<BigRational> {
        a.iter().map(|x| -x).collect()
    }

    fn mul_int(&self, k: &BigInt, a: &Vec<BigRational>) -> Vec<BigRational> {
        let k = BigRational::from_integer(k.clone());
        a.iter().map(|x| &k * x).collect()
    }

    fn phi(&self, a: &Vec<BigRational>) -> Vec<BigRational> {
        self.phi.mul_vec(a)
    }

    fn phi_inv(&self, a: &Vec<BigRational>) -> Vec<BigRational> {
        self.phi_inv.mul_vec(a)
    }

    fn contains(&self, a: &Vec<BigRational>) -> bool {
        a.len() == self.dim()
    }
}

/// The integers with trivial action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Integers;

impl FrobeniusAction for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul_int(&self, k: &BigInt, a: &BigInt) -> BigInt {
        k * a
    }

    fn phi(&self, a: &BigInt) -> BigInt {
        a.clone()
    }

    fn phi_inv(&self, a: &BigInt) -> BigInt {
        a.clone()
    }

    fn contains(&self, _a: &BigInt) -> bool {
        true
    }

    fn phi_pow(&self, a: &BigInt, _k: i64) -> BigInt {
        a.clone()
    }
}

/// A G-module at a point, one of the supported shapes.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefModule {
    Finite(FiniteModule),
    Lattice(LatticeModule),
    Rational(RationalModule),
    Integers,
}

/// Integral data shared by the finite and lattice shapes: a presentation
/// and the matrices of `phi` and `phi^-1` on its generators.
#[derive(Clone, Debug)]
pub(crate) struct IntegralAction {
    pub group: FpGroup,
    pub phi: IntMatrix,
    pub phi_inv: IntMatrix,
    finite: Option<FiniteModule>,
}

impl IntegralAction {
    pub fn phi_power(&self, k: i64) -> IntMatrix {
        match &self.finite {
            Some(f) => f.phi_power_matrix(k),
            None if k >= 0 => self.phi.pow(k as u64),
            None => self.phi_inv.pow(k.unsigned_abs()),
        }
    }
}

impl CoefModule {
    pub fn name(&self) -> &'static str {
        match self {
            CoefModule::Finite(_) => "finite",
            CoefModule::Lattice(_) => "lattice",
            CoefModule::Rational(_) => "rational",
            CoefModule::Integers => "integers",
        }
    }

    pub(crate) fn integral(&self) -> Result<IntegralAction, LabError> {
        match self {
            CoefModule::Finite(f) => Ok(IntegralAction {
                group: f.group(),
                phi: f.phi.clone(),
                phi_inv: f.phi_inv.clone(),
                finite: Some(f.clone()),
            }),
            CoefModule::Lattice(l) => Ok(IntegralAction {
                group: FpGroup::free(l.rank()),
                phi: l.phi.clone(),
                phi_inv: l.phi_inv.clone(),
                finite: None,
            }),
            CoefModule::Integers => Ok(IntegralAction {
                group: FpGroup::free(1),
                phi: IntMatrix::identity(1),
                phi_inv: IntMatrix::identity(1),
                finite: None,
            }),
            CoefModule::Rational(_) => Err(LabError::UnsupportedVariant("rational")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn finite_inverse_by_order() {
        let f = FiniteModule::new(vec![bi(5)], IntMatrix::from_rows(&[vec![2]])).unwrap();
        assert_eq!(f.phi_order(), 4);
        assert_eq!(f.phi_inv(&vec![bi(1)]), vec![bi(3)]);
        assert_eq!(f.phi_pow(&vec![bi(1)], -2), vec![bi(4)]);
    }

    #[test]
    fn finite_rejects_non_automorphism() {
        let r = FiniteModule::new(vec![bi(4)], IntMatrix::from_rows(&[vec![2]]));
        assert!(matches!(r, Err(LabError::InvalidModule(_))));
    }

    #[test]
    fn finite_from_presentation() {
        // Z/2 + Z/3 presented non-canonically, phi = -1.
        let g = FpGroup::from_relations(IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        let phi = FpMorphism::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1]]))
            .unwrap();
        let f = FiniteModule::from_group(&g, &phi).unwrap();
        assert_eq!(f.moduli(), &[bi(6)]);
        assert_eq!(f.phi_matrix(), &IntMatrix::from_rows(&[vec![5]]));
    }

    #[test]
    fn lattice_requires_unimodular() {
        assert!(LatticeModule::new(IntMatrix::from_rows(&[vec![2]])).is_err());
        let l = LatticeModule::new(IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])).unwrap();
        let x = vec![bi(3), bi(4)];
        assert_eq!(l.phi_inv(&l.phi(&x)), x);
    }
}
