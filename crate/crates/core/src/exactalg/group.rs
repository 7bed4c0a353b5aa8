//! Finitely presented abelian groups and morphisms between them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use super::normal::{in_lattice, integer_kernel, lattice_basis, snf, solve_integer};
use super::AlgError;

/// The abelian group `Z^g / (column span of relations)`.
///
/// Construction runs a Smith normal form once; the transform is kept so that
/// elements can be brought to a canonical coordinate vector.
#[derive(Clone)]
pub struct FpGroup {
    generators: usize,
    relations: IntMatrix,
    invariant_factors: Vec<BigInt>,
    // y = coord * x puts an element in diagonal coordinates.
    coord: IntMatrix,
    coord_inv: IntMatrix,
    // One modulus per generator; 0 for free coordinates, 1 for dead ones.
    moduli: Vec<BigInt>,
}

impl FpGroup {
    /// Cokernel of `rel`, whose rows index the generators.
    pub fn from_relations(rel: IntMatrix) -> FpGroup {
        let g = rel.rows();
        let s = snf(&rel);
        let diag = s.diagonal();
        let moduli: Vec<BigInt> = (0..g)
            .map(|i| diag.get(i).cloned().unwrap_or_else(BigInt::zero))
            .collect();
        let invariant_factors = moduli.iter().filter(|d| !d.is_one()).cloned().collect();
        let coord_inv = s
            .left
            .unimodular_inverse()
            .expect("smith transform is unimodular");
        FpGroup {
            generators: g,
            relations: rel,
            invariant_factors,
            coord: s.left,
            coord_inv,
            moduli,
        }
    }

    /// `Z/d_1 + ... + Z/d_k`, with `0` encoding a free summand.
    pub fn from_invariants(factors: &[BigInt]) -> FpGroup {
        let k = factors.len();
        FpGroup::from_relations(IntMatrix::diagonal(k, k, factors))
    }

    pub fn free(rank: usize) -> FpGroup {
        FpGroup::from_relations(IntMatrix::zeros(rank, 0))
    }

    pub fn cyclic(order: impl Into<BigInt>) -> FpGroup {
        FpGroup::from_invariants(&[order.into()])
    }

    pub fn trivial() -> FpGroup {
        FpGroup::free(0)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// `d_1 | d_2 | ...` with units dropped and free factors as trailing zeros.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.is_finite() {
            Some(self.invariant_factors.iter().product())
        } else {
            None
        }
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).product()
    }

    /// The torsion subgroup as an abstract group.
    pub fn torsion(&self) -> FpGroup {
        let t: Vec<BigInt> = self
            .invariant_factors
            .iter()
            .filter(|d| !d.is_zero())
            .cloned()
            .collect();
        FpGroup::from_invariants(&t)
    }

    pub fn is_isomorphic(&self, other: &FpGroup) -> bool {
        self.invariant_factors == other.invariant_factors
    }

    /// Canonical coordinates of `x`, one per invariant factor; finite
    /// coordinates are reduced into `[0, d)`.
    pub fn canonical(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.generators, "element has wrong length");
        let y = self.coord.mul_vec(x);
        y.into_iter()
            .zip(&self.moduli)
            .filter(|(_, d)| !d.is_one())
            .map(|(v, d)| if d.is_zero() { v } else { v.mod_floor(d) })
            .collect()
    }

    /// An element with the given canonical coordinates.
    pub fn from_canonical(&self, y: &[BigInt]) -> Vec<BigInt> {
        let mut full = vec![BigInt::zero(); self.generators];
        let mut it = y.iter();
        for (slot, d) in full.iter_mut().zip(&self.moduli) {
            if !d.is_one() {
                *slot = it.next().expect("too few canonical coordinates").clone();
            }
        }
        assert!(it.next().is_none(), "too many canonical coordinates");
        self.coord_inv.mul_vec(&full)
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        self.canonical(x).iter().all(Zero::is_zero)
    }

    pub fn elements_equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero_element(&diff)
    }

    /// Whether `x` lies in the relation lattice, decided by HNF solving.
    pub fn is_relation(&self, x: &[BigInt]) -> bool {
        in_lattice(&self.relations, x)
    }

    pub fn direct_sum(&self, other: &FpGroup) -> FpGroup {
        FpGroup::from_relations(self.relations.block_diag(&other.relations))
    }

    /// Re-present through the normalized invariant factors.
    pub fn normalized(&self) -> FpGroup {
        FpGroup::from_invariants(&self.invariant_factors)
    }
}

impl fmt::Debug for FpGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpGroup({})", self)
    }
}

impl fmt::Display for FpGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| {
                if d.is_zero() {
                    "Z".to_string()
                } else {
                    format!("Z/{}", d)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PartialEq for FpGroup {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.relations == other.relations
    }
}

/// A homomorphism `source -> target`; column `j` of `matrix` is the image of
/// source generator `j` in target generator coordinates.
#[derive(Clone, Debug)]
pub struct FpMorphism {
    source: FpGroup,
    target: FpGroup,
    matrix: IntMatrix,
}

impl FpMorphism {
    pub fn new(source: FpGroup, target: FpGroup, matrix: IntMatrix) -> Result<Self, AlgError> {
        let f = FpMorphism::new_unchecked(source, target, matrix);
        if f.is_compatible() {
            Ok(f)
        } else {
            Err(AlgError::IncompatibleMorphism)
        }
    }

    /// Skips the compatibility check; kernel and friends re-check it.
    pub fn new_unchecked(source: FpGroup, target: FpGroup, matrix: IntMatrix) -> Self {
        assert_eq!(matrix.rows(), target.generators(), "matrix rows != target generators");
        assert_eq!(matrix.cols(), source.generators(), "matrix cols != source generators");
        FpMorphism {
            source,
            target,
            matrix,
        }
    }

    pub fn identity(group: &FpGroup) -> Self {
        FpMorphism::new_unchecked(
            group.clone(),
            group.clone(),
            IntMatrix::identity(group.generators()),
        )
    }

    pub fn zero(source: &FpGroup, target: &FpGroup) -> Self {
        FpMorphism::new_unchecked(
            source.clone(),
            target.clone(),
            IntMatrix::zeros(target.generators(), source.generators()),
        )
    }

    pub fn source(&self) -> &FpGroup {
        &self.source
    }

    pub fn target(&self) -> &FpGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Every source relation maps into the target relation lattice.
    pub fn is_compatible(&self) -> bool {
        let images = self.matrix.mul(self.source.relations());
        (0..images.cols()).all(|j| self.target.is_relation(&images.col(j)))
    }

    fn check(&self) -> Result<(), AlgError> {
        if self.is_compatible() {
            Ok(())
        } else {
            Err(AlgError::IncompatibleMorphism)
        }
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FpMorphism) -> FpMorphism {
        FpMorphism::new_unchecked(
            other.source.clone(),
            self.target.clone(),
            self.matrix.mul(&other.matrix),
        )
    }

    /// Difference of two parallel maps.
    pub fn sub(&self, other: &FpMorphism) -> FpMorphism {
        FpMorphism::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.matrix.sub(&other.matrix),
        )
    }

    /// Equality as maps: images of all generators agree in the target.
    pub fn equals(&self, other: &FpMorphism) -> bool {
        let d = self.matrix.sub(&other.matrix);
        (0..d.cols()).all(|j| self.target.is_zero_element(&d.col(j)))
    }

    pub fn is_zero(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.target.is_zero_element(&self.matrix.col(j)))
    }

    /// Lattice of `x` in `Z^g_source` with `f(x)` a target relation.
    fn preimage_basis(&self) -> IntMatrix {
        let gs = self.source.generators();
        let stacked = self.matrix.hstack(self.target.relations());
        let ker = integer_kernel(&stacked);
        let rows: Vec<usize> = (0..gs).collect();
        lattice_basis(&ker.select_rows(&rows))
    }

    /// Kernel group and its inclusion into the source.
    pub fn kernel(&self) -> Result<(FpGroup, FpMorphism), AlgError> {
        self.check()?;
        let basis = self.preimage_basis();
        let p = basis.cols();
        let src_rel = self.source.relations();
        let mut rel = IntMatrix::zeros(p, src_rel.cols());
        for j in 0..src_rel.cols() {
            let z = solve_integer(&basis, &src_rel.col(j))
                .expect("compatible morphism: source relations lie in the preimage lattice");
            for (i, v) in z.into_iter().enumerate() {
                rel[(i, j)] = v;
            }
        }
        let k = FpGroup::from_relations(rel);
        let incl = FpMorphism::new_unchecked(k.clone(), self.source.clone(), basis);
        Ok((k, incl))
    }

    /// Cokernel group; its generators are the target generators, so the
    /// projection from the target is the identity matrix.
    pub fn cokernel(&self) -> Result<FpGroup, AlgError> {
        self.check()?;
        Ok(FpGroup::from_relations(
            self.target.relations().hstack(&self.matrix),
        ))
    }

    /// Image, presented as the source modulo the kernel.
    pub fn image(&self) -> Result<FpGroup, AlgError> {
        self.check()?;
        Ok(FpGroup::from_relations(self.preimage_basis()))
    }

    pub fn is_injective(&self) -> Result<bool, AlgError> {
        Ok(self.kernel()?.0.is_trivial())
    }

    pub fn is_surjective(&self) -> Result<bool, AlgError> {
        Ok(self.cokernel()?.is_trivial())
    }

    /// Preimage of `y` under the map, if one exists.
    pub fn lift(&self, y: &[BigInt]) -> Option<Vec<BigInt>> {
        let gs = self.source.generators();
        let stacked = self.matrix.hstack(self.target.relations());
        solve_integer(&stacked, y).map(|mut z| {
            z.truncate(gs);
            z
        })
    }
}

/// Endomorphism `phi - 1` of a group given as a square matrix.
pub fn minus_one(group: &FpGroup, phi: &IntMatrix) -> FpMorphism {
    FpMorphism::new_unchecked(group.clone(), group.clone(), phi.minus_identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn presentations() {
        let g = FpGroup::from_relations(IntMatrix::from_rows(&[vec![6]]));
        assert_eq!(g.invariant_factors(), &[bi(6)]);
        let g = FpGroup::from_relations(IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(g.invariant_factors(), &[bi(6)]);
        let g = FpGroup::from_relations(IntMatrix::zeros(2, 0));
        assert_eq!(g.invariant_factors(), &[bi(0), bi(0)]);
        assert_eq!(g.rank(), 2);
        assert!(g.order().is_none());
    }

    #[test]
    fn kernel_examples() {
        let z = FpGroup::free(1);
        let six = FpMorphism::new(z.clone(), z.clone(), IntMatrix::from_rows(&[vec![6]])).unwrap();
        assert!(six.kernel().unwrap().0.is_trivial());
        assert_eq!(six.cokernel().unwrap().invariant_factors(), &[bi(6)]);

        let sum = FpMorphism::new(FpGroup::free(2), z.clone(), IntMatrix::from_rows(&[vec![1, 1]]))
            .unwrap();
        let (k, incl) = sum.kernel().unwrap();
        assert_eq!(k.invariant_factors(), &[bi(0)]);
        let v = incl.matrix().col(0);
        assert_eq!(v[0], -v[1].clone());
        assert!(v[0].abs().is_one());

        let z4 = FpGroup::cyclic(4);
        let zero = FpMorphism::zero(&z4, &z4);
        assert_eq!(zero.kernel().unwrap().0.invariant_factors(), &[bi(4)]);
    }

    #[test]
    fn cokernel_examples() {
        let z2 = FpGroup::free(2);
        let phi = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        let f = minus_one(&z2, &phi);
        assert_eq!(f.cokernel().unwrap().invariant_factors(), &[bi(0)]);
        assert_eq!(f.image().unwrap().invariant_factors(), &[bi(0)]);

        let z5 = FpGroup::cyclic(5);
        let zero = FpMorphism::zero(&FpGroup::free(1), &z5);
        assert_eq!(zero.cokernel().unwrap().invariant_factors(), &[bi(5)]);
        assert!(zero.image().unwrap().is_trivial());
    }

    #[test]
    fn incompatible_morphism_rejected() {
        // Z/2 -> Z/3 sending 1 to 1 is not well defined.
        let r = FpMorphism::new(
            FpGroup::cyclic(2),
            FpGroup::cyclic(3),
            IntMatrix::from_rows(&[vec![1]]),
        );
        assert!(matches!(r, Err(AlgError::IncompatibleMorphism)));
        let f = FpMorphism::new_unchecked(
            FpGroup::cyclic(2),
            FpGroup::cyclic(3),
            IntMatrix::from_rows(&[vec![1]]),
        );
        assert!(matches!(f.kernel(), Err(AlgError::IncompatibleMorphism)));
        assert!(matches!(f.cokernel(), Err(AlgError::IncompatibleMorphism)));
    }

    #[test]
    fn canonical_roundtrip() {
        let g = FpGroup::from_relations(IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        let x = vec![bi(1), bi(1)];
        let y = g.canonical(&x);
        assert_eq!(y.len(), 1);
        assert!(g.elements_equal(&g.from_canonical(&y), &x));
        assert!(g.is_zero_element(&[bi(2), bi(3)]));
    }
}
