//! Frobenius modules: finite direct sums of lattice, finite, divisible,
//! declared and rational parts, each with an automorphism `phi`, and their
//! invariants, coinvariants and canonical map between them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{AlgError, FpGroup, FpMorphism, IntMatrix, RatMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrobError {
    #[error("invalid module: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("divisible part {0} has det(phi - 1) = 0 but phi is not the identity")]
    DegenerateDivisible(usize),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// The primes a divisible part lives at.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrimeSupport {
    /// All primes except `p`.
    CoprimeTo(u64),
    /// An explicit finite set, kept sorted.
    Primes(Vec<u64>),
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl PrimeSupport {
    pub fn primes(mut list: Vec<u64>) -> PrimeSupport {
        list.sort_unstable();
        PrimeSupport::Primes(list)
    }

    pub fn contains(&self, l: u64) -> bool {
        match self {
            PrimeSupport::CoprimeTo(p) => l != *p,
            PrimeSupport::Primes(ps) => ps.contains(&l),
        }
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            PrimeSupport::CoprimeTo(p) => {
                if !is_prime(*p) {
                    out.push(format!("coprime_to({p}) needs a prime"));
                }
            }
            PrimeSupport::Primes(ps) => {
                if ps.is_empty() {
                    out.push("explicit prime set is empty".into());
                }
                if ps.windows(2).any(|w| w[0] == w[1]) {
                    out.push("explicit primes repeat".into());
                }
                for &l in ps {
                    if !is_prime(l) {
                        out.push(format!("{l} is not prime"));
                    }
                }
            }
        }
        out
    }

    /// Largest divisor of `n` built from primes in the support.
    pub fn part_of(&self, n: &BigInt) -> BigInt {
        let n = n.abs();
        if n.is_zero() {
            return n;
        }
        match self {
            PrimeSupport::CoprimeTo(p) => {
                let p = BigInt::from(*p);
                let mut m = n;
                while m.is_multiple_of(&p) {
                    m /= &p;
                }
                m
            }
            PrimeSupport::Primes(ps) => {
                let mut out = BigInt::one();
                for &l in ps {
                    let l = BigInt::from(l);
                    let mut m = n.clone();
                    while m.is_multiple_of(&l) {
                        m /= &l;
                        out *= &l;
                    }
                }
                out
            }
        }
    }

    /// Whether `n` is a unit at every prime of the support.
    pub fn is_unit(&self, n: &BigInt) -> bool {
        !n.is_zero() && self.part_of(n).is_one()
    }
}

impl fmt::Display for PrimeSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSupport::CoprimeTo(p) => write!(f, "prime-to-{p}"),
            PrimeSupport::Primes(ps) => {
                let s: Vec<String> = ps.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", s.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Part {
    /// `Z^r` with `det phi = +-1`.
    Lattice { phi: IntMatrix },
    /// A finite group and an automorphism on its generators.
    Finite { group: FpGroup, phi: IntMatrix },
    /// `(Q/Z)^r` localized at the support, `phi` integral with determinant a
    /// unit at the support.
    Divisible {
        rank: usize,
        support: PrimeSupport,
        phi: IntMatrix,
    },
    /// A finite group of invariants supplied by the user; coinvariants are
    /// taken to be trivial.
    Declared { invariants: FpGroup, note: String },
    /// `Q^s` with invertible `phi`.
    Rational { phi: RatMatrix },
}

impl Part {
    pub fn kind(&self) -> &'static str {
        match self {
            Part::Lattice { .. } => "lattice",
            Part::Finite { .. } => "finite",
            Part::Divisible { .. } => "divisible",
            Part::Declared { .. } => "declared",
            Part::Rational { .. } => "rational",
        }
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            Part::Lattice { phi } => {
                if !phi.is_square() {
                    out.push("lattice phi is not square".into());
                } else if !phi.det().abs().is_one() {
                    out.push(format!("lattice phi has det {}", phi.det()));
                }
            }
            Part::Finite { group, phi } => {
                if !group.is_finite() {
                    out.push("finite part group is infinite".into());
                }
                let g = group.generators();
                if phi.rows() != g || phi.cols() != g {
                    out.push(format!("finite phi must be {g}x{g}"));
                } else {
                    match FpMorphism::new(group.clone(), group.clone(), phi.clone()) {
                        Err(_) => out.push("finite phi does not respect the relations".into()),
                        Ok(f) => {
                            if group.is_finite() && !f.is_injective().unwrap_or(false) {
                                out.push("finite phi is not an automorphism".into());
                            }
                        }
                    }
                }
            }
            Part::Divisible { rank, support, phi } => {
                out.extend(support.diagnostics());
                if phi.rows() != *rank || phi.cols() != *rank {
                    out.push(format!("divisible phi must be {rank}x{rank}"));
                } else {
                    let det = phi.det();
                    if !support.is_unit(&det) {
                        out.push(format!("divisible phi has det {det}, not a unit on {support}"));
                    }
                }
            }
            Part::Declared { invariants, note } => {
                if !invariants.is_finite() {
                    out.push("declared invariants must be finite".into());
                }
                if note.trim().is_empty() {
                    out.push("declared part needs a note".into());
                }
            }
            Part::Rational { phi } => {
                if !phi.is_square() {
                    out.push("rational phi is not square".into());
                } else if phi.det().is_zero() {
                    out.push("rational phi is singular".into());
                }
            }
        }
        out
    }

    fn divisible_shape(&self, index: usize) -> Result<DivisibleShape, FrobError> {
        let Part::Divisible { phi, .. } = self else {
            unreachable!("only called on divisible parts")
        };
        if phi.is_identity() {
            return Ok(DivisibleShape::Identity);
        }
        let a = phi.minus_identity();
        if a.det().is_zero() {
            return Err(FrobError::DegenerateDivisible(index));
        }
        Ok(DivisibleShape::Regular(a))
    }
}

enum DivisibleShape {
    Identity,
    Regular(IntMatrix),
}

/// An abelian group as it comes out of the descent computations:
/// `Z^free_rank + finite_part + divisible groups + Q^rational_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupDescriptor {
    pub free_rank: usize,
    pub finite_part: FpGroup,
    pub divisible_coranks: BTreeMap<PrimeSupport, usize>,
    pub rational_dim: usize,
}

impl Default for GroupDescriptor {
    fn default() -> Self {
        GroupDescriptor::zero()
    }
}

impl GroupDescriptor {
    pub fn zero() -> GroupDescriptor {
        GroupDescriptor {
            free_rank: 0,
            finite_part: FpGroup::trivial(),
            divisible_coranks: BTreeMap::new(),
            rational_dim: 0,
        }
    }

    /// Splits a finitely generated group into free rank and torsion.
    pub fn from_group(g: &FpGroup) -> GroupDescriptor {
        GroupDescriptor {
            free_rank: g.rank(),
            finite_part: g.torsion(),
            ..GroupDescriptor::zero()
        }
    }

    pub fn finite(g: FpGroup) -> GroupDescriptor {
        GroupDescriptor::from_group(&g)
    }

    pub fn direct_sum(&self, other: &GroupDescriptor) -> GroupDescriptor {
        let mut div = self.divisible_coranks.clone();
        for (s, r) in &other.divisible_coranks {
            *div.entry(s.clone()).or_insert(0) += r;
        }
        div.retain(|_, r| *r > 0);
        GroupDescriptor {
            free_rank: self.free_rank + other.free_rank,
            finite_part: self.finite_part.direct_sum(&other.finite_part).normalized(),
            divisible_coranks: div,
            rational_dim: self.rational_dim + other.rational_dim,
        }
    }

    pub fn divisible_corank(&self) -> usize {
        self.divisible_coranks.values().sum()
    }

    /// Rank of the group tensored with Q.
    pub fn rank(&self) -> usize {
        self.free_rank + self.rational_dim
    }

    pub fn torsion_order(&self) -> BigInt {
        self.finite_part.torsion_order()
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.divisible_corank() == 0 && self.rational_dim == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0 && self.is_finitely_generated()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.finite_part.is_trivial() && self.divisible_corank() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.is_torsion_free() && self.rational_dim == 0
    }

    /// Same isomorphism type.
    pub fn same_as(&self, other: &GroupDescriptor) -> bool {
        self.free_rank == other.free_rank
            && self.finite_part.is_isomorphic(&other.finite_part)
            && self.divisible_coranks == other.divisible_coranks
            && self.rational_dim == other.rational_dim
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if self.free_rank > 0 {
            terms.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for d in self.finite_part.invariant_factors() {
            terms.push(format!("Z/{d}"));
        }
        for (s, r) in &self.divisible_coranks {
            terms.push(format!("(Q/Z {s})^{r}"));
        }
        if self.rational_dim > 0 {
            terms.push(format!("Q^{}", self.rational_dim));
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Kernel and cokernel of `invariants -> M -> coinvariants`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanMapData {
    pub ker: GroupDescriptor,
    pub coker: GroupDescriptor,
    pub semisimple_at_1: bool,
}

impl CanMapData {
    fn direct_sum(&self, other: &CanMapData) -> CanMapData {
        CanMapData {
            ker: self.ker.direct_sum(&other.ker),
            coker: self.coker.direct_sum(&other.coker),
            semisimple_at_1: self.semisimple_at_1 && other.semisimple_at_1,
        }
    }

    fn from_parts(ker: GroupDescriptor, coker: GroupDescriptor) -> CanMapData {
        let semisimple_at_1 = ker.is_finite() && coker.is_finite();
        CanMapData {
            ker,
            coker,
            semisimple_at_1,
        }
    }

    fn zero() -> CanMapData {
        CanMapData::from_parts(GroupDescriptor::zero(), GroupDescriptor::zero())
    }
}

/// Torsion subgroup order of a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionOrder {
    Finite(BigInt),
    Infinite,
}

/// `M (x) Q` with its induced action.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSummary {
    pub dim: usize,
    pub phi: RatMatrix,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrobeniusModule {
    pub parts: Vec<Part>,
}

/// `phi - 1` on a finitely presented group.
fn minus_one(group: &FpGroup, phi: &IntMatrix) -> FpMorphism {
    crate::exactalg::minus_one(group, phi)
}

/// Invariants, coinvariants and the canonical map for a finitely presented
/// group with endomorphism.
fn integral_data(
    group: &FpGroup,
    phi: &IntMatrix,
) -> Result<(GroupDescriptor, GroupDescriptor, CanMapData), FrobError> {
    let d = minus_one(group, phi);
    let (inv, incl) = d.kernel()?;
    let coinv = d.cokernel()?;
    // The cokernel is presented on the generators of `group`, so the
    // composite has the inclusion matrix.
    let can = FpMorphism::new(inv.clone(), coinv.clone(), incl.matrix().clone())?;
    let (k, _) = can.kernel()?;
    let c = can.cokernel()?;
    Ok((
        GroupDescriptor::from_group(&inv),
        GroupDescriptor::from_group(&coinv),
        CanMapData::from_parts(GroupDescriptor::from_group(&k), GroupDescriptor::from_group(&c)),
    ))
}

fn support_part(g: &FpGroup, support: &PrimeSupport) -> FpGroup {
    let factors: Vec<BigInt> = g
        .invariant_factors()
        .iter()
        .map(|d| support.part_of(d))
        .collect();
    FpGroup::from_invariants(&factors)
}

fn rational_dims(phi: &RatMatrix) -> (usize, usize) {
    let a = phi.minus_identity();
    let n = a.cols();
    let rank = a.rank();
    let ker = n - rank;
    // dim(ker + im) from a stacked basis.
    let mut rows: Vec<Vec<_>> = a.kernel();
    rows.extend(a.transpose().to_rows());
    let sum_dim = if rows.is_empty() {
        0
    } else {
        RatMatrix::try_from_rows(rows, n).expect("rectangular").rank()
    };
    let meet = ker + rank - sum_dim;
    (ker, meet)
}

impl FrobeniusModule {
    pub fn new(parts: Vec<Part>) -> FrobeniusModule {
        FrobeniusModule { parts }
    }

    pub fn zero() -> FrobeniusModule {
        FrobeniusModule::default()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn validate(&self) -> Vec<String> {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                p.diagnostics()
                    .into_iter()
                    .map(move |d| format!("part {i} ({}): {d}", p.kind()))
            })
            .collect()
    }

    fn ensure_valid(&self) -> Result<(), FrobError> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(FrobError::Invalid(d))
        }
    }

    /// Notes of every declared part.
    pub fn declared_notes(&self) -> Vec<&str> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                Part::Declared { note, .. } => Some(note.as_str()),
                _ => None,
            })
            .collect()
    }

    fn part_data(
        &self,
        index: usize,
    ) -> Result<(GroupDescriptor, GroupDescriptor, CanMapData), FrobError> {
        let part = &self.parts[index];
        match part {
            Part::Lattice { phi } => integral_data(&FpGroup::free(phi.rows()), phi),
            Part::Finite { group, phi } => integral_data(group, phi),
            Part::Divisible { rank, support, .. } => match part.divisible_shape(index)? {
                DivisibleShape::Identity => {
                    let mut d = GroupDescriptor::zero();
                    if *rank > 0 {
                        d.divisible_coranks.insert(support.clone(), *rank);
                    }
                    Ok((d.clone(), d, CanMapData::zero()))
                }
                DivisibleShape::Regular(a) => {
                    let inv = support_part(&FpGroup::from_relations(a), support);
                    let inv = GroupDescriptor::finite(inv);
                    Ok((
                        inv.clone(),
                        GroupDescriptor::zero(),
                        CanMapData::from_parts(inv, GroupDescriptor::zero()),
                    ))
                }
            },
            Part::Declared { invariants, .. } => {
                let inv = GroupDescriptor::finite(invariants.normalized());
                Ok((
                    inv.clone(),
                    GroupDescriptor::zero(),
                    CanMapData::from_parts(inv, GroupDescriptor::zero()),
                ))
            }
            Part::Rational { phi } => {
                let (ker, meet) = rational_dims(phi);
                let d = GroupDescriptor {
                    rational_dim: ker,
                    ..GroupDescriptor::zero()
                };
                let m = GroupDescriptor {
                    rational_dim: meet,
                    ..GroupDescriptor::zero()
                };
                Ok((d.clone(), d, CanMapData::from_parts(m.clone(), m)))
            }
        }
    }

    fn fold<T>(
        &self,
        init: T,
        pick: impl Fn((GroupDescriptor, GroupDescriptor, CanMapData)) -> T,
        combine: impl Fn(&T, &T) -> T,
    ) -> Result<T, FrobError> {
        self.ensure_valid()?;
        let mut acc = init;
        for i in 0..self.parts.len() {
            acc = combine(&acc, &pick(self.part_data(i)?));
        }
        Ok(acc)
    }

    /// `M^G = ker(phi - 1)`.
    pub fn invariants(&self) -> Result<GroupDescriptor, FrobError> {
        self.fold(GroupDescriptor::zero(), |d| d.0, GroupDescriptor::direct_sum)
    }

    /// `M_G = coker(phi - 1)`.
    pub fn coinvariants(&self) -> Result<GroupDescriptor, FrobError> {
        self.fold(GroupDescriptor::zero(), |d| d.1, GroupDescriptor::direct_sum)
    }

    pub fn can_map_data(&self) -> Result<CanMapData, FrobError> {
        self.fold(CanMapData::zero(), |d| d.2, CanMapData::direct_sum)
    }

    /// Lattice ranks plus rational dimensions.
    pub fn rank(&self) -> usize {
        self.parts
            .iter()
            .map(|p| match p {
                Part::Lattice { phi } => phi.rows(),
                Part::Rational { phi } => phi.rows(),
                _ => 0,
            })
            .sum()
    }

    /// Product of the finite-part orders; infinite once a divisible or
    /// declared part is present.
    pub fn torsion_order(&self) -> TorsionOrder {
        let mut order = BigInt::one();
        for p in &self.parts {
            match p {
                Part::Finite { group, .. } => order *= group.torsion_order(),
                Part::Divisible { rank, .. } if *rank > 0 => return TorsionOrder::Infinite,
                Part::Declared { .. } => return TorsionOrder::Infinite,
                _ => {}
            }
        }
        TorsionOrder::Finite(order)
    }

    pub fn tensor_q(&self) -> RationalSummary {
        let mut blocks: Vec<RatMatrix> = Vec::new();
        for p in &self.parts {
            match p {
                Part::Lattice { phi } => blocks.push(phi.to_rational()),
                Part::Rational { phi } => blocks.push(phi.clone()),
                _ => {}
            }
        }
        let dim: usize = blocks.iter().map(RatMatrix::rows).sum();
        let mut phi = RatMatrix::zeros(dim, dim);
        let mut off = 0;
        for b in &blocks {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    phi[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows();
        }
        RationalSummary { dim, phi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn one(part: Part) -> FrobeniusModule {
        FrobeniusModule::new(vec![part])
    }

    #[test]
    fn lattice_examples() {
        let z = one(Part::Lattice { phi: m(&[vec![1]]) });
        assert_eq!(z.invariants().unwrap().free_rank, 1);
        let c = z.can_map_data().unwrap();
        assert!(c.ker.is_zero() && c.coker.is_zero() && c.semisimple_at_1);

        let u = one(Part::Lattice {
            phi: m(&[vec![1, 1], vec![0, 1]]),
        });
        assert_eq!(u.coinvariants().unwrap().free_rank, 1);
        let c = u.can_map_data().unwrap();
        assert_eq!(c.ker.free_rank, 1);
        assert_eq!(c.coker.free_rank, 1);
        assert!(!c.semisimple_at_1);

        let neg = one(Part::Lattice { phi: m(&[vec![-1]]) });
        let c = neg.can_map_data().unwrap();
        assert!(c.ker.is_zero());
        assert_eq!(c.coker.finite_part.invariant_factors(), &[bi(2)]);
        assert!(c.semisimple_at_1);
    }

    #[test]
    fn divisible_examples() {
        let d = one(Part::Divisible {
            rank: 1,
            support: PrimeSupport::CoprimeTo(3),
            phi: m(&[vec![3]]),
        });
        assert_eq!(d.invariants().unwrap().finite_part.invariant_factors(), &[bi(2)]);
        assert!(d.coinvariants().unwrap().is_zero());

        let e = one(Part::Divisible {
            rank: 2,
            support: PrimeSupport::CoprimeTo(5),
            phi: m(&[vec![0, -5], vec![1, 2]]),
        });
        assert_eq!(e.invariants().unwrap().torsion_order(), bi(4));

        let deg = one(Part::Divisible {
            rank: 2,
            support: PrimeSupport::CoprimeTo(5),
            phi: m(&[vec![1, 1], vec![0, 1]]),
        });
        assert_eq!(deg.invariants(), Err(FrobError::DegenerateDivisible(0)));

        let id = one(Part::Divisible {
            rank: 2,
            support: PrimeSupport::CoprimeTo(5),
            phi: IntMatrix::identity(2),
        });
        assert_eq!(id.invariants().unwrap().divisible_corank(), 2);
        let c = id.can_map_data().unwrap();
        assert!(c.ker.is_zero() && c.coker.is_zero());
        assert_eq!(id.torsion_order(), TorsionOrder::Infinite);
    }

    #[test]
    fn finite_and_mixed() {
        let z4 = one(Part::Finite {
            group: FpGroup::cyclic(4),
            phi: IntMatrix::identity(1),
        });
        assert_eq!(z4.coinvariants().unwrap().finite_part.invariant_factors(), &[bi(4)]);
        let c = z4.can_map_data().unwrap();
        assert!(c.ker.is_zero() && c.coker.is_zero());

        let mixed = FrobeniusModule::new(vec![
            Part::Lattice { phi: m(&[vec![1]]) },
            Part::Finite {
                group: FpGroup::cyclic(6),
                phi: IntMatrix::identity(1),
            },
        ]);
        assert_eq!(mixed.rank(), 1);
        assert_eq!(mixed.torsion_order(), TorsionOrder::Finite(bi(6)));
        let z2 = one(Part::Lattice {
            phi: IntMatrix::identity(2),
        });
        assert_eq!(z2.rank(), 2);
    }

    #[test]
    fn rational_can_map() {
        let q = |v: i64| num_rational::BigRational::from_integer(bi(v));
        let u = one(Part::Rational {
            phi: RatMatrix::from_vec(2, 2, vec![q(1), q(1), q(0), q(1)]),
        });
        let c = u.can_map_data().unwrap();
        assert_eq!(c.ker.rational_dim, 1);
        assert!(!c.semisimple_at_1);
        let id = one(Part::Rational {
            phi: RatMatrix::identity(3),
        });
        assert_eq!(id.invariants().unwrap().rational_dim, 3);
        assert!(id.can_map_data().unwrap().semisimple_at_1);
    }

    #[test]
    fn validation() {
        let bad = FrobeniusModule::new(vec![
            Part::Lattice { phi: m(&[vec![2]]) },
            Part::Declared {
                invariants: FpGroup::cyclic(3),
                note: " ".into(),
            },
            Part::Divisible {
                rank: 1,
                support: PrimeSupport::CoprimeTo(3),
                phi: m(&[vec![2]]),
            },
        ]);
        assert_eq!(bad.validate().len(), 3);
        assert!(matches!(bad.invariants(), Err(FrobError::Invalid(_))));
    }

    #[test]
    fn support_parts() {
        assert_eq!(PrimeSupport::CoprimeTo(5).part_of(&bi(100)), bi(4));
        assert_eq!(PrimeSupport::primes(vec![5, 2]).part_of(&bi(300)), bi(100));
        assert!(PrimeSupport::CoprimeTo(3).is_unit(&bi(-27)));
    }
}
