//! Cohomology of the level complex, stable invariants, the cup-e homotopy
//! and connecting maps at level one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::coef::IntegralAction;
use super::level::{big_delta, big_s, t_minus_one, t_twisted};
use super::{CoefModule, FrobeniusAction, LabError, LevelElement, RationalModule};
use crate::exactalg::{integer_kernel, FpGroup, FpMorphism, IntMatrix, RatMatrix};
use crate::poly::PolyQ;

fn endo(group: &FpGroup, matrix: IntMatrix) -> FpMorphism {
    FpMorphism::new_unchecked(group.clone(), group.clone(), matrix)
}

/// The level complex as one big group `F^m` and the matrix of `t_twisted - 1`.
fn level_complex(ia: &IntegralAction, m: usize) -> (FpGroup, IntMatrix) {
    let k = ia.group.generators();
    let rel = ia.group.relations();
    let mut big_rel = IntMatrix::zeros(0, 0);
    for _ in 0..m {
        big_rel = big_rel.block_diag(rel);
    }
    let mut t = IntMatrix::zeros(m * k, m * k);
    for i in 0..m {
        let src = (i + m - 1) % m;
        for r in 0..k {
            for c in 0..k {
                t[(i * k + r, src * k + c)] += &ia.phi[(r, c)];
            }
        }
    }
    (FpGroup::from_relations(big_rel), t.minus_identity())
}

/// `(H^0, H^1)` of the level-`m` complex, computed both from `phi^m - 1`
/// directly and from `t_twisted - 1` on `F^m`; the two must agree.
pub fn level_cohomology(module: &CoefModule, m: usize) -> Result<(FpGroup, FpGroup), LabError> {
    if m == 0 {
        return Err(LabError::InvalidLevel);
    }
    let ia = module.integral()?;
    let g = &ia.group;
    let n = g.generators();

    let h0 = endo(g, ia.phi_power(m as i64).minus_identity()).kernel()?.0;
    let h1 = endo(g, IntMatrix::identity(n).sub(&ia.phi_power(-(m as i64)))).cokernel()?;

    let (big, t) = level_complex(&ia, m);
    let d = endo(&big, t);
    let k0 = d.kernel()?.0;
    let k1 = d.cokernel()?;

    if !h0.is_isomorphic(&k0) {
        return Err(LabError::RouteMismatch {
            what: "H0",
            left: h0.to_string(),
            right: k0.to_string(),
        });
    }
    if !h1.is_isomorphic(&k1) {
        return Err(LabError::RouteMismatch {
            what: "H1",
            left: h1.to_string(),
            right: k1.to_string(),
        });
    }
    Ok((h0.normalized(), h1.normalized()))
}

/// Dimensions of `H^0` and `H^1` for rational coefficients.
pub fn level_cohomology_rational(module: &RationalModule, m: usize) -> Result<(usize, usize), LabError> {
    if m == 0 {
        return Err(LabError::InvalidLevel);
    }
    let a = module.phi_power_matrix(m as i64).minus_identity();
    let ker = a.cols() - a.rank();
    Ok((ker, ker))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingReport {
    pub level: usize,
    /// Dimension of `ker(phi^m - 1)`.
    pub dim: usize,
    pub verified: bool,
}

/// Checks `(1/m) S_m(Delta_m(c)) = c` on a basis of `ker(phi^m - 1)`.
pub fn splitting_check(module: &RationalModule, m: usize) -> Result<SplittingReport, LabError> {
    if m == 0 {
        return Err(LabError::InvalidLevel);
    }
    let basis = module.phi_power_matrix(m as i64).minus_identity().kernel();
    let inv_m = BigRational::new(BigInt::one(), BigInt::from(m));
    let mut verified = true;
    for c in &basis {
        let d = big_delta(module, c, m)?;
        let back: Vec<BigRational> = big_s(module, &d).iter().map(|x| x * &inv_m).collect();
        verified &= &back == c;
    }
    Ok(SplittingReport {
        level: m,
        dim: basis.len(),
        verified,
    })
}

/// `union_m ker(phi^m - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum StableInvariants {
    /// Basis columns in the ambient generators, and the group they span.
    Integral { group: FpGroup, basis: IntMatrix },
    Rational { basis: Vec<Vec<BigRational>> },
}

impl StableInvariants {
    pub fn rank(&self) -> usize {
        match self {
            StableInvariants::Integral { group, .. } => group.rank(),
            StableInvariants::Rational { basis } => basis.len(),
        }
    }
}

/// Product of the distinct cyclotomic factors of the characteristic
/// polynomial of `phi`.
fn cyclotomic_part(phi: &RatMatrix) -> PolyQ {
    let chi = PolyQ::new(phi.char_poly());
    let r = phi.rows();
    // Euler phi(k) <= r forces k <= 2 r^2.
    let bound = (2 * r * r).max(2);
    let mut p = PolyQ::one();
    for k in 1..=bound {
        let c = PolyQ::cyclotomic(k);
        if c.divides(&chi) {
            p = p.mul(&c);
        }
    }
    p
}

fn rat_to_int(a: &RatMatrix) -> IntMatrix {
    let rows = a
        .to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    assert!(x.is_integer(), "expected an integral matrix");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    IntMatrix::try_from_rows(rows, a.cols()).expect("rectangular")
}

pub fn stable_invariants(module: &CoefModule) -> Result<StableInvariants, LabError> {
    match module {
        CoefModule::Finite(f) => Ok(StableInvariants::Integral {
            group: f.group(),
            basis: IntMatrix::identity(f.moduli().len()),
        }),
        CoefModule::Integers => Ok(StableInvariants::Integral {
            group: FpGroup::free(1),
            basis: IntMatrix::identity(1),
        }),
        CoefModule::Lattice(l) => {
            let phi = l.phi_matrix().to_rational();
            let p = cyclotomic_part(&phi);
            let basis = integer_kernel(&rat_to_int(&p.eval_matrix(&phi)));
            Ok(StableInvariants::Integral {
                group: FpGroup::free(basis.cols()),
                basis,
            })
        }
        CoefModule::Rational(r) => {
            let phi = r.phi_matrix();
            let p = cyclotomic_part(phi);
            Ok(StableInvariants::Rational {
                basis: p.eval_matrix(phi).kernel(),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupeReport {
    pub samples: usize,
    pub failures: usize,
}

impl CupeReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// The chain maps `id` and `t_twisted` in degree 0 differ by `d h + h d`
/// with `h = id` in degree 0 and `0` in degree 1; checked on each sample.
pub fn cupe_homotopy_check<M: FrobeniusAction>(
    module: &M,
    samples: &[LevelElement<M::Elem>],
) -> CupeReport {
    let failures = samples
        .iter()
        .filter(|f| {
            let difference = t_twisted(module, f).sub(module, f);
            let dh = t_minus_one(module, f);
            // h d lands in degree 1 where h vanishes.
            let hd = LevelElement::zero(module, f.level());
            difference != dh.add(module, &hd)
        })
        .count();
    CupeReport {
        samples: samples.len(),
        failures,
    }
}

/// A finitely presented group with an endomorphism `phi`.
#[derive(Clone, Debug)]
pub struct GModule {
    pub group: FpGroup,
    pub phi: IntMatrix,
}

impl GModule {
    pub fn new(group: FpGroup, phi: IntMatrix) -> Result<GModule, LabError> {
        FpMorphism::new(group.clone(), group.clone(), phi.clone())?;
        Ok(GModule { group, phi })
    }

    pub fn from_coef(module: &CoefModule) -> Result<GModule, LabError> {
        let ia = module.integral()?;
        Ok(GModule {
            group: ia.group,
            phi: ia.phi,
        })
    }

    fn phi_map(&self) -> FpMorphism {
        endo(&self.group, self.phi.clone())
    }
}

/// `0 -> a --i--> b --p--> c -> 0`.
#[derive(Clone, Debug)]
pub struct ShortExact {
    pub a: GModule,
    pub b: GModule,
    pub c: GModule,
    pub i: IntMatrix,
    pub p: IntMatrix,
}

/// The snake map `ker(phi_c - 1) -> coker(phi_a - 1)`: lift, apply
/// `phi - 1`, pull back along `i`.
///
/// The cokernel is presented on the generators of `a`.
pub fn connecting_hom(ses: &ShortExact) -> Result<FpMorphism, LabError> {
    let i = FpMorphism::new(ses.a.group.clone(), ses.b.group.clone(), ses.i.clone())
        .map_err(|_| LabError::NotExact("i does not respect relations".into()))?;
    let p = FpMorphism::new(ses.b.group.clone(), ses.c.group.clone(), ses.p.clone())
        .map_err(|_| LabError::NotExact("p does not respect relations".into()))?;

    if !i.compose(&ses.a.phi_map()).equals(&ses.b.phi_map().compose(&i)) {
        return Err(LabError::NotEquivariant("i".into()));
    }
    if !p.compose(&ses.b.phi_map()).equals(&ses.c.phi_map().compose(&p)) {
        return Err(LabError::NotEquivariant("p".into()));
    }
    if !i.is_injective()? {
        return Err(LabError::NotExact("i is not injective".into()));
    }
    if !p.is_surjective()? {
        return Err(LabError::NotExact("p is not surjective".into()));
    }
    if !p.compose(&i).is_zero() {
        return Err(LabError::NotExact("p i is not zero".into()));
    }
    let (_, kp) = p.kernel()?;
    for col in kp.matrix().columns() {
        if i.lift(&col).is_none() {
            return Err(LabError::NotExact("ker p is larger than im i".into()));
        }
    }

    let (h0, incl) = endo(&ses.c.group, ses.c.phi.minus_identity()).kernel()?;
    let h1 = endo(&ses.a.group, ses.a.phi.minus_identity()).cokernel()?;
    let phi_b_minus = ses.b.phi.minus_identity();
    let mut cols = Vec::new();
    for c in incl.matrix().columns() {
        let b = p.lift(&c).expect("p is surjective");
        let x = phi_b_minus.mul_vec(&b);
        let a = i
            .lift(&x)
            .ok_or_else(|| LabError::NotExact("(phi - 1) of a lift is not in im i".into()))?;
        cols.push(a);
    }
    let matrix = IntMatrix::from_columns(ses.a.group.generators(), &cols);
    Ok(FpMorphism::new(h0, h1, matrix)?)
}

/// `N_n = Z^2` with `phi = [[1, n], [0, 1]]` as an extension of `Z` by `Z`.
pub fn extension_n(n: i64) -> ShortExact {
    let z = FpGroup::free(1);
    let triv = GModule {
        group: z.clone(),
        phi: IntMatrix::identity(1),
    };
    ShortExact {
        a: triv.clone(),
        b: GModule {
            group: FpGroup::free(2),
            phi: IntMatrix::from_rows(&[vec![1, n], vec![0, 1]]),
        },
        c: triv,
        i: IntMatrix::from_rows(&[vec![1], vec![0]]),
        p: IntMatrix::from_rows(&[vec![0, 1]]),
    }
}

/// Whether `f: Z -> Z` (as presented) is multiplication by `+-n`.
pub fn is_plus_minus(f: &FpMorphism, n: i64) -> bool {
    let target = f.target();
    let v = f.matrix().col(0);
    let want = BigInt::from(n);
    f.source().rank() == 1
        && (target.is_zero_element(&sub(&v, &want)) || target.is_zero_element(&add(&v, &want)))
}

fn sub(v: &[BigInt], n: &BigInt) -> Vec<BigInt> {
    let mut w = v.to_vec();
    w[0] -= n;
    w
}

fn add(v: &[BigInt], n: &BigInt) -> Vec<BigInt> {
    let mut w = v.to_vec();
    w[0] += n;
    w
}
