//! Zeta functions of varieties over finite fields as exact rational
//! functions, their special values, the Hodge exponent, and the check of
//! the special-value formula against Weil-étale data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use thiserror::Error;

use crate::exactalg::IntMatrix;
use crate::frobmod::{FrobeniusModule, Part, PrimeSupport};
use crate::poly::PolyQ;
use crate::weilcoh::{descent, EtaleData, TorsionReport, WeilError, WeilReport};
use crate::FpGroup;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("factor P_{0} must have constant term 1")]
    InvalidFactor(usize),
    #[error("point counts disagree at order {order}: expected N_m/m = {expected}, series gives {got}")]
    SeriesMismatch {
        order: usize,
        expected: Box<BigRational>,
        got: Box<BigRational>,
    },
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("torsion of H^{0}_W is not determined by the data")]
    AmbiguousTorsion(usize),
    #[error("|a| = {a} exceeds 2 sqrt(q) for q = {q}")]
    HasseBoundViolation { q: BigInt, a: BigInt },
    #[error("p-part of q + 1 - a is {expected}, got {got}")]
    PPartMismatch { expected: BigInt, got: BigInt },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Weil(#[from] WeilError),
}

/// A rational function kept as a product of polynomial powers, with a
/// reduced numerator/denominator cache.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    factors: Vec<(PolyQ, i32)>,
    num: PolyQ,
    den: PolyQ,
}

impl RationalFunction {
    /// Panics on a zero factor.
    pub fn from_factors(factors: Vec<(PolyQ, i32)>) -> RationalFunction {
        assert!(factors.iter().all(|(p, _)| !p.is_zero()), "zero factor");
        let mut num = PolyQ::one();
        let mut den = PolyQ::one();
        for (p, e) in &factors {
            let pe = p.pow(e.unsigned_abs());
            if *e >= 0 {
                num = num.mul(&pe);
            } else {
                den = den.mul(&pe);
            }
        }
        let g = num.gcd(&den);
        let mut num = num.div_rem(&g).0;
        let mut den = den.div_rem(&g).0;
        // Normalize the denominator to constant term 1 when possible,
        // otherwise to be monic.
        let c = den.coeff(0);
        let s = if c.is_zero() { den.leading().unwrap().clone() } else { c };
        num = num.scale(&s.recip());
        den = den.scale(&s.recip());
        RationalFunction { factors, num, den }
    }

    pub fn from_reduced(num: PolyQ, den: PolyQ) -> RationalFunction {
        RationalFunction::from_factors(vec![(num, 1), (den, -1)])
    }

    pub fn factors(&self) -> &[(PolyQ, i32)] {
        &self.factors
    }

    pub fn numerator(&self) -> &PolyQ {
        &self.num
    }

    pub fn denominator(&self) -> &PolyQ {
        &self.den
    }

    /// `None` at a pole.
    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(t);
        (!d.is_zero()).then(|| self.num.eval(t) / d)
    }

    /// Coefficients `c_1 .. c_k` of `t d/dt log` of the function, i.e. the
    /// power series of `sum e t P'/P`.
    pub fn log_derivative_series(&self, k: usize) -> Option<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); k + 1];
        for (p, e) in &self.factors {
            let s = series_div(&p.derivative(), p, k)?;
            let e = BigRational::from_integer(BigInt::from(*e));
            // t * P'/P shifts by one.
            for m in 1..=k {
                out[m] += &e * &s[m - 1];
            }
        }
        Some(out)
    }
}

/// Power series of `a / b` up to `t^k`; `None` if `b(0) = 0`.
fn series_div(a: &PolyQ, b: &PolyQ, k: usize) -> Option<Vec<BigRational>> {
    let b0 = b.coeff(0);
    if b0.is_zero() {
        return None;
    }
    let mut out: Vec<BigRational> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        let mut acc = a.coeff(m);
        for (j, prev) in out.iter().enumerate() {
            acc -= prev * b.coeff(m - j);
        }
        out.push(acc / &b0);
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaInput {
    pub q: BigInt,
    /// `P_0 .. P_{2d}`, ascending integer coefficients.
    pub factors: Vec<Vec<BigInt>>,
    pub point_counts: Option<Vec<BigInt>>,
}

/// `h[j][i] = dim H^j(X, Omega^i)`; missing entries are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HodgeTable {
    pub h: Vec<Vec<BigInt>>,
}

impl HodgeTable {
    pub fn get(&self, j: usize, i: usize) -> BigInt {
        self.h
            .get(j)
            .and_then(|row| row.get(i))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn diagonal(d: usize) -> HodgeTable {
        HodgeTable {
            h: (0..=d)
                .map(|j| (0..=d).map(|i| BigInt::from((i == j) as u8)).collect())
                .collect(),
        }
    }
}

/// `prod P_i^((-1)^(i+1))`.
pub fn zeta_from_factors(z: &ZetaInput) -> Result<RationalFunction, ZetaError> {
    let mut factors = Vec::with_capacity(z.factors.len());
    for (i, coeffs) in z.factors.iter().enumerate() {
        let p = PolyQ::from_ints(coeffs);
        if !p.coeff(0).is_one() {
            return Err(ZetaError::InvalidFactor(i));
        }
        factors.push((p, if i % 2 == 0 { -1 } else { 1 }));
    }
    Ok(RationalFunction::from_factors(factors))
}

/// Checks that the coefficient of `t^m` in `log Z` is `N_m / m`.
pub fn check_point_counts(z: &RationalFunction, counts: &[BigInt], _q: &BigInt) -> Result<(), ZetaError> {
    let k = counts.len();
    let series = z
        .log_derivative_series(k)
        .ok_or_else(|| ZetaError::InvalidParameter("a factor vanishes at t = 0".into()))?;
    for (idx, n) in counts.iter().enumerate() {
        let m = idx + 1;
        let mm = BigRational::from_integer(BigInt::from(m));
        let expected = BigRational::from_integer(n.clone()) / &mm;
        let got = &series[m] / &mm;
        if expected != got {
            return Err(ZetaError::SeriesMismatch {
                order: m,
                expected: Box::new(expected),
                got: Box::new(got),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialValue {
    /// Pole order at `t = q^-n`; negative for a zero.
    pub rho: i64,
    /// `lim (1 - q^n t)^rho Z(t)` as `t -> q^-n`.
    pub leading: BigRational,
}

fn q_power(q: &BigInt, n: i64) -> BigRational {
    let base = BigRational::from_integer(q.clone());
    if n >= 0 {
        Pow::pow(base, n as u64)
    } else {
        Pow::pow(base.recip(), n.unsigned_abs())
    }
}

/// Leading term at `t = q^-n` by dividing each factor by `(1 - q^n t)` as
/// often as it vanishes there.
pub fn special_value(z: &RationalFunction, q: &BigInt, n: i64) -> SpecialValue {
    let t0 = q_power(q, -n);
    let lin = PolyQ::one_minus(q_power(q, n));
    let mut order = 0i64;
    let mut leading = BigRational::one();
    for (p, e) in z.factors() {
        let mut rest = p.clone();
        let mut k = 0i64;
        loop {
            let (quot, rem) = rest.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            k += 1;
        }
        order += k * *e as i64;
        let v = rest.eval(&t0);
        leading *= if *e >= 0 {
            Pow::pow(v, e.unsigned_abs())
        } else {
            Pow::pow(v.recip(), e.unsigned_abs())
        };
    }
    SpecialValue { rho: -order, leading }
}

/// `sum_{0<=i<=n, 0<=j<=d} (-1)^(i+j) (n-i) h[j][i]`.
pub fn hodge_chi(h: &HodgeTable, n: i64, d: usize) -> BigInt {
    let mut acc = BigInt::zero();
    if n < 0 {
        return acc;
    }
    for i in 0..=n as usize {
        for j in 0..=d {
            let term = BigInt::from(n - i as i64) * h.get(j, i);
            if (i + j) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaReport {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub chi_e: BigRational,
    pub hodge_chi: BigInt,
    pub rho_zeta: i64,
    pub rho_weil: usize,
    /// `+1` or `-1`: `lhs = sign * rhs` when the absolute values agree.
    pub sign: i8,
    pub equal_up_to_sign: bool,
    pub rho_matches: bool,
    pub warnings: Vec<String>,
}

impl ZetaReport {
    pub fn passed(&self) -> bool {
        self.equal_up_to_sign && self.rho_matches
    }
}

/// Compares the leading term of `Z` at `q^-n` with
/// `chi(H_W, e) * q^chi(X, O, n)` up to sign, and the pole order with
/// `rank H^{2n}_W`.
pub fn verify_zeta_formula(z: &ZetaInput, data: &EtaleData, h: &HodgeTable) -> Result<ZetaReport, ZetaError> {
    if z.q != data.q {
        return Err(ZetaError::InvalidParameter(format!(
            "zeta q = {} differs from etale q = {}",
            z.q, data.q
        )));
    }
    let zf = zeta_from_factors(z)?;
    let mut warnings = Vec::new();
    if let Some(counts) = &z.point_counts {
        check_point_counts(&zf, counts, &z.q)?;
    }
    let sv = special_value(&zf, &z.q, data.n);
    let report = descent(data)?;
    warnings.extend(report.warnings.iter().cloned());
    let chi = crate::weilcoh::chi_e(data)?;
    let hc = hodge_chi(h, data.n, data.d);
    let exp: i64 = hc.clone().try_into().map_err(|_| ZetaError::InvalidParameter("Hodge exponent too large".into()))?;
    let rhs = &chi * q_power(&z.q, exp);
    let equal_up_to_sign = sv.leading.abs() == rhs.abs();
    let sign = if sv.leading.is_negative() != rhs.is_negative() { -1 } else { 1 };
    Ok(ZetaReport {
        lhs: sv.leading,
        rhs,
        chi_e: chi,
        hodge_chi: hc,
        rho_zeta: sv.rho,
        rho_weil: report.rho,
        sign,
        equal_up_to_sign,
        rho_matches: sv.rho == report.rho as i64,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegulatorReport {
    pub regulator: BigInt,
    /// `prod_i |H^i_W,tor|^((-1)^i) / R`.
    pub product: BigRational,
    pub chi_e: BigRational,
    pub passed: bool,
}

/// The regulator form: `chi_e = prod_i |H^i_W,tor|^((-1)^i) / R` with `R`
/// the absolute determinant of the pairing.
///
/// The report carries weight `n` only, so the pairing size is checked
/// against `rank H^{2n}_W`; the complementary-weight lattice lives in the
/// weight `d - n` report and has the same rank by duality.
pub fn regulator_check(report: &WeilReport, pairing: &IntMatrix, _d: usize, n: i64) -> Result<RegulatorReport, ZetaError> {
    if !pairing.is_square() {
        return Err(ZetaError::RankMismatch("pairing is not square".into()));
    }
    let size = pairing.rows();
    let r = report.rank(2 * n);
    if r != size {
        return Err(ZetaError::RankMismatch(format!(
            "rank H^{}_W = {r}, pairing size {size}",
            2 * n
        )));
    }
    let mut product = BigRational::one();
    for deg in &report.degrees {
        let tor = match &deg.torsion {
            TorsionReport::Exact(v) => BigRational::from_integer(v.clone()),
            _ => return Err(ZetaError::AmbiguousTorsion(deg.t)),
        };
        if deg.t % 2 == 0 {
            product *= tor;
        } else {
            product /= tor;
        }
    }
    let regulator = if size == 0 { BigInt::one() } else { pairing.det().abs() };
    let chi = report
        .chi_e
        .clone()
        .ok_or_else(|| {
            let t = report.cup_e.iter().find(|c| !c.data.semisimple_at_1).map_or(0, |c| c.t);
            ZetaError::Weil(WeilError::NotSemisimple(t))
        })?;
    let passed = !regulator.is_zero() && product.clone() / BigRational::from_integer(regulator.clone()) == chi;
    let product = if regulator.is_zero() {
        product
    } else {
        product / BigRational::from_integer(regulator.clone())
    };
    Ok(RegulatorReport {
        regulator,
        product,
        chi_e: chi,
        passed,
    })
}

/// The prime `p` with `q = p^f`, `f >= 1`.
pub fn prime_of(q: &BigInt) -> Result<u64, ZetaError> {
    let bad = || ZetaError::InvalidParameter(format!("q = {q} is not a prime power"));
    let qq: u64 = q.try_into().map_err(|_| bad())?;
    if qq < 2 {
        return Err(bad());
    }
    let p = (2..).take_while(|d| d * d <= qq).find(|d| qq.is_multiple_of(*d)).unwrap_or(qq);
    let mut r = qq;
    while r.is_multiple_of(p) {
        r /= p;
    }
    if r == 1 {
        Ok(p)
    } else {
        Err(bad())
    }
}

/// A complete example: étale data, zeta factors and Hodge numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub data: EtaleData,
    pub zeta: ZetaInput,
    pub hodge: HodgeTable,
}

fn divisible(q_power: BigInt, p: u64) -> Part {
    Part::Divisible {
        rank: 1,
        support: PrimeSupport::CoprimeTo(p),
        phi: IntMatrix::from_rows(&[vec![q_power]]),
    }
}

/// Projective space `P^d` over `F_q`, weight `n`.
pub fn example_projective_space(q: &BigInt, d: usize, n: i64) -> Result<Example, ZetaError> {
    let p = prime_of(q)?;
    let mut data = EtaleData::new(q.clone(), p, d, n);
    if (0..=d as i64).contains(&n) {
        data = data.with(
            2 * n as usize,
            FrobeniusModule::new(vec![Part::Lattice {
                phi: IntMatrix::identity(1),
            }]),
        );
    }
    for j in 0..=d as i64 {
        if j != n {
            let k = (n - j).unsigned_abs();
            data = data.with(
                2 * j as usize + 1,
                FrobeniusModule::new(vec![divisible(Pow::pow(q, k), p)]),
            );
        }
    }
    let mut factors = Vec::with_capacity(2 * d + 1);
    for i in 0..=2 * d {
        factors.push(if i % 2 == 0 {
            vec![BigInt::one(), -Pow::pow(q, (i / 2) as u64)]
        } else {
            vec![BigInt::one()]
        });
    }
    let counts = (1..=6u64)
        .map(|m| (0..=d as u64).map(|i| Pow::pow(q, i * m)).sum())
        .collect();
    Ok(Example {
        data,
        zeta: ZetaInput {
            q: q.clone(),
            factors,
            point_counts: Some(counts),
        },
        hodge: HodgeTable::diagonal(d),
    })
}

/// `N_m = q^m + 1 - (alpha^m + beta^m)` for the Weil numbers of the
/// polynomial `1 - a t + q t^2`.
fn elliptic_counts(q: &BigInt, a: &BigInt, k: usize) -> Vec<BigInt> {
    let mut s: Vec<BigInt> = vec![BigInt::from(2), a.clone()];
    while s.len() <= k {
        let l = s.len();
        s.push(a * &s[l - 1] - q * &s[l - 2]);
    }
    (1..=k)
        .map(|m| Pow::pow(q, m as u64) + BigInt::one() - &s[m])
        .collect()
}

/// An elliptic curve over `F_q` with Frobenius trace `a`, weight 1.
///
/// `p_part` is the order of the `p`-primary invariants of `A^2`; it must
/// equal the `p`-part of `q + 1 - a` and defaults to it.
pub fn example_elliptic(q: &BigInt, a: &BigInt, p_part: Option<&BigInt>) -> Result<Example, ZetaError> {
    let p = prime_of(q)?;
    if a * a > BigInt::from(4) * q {
        return Err(ZetaError::HasseBoundViolation { q: q.clone(), a: a.clone() });
    }
    let count = q + BigInt::one() - a;
    let pb = BigInt::from(p);
    let mut expected = BigInt::one();
    let mut rest = count.clone();
    while rest.is_multiple_of(&pb) {
        rest /= &pb;
        expected *= &pb;
    }
    if let Some(given) = p_part {
        if given != &expected {
            return Err(ZetaError::PPartMismatch {
                expected,
                got: given.clone(),
            });
        }
    }
    let a1 = FrobeniusModule::new(vec![divisible(q.clone(), p)]);
    let a2 = FrobeniusModule::new(vec![
        Part::Lattice {
            phi: IntMatrix::identity(1),
        },
        Part::Divisible {
            rank: 2,
            support: PrimeSupport::CoprimeTo(p),
            phi: IntMatrix::from_rows(&[vec![BigInt::zero(), -q.clone()], vec![BigInt::one(), a.clone()]]),
        },
        Part::Declared {
            invariants: FpGroup::from_invariants(&[expected]),
            note: format!("p-primary invariants of the {p}-divisible group"),
        },
    ]);
    let data = EtaleData::new(q.clone(), p, 1, 1).with(1, a1).with(2, a2);
    let factors = vec![
        vec![BigInt::one(), -BigInt::one()],
        vec![BigInt::one(), -a.clone(), q.clone()],
        vec![BigInt::one(), -q.clone()],
    ];
    let one = BigInt::one();
    Ok(Example {
        data,
        zeta: ZetaInput {
            q: q.clone(),
            factors,
            point_counts: Some(elliptic_counts(q, a, 6)),
        },
        hodge: HodgeTable {
            h: vec![vec![one.clone(), one.clone()], vec![one.clone(), one]],
        },
    })
}

/// `Z(1/(q^d t))^2 = q^(d chi) t^(2 chi) Z(t)^2` with `chi` the Euler
/// characteristic of the factorization; false at poles.
pub fn functional_equation_holds(z: &ZetaInput, d: usize, t: &BigRational) -> bool {
    let Ok(zf) = zeta_from_factors(z) else {
        return false;
    };
    let chi: i64 = z
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let deg = PolyQ::from_ints(f).degree().unwrap_or(0) as i64;
            if i % 2 == 0 {
                deg
            } else {
                -deg
            }
        })
        .sum();
    let qd = q_power(&z.q, d as i64);
    let s = (qd.clone() * t).recip();
    let (Some(lhs), Some(rhs)) = (zf.eval(&s), zf.eval(t)) else {
        return false;
    };
    let t_chi = if chi >= 0 {
        Pow::pow(t.clone(), chi as u64)
    } else {
        Pow::pow(t.recip(), chi.unsigned_abs())
    };
    let scale = q_power(&z.q, d as i64 * chi);
    &lhs * &lhs == scale * &t_chi * &t_chi * &rhs * &rhs
}

/// Motivic rational dimensions for `P^d` at weight `n`: one class in degree `2n`.
pub fn projective_motivic_dims(d: usize, n: i64) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    if (0..=d as i64).contains(&n) {
        m.insert(2 * n as usize, 1);
    }
    m
}
