//! Weil-étale cohomology from Frobenius-module data via the descent
//! sequence `0 -> (A^{t-1})_G -> H^t_W -> (A^t)^G -> 0`, the complex formed
//! by cup product with `e`, and structural checks on the result.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::frobmod::{CanMapData, FrobError, FrobeniusModule, GroupDescriptor, Part};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeilError {
    #[error("invalid data: {}", .0.join("; "))]
    InvalidData(Vec<String>),
    #[error("degree {degree}: {source}")]
    Module { degree: usize, source: FrobError },
    #[error("canonical map in degree {0} is not semisimple at 1")]
    NotSemisimple(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// `H^t_et(X-bar, Z(n))` with Frobenius action, for `t` in `[0, 2d+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaleData {
    pub q: BigInt,
    pub p: u64,
    pub d: usize,
    pub n: i64,
    pub modules: BTreeMap<usize, FrobeniusModule>,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl EtaleData {
    pub fn new(q: impl Into<BigInt>, p: u64, d: usize, n: i64) -> EtaleData {
        EtaleData {
            q: q.into(),
            p,
            d,
            n,
            modules: BTreeMap::new(),
        }
    }

    pub fn with(mut self, degree: usize, module: FrobeniusModule) -> EtaleData {
        self.modules.insert(degree, module);
        self
    }

    /// Top degree of the input, `2d + 1`.
    pub fn top(&self) -> usize {
        2 * self.d + 1
    }

    pub fn module(&self, t: usize) -> Option<&FrobeniusModule> {
        self.modules.get(&t)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !is_prime(self.p) {
            out.push(format!("p = {} is not prime", self.p));
        } else {
            let p = BigInt::from(self.p);
            let mut q = self.q.clone();
            let mut f = 0;
            while q > BigInt::one() && (&q % &p).is_zero() {
                q /= &p;
                f += 1;
            }
            if f == 0 || !q.is_one() {
                out.push(format!("q = {} is not a positive power of p = {}", self.q, self.p));
            }
        }
        for (t, m) in &self.modules {
            if *t > self.top() {
                out.push(format!("degree {t} outside [0, {}]", self.top()));
            }
            out.extend(m.validate().into_iter().map(|e| format!("degree {t}: {e}")));
        }
        out
    }
}

/// Torsion subgroup order of `H^t_W`, as far as the data determines it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionReport {
    Exact(BigInt),
    /// The extension class matters; the order lies in `[lower, upper]`.
    Ambiguous { lower: BigInt, upper: BigInt },
    Infinite,
}

impl TorsionReport {
    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            TorsionReport::Exact(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for TorsionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorsionReport::Exact(n) => write!(f, "{n}"),
            TorsionReport::Ambiguous { lower, upper } => {
                write!(f, "extension-ambiguous [{lower}, {upper}]")
            }
            TorsionReport::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeReport {
    pub t: usize,
    /// `(A^t)^G`, the quotient.
    pub inv: GroupDescriptor,
    /// `(A^{t-1})_G`, the subgroup.
    pub coinv_prev: GroupDescriptor,
    pub rank: usize,
    pub finitely_generated: bool,
    pub torsion: TorsionReport,
}

impl DegreeReport {
    pub fn is_zero(&self) -> bool {
        self.inv.is_zero() && self.coinv_prev.is_zero()
    }
}

/// The canonical map `(A^t)^G -> (A^t)_G`.
#[derive(Clone, Debug, PartialEq)]
pub struct CupE {
    pub t: usize,
    pub data: CanMapData,
}

impl CupE {
    pub fn ker_order(&self) -> Option<BigInt> {
        self.data.ker.is_finite().then(|| self.data.ker.torsion_order())
    }

    pub fn coker_order(&self) -> Option<BigInt> {
        self.data.coker.is_finite().then(|| self.data.coker.torsion_order())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeilReport {
    pub d: usize,
    pub n: i64,
    /// Degrees `0..=2d+2`.
    pub degrees: Vec<DegreeReport>,
    /// Degrees `0..=2d+1`.
    pub cup_e: Vec<CupE>,
    pub chi_e: Option<BigRational>,
    pub rho: usize,
    pub warnings: Vec<String>,
}

impl WeilReport {
    pub fn degree(&self, t: usize) -> Option<&DegreeReport> {
        self.degrees.get(t)
    }

    pub fn rank(&self, t: i64) -> usize {
        usize::try_from(t)
            .ok()
            .and_then(|t| self.degrees.get(t))
            .map_or(0, |d| d.rank)
    }
}

fn torsion_of_extension(sub: &GroupDescriptor, quot: &GroupDescriptor) -> TorsionReport {
    if sub.divisible_corank() > 0 || quot.divisible_corank() > 0 {
        return TorsionReport::Infinite;
    }
    let ts = sub.torsion_order();
    if quot.finite_part.is_trivial() {
        return TorsionReport::Exact(ts);
    }
    let upper = &ts * quot.torsion_order();
    if sub.free_rank == 0 && sub.rational_dim == 0 {
        TorsionReport::Exact(upper)
    } else {
        TorsionReport::Ambiguous { lower: ts, upper }
    }
}

struct DegreeData {
    inv: GroupDescriptor,
    coinv: GroupDescriptor,
    can: CanMapData,
}

fn degree_data(data: &EtaleData) -> Result<Vec<DegreeData>, WeilError> {
    (0..=data.top())
        .into_par_iter()
        .map(|t| {
            let wrap = |source| WeilError::Module { degree: t, source };
            match data.module(t) {
                None => Ok(DegreeData {
                    inv: GroupDescriptor::zero(),
                    coinv: GroupDescriptor::zero(),
                    can: CanMapData {
                        ker: GroupDescriptor::zero(),
                        coker: GroupDescriptor::zero(),
                        semisimple_at_1: true,
                    },
                }),
                Some(m) => Ok(DegreeData {
                    inv: m.invariants().map_err(wrap)?,
                    coinv: m.coinvariants().map_err(wrap)?,
                    can: m.can_map_data().map_err(wrap)?,
                }),
            }
        })
        .collect()
}

/// Assembles the descent report.
pub fn descent(data: &EtaleData) -> Result<WeilReport, WeilError> {
    let problems = data.validate();
    if !problems.is_empty() {
        return Err(WeilError::InvalidData(problems));
    }
    let dd = degree_data(data)?;
    let top = data.top();
    let zero = GroupDescriptor::zero();
    let degrees: Vec<DegreeReport> = (0..=top + 1)
        .map(|t| {
            let inv = dd.get(t).map_or(&zero, |x| &x.inv).clone();
            let coinv_prev = if t == 0 { zero.clone() } else { dd[t - 1].coinv.clone() };
            DegreeReport {
                t,
                rank: inv.rank() + coinv_prev.rank(),
                finitely_generated: inv.is_finitely_generated() && coinv_prev.is_finitely_generated(),
                torsion: torsion_of_extension(&coinv_prev, &inv),
                inv,
                coinv_prev,
            }
        })
        .collect();
    let cup_e: Vec<CupE> = dd
        .into_iter()
        .enumerate()
        .map(|(t, x)| CupE { t, data: x.can })
        .collect();
    let mut report = WeilReport {
        d: data.d,
        n: data.n,
        degrees,
        cup_e,
        chi_e: None,
        rho: 0,
        warnings: Vec::new(),
    };
    report.chi_e = chi_from_cup_e(&report.cup_e).ok();
    report.rho = report.rank(2 * data.n);
    report.warnings = check_vanishing_bound(&report, data.d, data.n);
    for (t, m) in &data.modules {
        for note in m.declared_notes() {
            report
                .warnings
                .push(format!("degree {t}: uses declared part ({note})"));
        }
    }
    Ok(report)
}

fn cup_e_orders(cup_e: &[CupE]) -> Result<Vec<(BigInt, BigInt)>, WeilError> {
    cup_e
        .iter()
        .map(|c| match (c.ker_order(), c.coker_order()) {
            (Some(k), Some(q)) if c.data.semisimple_at_1 => Ok((k, q)),
            _ => Err(WeilError::NotSemisimple(c.t)),
        })
        .collect()
}

/// `|H^t(cx)| = |coker can_{t-1}| |ker can_t|` for `t` in `0..=2d+2`.
pub fn cup_e_complex_from(report: &WeilReport) -> Result<Vec<BigInt>, WeilError> {
    let orders = cup_e_orders(&report.cup_e)?;
    let len = orders.len() + 1;
    Ok((0..len)
        .map(|t| {
            let ker = orders.get(t).map_or_else(BigInt::one, |o| o.0.clone());
            let coker_prev = if t == 0 { BigInt::one() } else { orders[t - 1].1.clone() };
            ker * coker_prev
        })
        .collect())
}

pub fn cup_e_complex(data: &EtaleData) -> Result<Vec<BigInt>, WeilError> {
    cup_e_complex_from(&descent(data)?)
}

fn alternating(factors: impl Iterator<Item = (usize, BigInt)>) -> BigRational {
    let mut acc = BigRational::one();
    for (t, v) in factors {
        let v = BigRational::from_integer(v);
        if t % 2 == 0 {
            acc *= v;
        } else {
            acc /= v;
        }
    }
    acc
}

/// `prod_t (|ker can_t| / |coker can_t|)^((-1)^t)`, checked against the
/// product over the cohomology of the complex.
fn chi_from_cup_e(cup_e: &[CupE]) -> Result<BigRational, WeilError> {
    let orders = cup_e_orders(cup_e)?;
    let telescoped = alternating(orders.iter().enumerate().flat_map(|(t, (k, c))| {
        [(t, k.clone()), (t + 1, c.clone())]
    }));
    let len = orders.len() + 1;
    let direct = alternating((0..len).map(|t| {
        let ker = orders.get(t).map_or_else(BigInt::one, |o| o.0.clone());
        let coker_prev = if t == 0 { BigInt::one() } else { orders[t - 1].1.clone() };
        (t, ker * coker_prev)
    }));
    assert_eq!(telescoped, direct, "Euler characteristic forms disagree");
    Ok(direct)
}

pub fn chi_e(data: &EtaleData) -> Result<BigRational, WeilError> {
    chi_from_cup_e(&descent(data)?.cup_e)
}

/// `rank H^{2n}_W`.
pub fn rho(data: &EtaleData) -> Result<usize, WeilError> {
    Ok(descent(data)?.rho)
}

/// Warnings for nonzero `H^i_W` with `i > max(2d+1, n+d+1)`.
pub fn check_vanishing_bound(report: &WeilReport, d: usize, n: i64) -> Vec<String> {
    let bound = (2 * d as i64 + 1).max(n + d as i64 + 1);
    let mut out = Vec::new();
    for deg in &report.degrees {
        if (deg.t as i64) > bound && !deg.is_zero() {
            out.push(format!(
                "H^{}_W is nonzero ({} in the sub, {} in the quotient) above the vanishing bound {}",
                deg.t, deg.coinv_prev, deg.inv, bound
            ));
        }
    }
    if let Some(last) = report.degrees.last() {
        if last.coinv_prev.divisible_corank() > 0 {
            out.push(format!(
                "divisible coinvariants make H^{}_W nonzero",
                last.t
            ));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdicts {
    /// Finite generation of `H^t_W`, per degree.
    pub finitely_generated: Vec<(usize, bool)>,
    /// Semisimplicity at 1 of the canonical map in degree `t`.
    pub semisimple: Vec<(usize, bool)>,
}

impl Verdicts {
    pub fn all_finitely_generated(&self) -> bool {
        self.finitely_generated.iter().all(|x| x.1)
    }

    pub fn all_semisimple(&self) -> bool {
        self.semisimple.iter().all(|x| x.1)
    }

    pub fn failing_semisimple(&self) -> Vec<usize> {
        self.semisimple.iter().filter(|x| !x.1).map(|x| x.0).collect()
    }
}

/// Verdicts about the supplied data, read off the report.
pub fn conjecture_verdicts(report: &WeilReport) -> Verdicts {
    Verdicts {
        finitely_generated: report
            .degrees
            .iter()
            .map(|d| (d.t, d.finitely_generated))
            .collect(),
        semisimple: report
            .cup_e
            .iter()
            .map(|c| (c.t, c.data.semisimple_at_1))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSplitting {
    /// `(i, expected h^i + h^{i-1}, rank H^i_W)` where they differ.
    pub rank_mismatches: Vec<(usize, usize, usize)>,
    /// `(i, expected h^i, rank of e out of degree i)` where they differ.
    pub image_mismatches: Vec<(usize, usize, usize)>,
    /// The rational cup-e complex is exact.
    pub exact: bool,
}

impl RationalSplitting {
    pub fn consistent(&self) -> bool {
        self.rank_mismatches.is_empty() && self.image_mismatches.is_empty() && self.exact
    }
}

/// Compares ranks with `h^i + h^{i-1}` for motivic dimensions `h`, and
/// checks that `e` has rank `h^i` out of degree `i` and is exact over Q.
pub fn rational_splitting_check(
    report: &WeilReport,
    motivic_dims: &BTreeMap<usize, usize>,
) -> RationalSplitting {
    let h = |i: usize| motivic_dims.get(&i).copied().unwrap_or(0);
    let can_rank = |t: usize| -> usize {
        report.cup_e.get(t).map_or(0, |c| {
            let inv_rank = report.degrees[t].inv.rank();
            inv_rank - c.data.ker.rank()
        })
    };
    let mut rank_mismatches = Vec::new();
    let mut image_mismatches = Vec::new();
    let mut exact = true;
    for deg in &report.degrees {
        let i = deg.t;
        let expected = h(i) + if i > 0 { h(i - 1) } else { 0 };
        if deg.rank != expected {
            rank_mismatches.push((i, expected, deg.rank));
        }
        let into = if i > 0 { can_rank(i - 1) } else { 0 };
        let out = can_rank(i);
        if i < report.cup_e.len() && out != h(i) {
            image_mismatches.push((i, h(i), out));
        }
        exact &= deg.rank == into + out;
    }
    RationalSplitting {
        rank_mismatches,
        image_mismatches,
        exact,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStructure {
    /// Coinvariants of the rank-one lattice summand are `Z`.
    pub lattice_coinvariants_z: bool,
    /// The torsion summands of `A^{2d}` have trivial coinvariants.
    pub torsion_coinvariants_vanish: bool,
    /// `H^{2d+1}_W = Z`.
    pub top_is_z: bool,
    /// Cup product with `e` from `H^{2d}_W` onto that `Z`.
    pub cup_e_surjective: bool,
    /// Invariants of the torsion summands, the kernel of the degree map.
    pub torsion_invariants: GroupDescriptor,
}

impl DegreeStructure {
    pub fn passed(&self) -> bool {
        self.lattice_coinvariants_z && self.torsion_coinvariants_vanish && self.top_is_z && self.cup_e_surjective
    }
}

/// Structure of the top degrees for `n = d`: `A^{2d}` must be one rank-one
/// lattice summand plus torsion summands.
pub fn degree_structure_check(data: &EtaleData) -> Result<DegreeStructure, WeilError> {
    if data.n != data.d as i64 {
        return Err(WeilError::ShapeMismatch(format!("needs n = d, got n = {}, d = {}", data.n, data.d)));
    }
    let top = 2 * data.d;
    let module = data
        .module(top)
        .ok_or_else(|| WeilError::ShapeMismatch(format!("A^{top} is absent")))?;
    let (lattices, rest): (Vec<&Part>, Vec<&Part>) = module
        .parts
        .iter()
        .partition(|p| matches!(p, Part::Lattice { .. }));
    if lattices.len() != 1 || !matches!(lattices[0], Part::Lattice { phi } if phi.rows() == 1) {
        return Err(WeilError::ShapeMismatch(format!(
            "A^{top} needs exactly one rank-one lattice summand"
        )));
    }
    if rest.iter().any(|p| matches!(p, Part::Rational { .. })) {
        return Err(WeilError::ShapeMismatch(format!("A^{top} has a rational summand")));
    }
    let wrap = |source| WeilError::Module { degree: top, source };
    let lattice = FrobeniusModule::new(vec![lattices[0].clone()]);
    let torsion = FrobeniusModule::new(rest.into_iter().cloned().collect());
    let lat_coinv = lattice.coinvariants().map_err(wrap)?;
    let lattice_coinvariants_z = lat_coinv.free_rank == 1 && lat_coinv.is_torsion_free() && lat_coinv.rational_dim == 0;
    let torsion_coinvariants_vanish = torsion.coinvariants().map_err(wrap)?.is_zero();
    let report = descent(data)?;
    let h = &report.degrees[top + 1];
    let top_is_z = h.inv.is_zero()
        && h.coinv_prev.free_rank == 1
        && h.coinv_prev.is_torsion_free()
        && h.coinv_prev.rational_dim == 0;
    let cup_e_surjective = lattice.can_map_data().map_err(wrap)?.coker.is_zero();
    Ok(DegreeStructure {
        lattice_coinvariants_z,
        torsion_coinvariants_vanish,
        top_is_z,
        cup_e_surjective,
        torsion_invariants: torsion.invariants().map_err(wrap)?,
    })
}
